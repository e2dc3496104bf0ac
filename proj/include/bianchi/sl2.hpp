#pragma once

#include <complex>
#include <string>

#include "bianchi/quadfield.hpp"

namespace bianchi {

/// 2x2 matrix over O_D, rows (a b; c d).
struct Mat2 {
    RingElement a{1}, b{0}, c{0}, d{1};

    static Mat2 identity() { return {}; }
    static Mat2 minus_identity() { return {RingElement(-1), RingElement(0), RingElement(0), RingElement(-1)}; }

    bool operator==(const Mat2 &o) const { return a == o.a && b == o.b && c == o.c && d == o.d; }
    bool operator!=(const Mat2 &o) const { return !(*this == o); }
    bool operator<(const Mat2 &o) const
    {
        if (a != o.a)
            return a < o.a;
        if (b != o.b)
            return b < o.b;
        if (c != o.c)
            return c < o.c;
        return d < o.d;
    }
    Mat2 operator-() const { return {-a, -b, -c, -d}; }
};

Mat2 mul(const FieldDescriptor &F, const Mat2 &x, const Mat2 &y);
RingElement det(const FieldDescriptor &F, const Mat2 &x);
RingElement trace(const Mat2 &x);
/// Inverse of a determinant-one matrix; throws if det != 1.
Mat2 inverse_sl2(const FieldDescriptor &F, const Mat2 &x);
Mat2 power(const FieldDescriptor &F, const Mat2 &x, long n);
bool is_plus_minus_identity(const Mat2 &x);

/// Parses "a,b;c,d" where each entry is a ring element such as "1+w".
Mat2 parse_mat2(const std::string &text);
std::string format_mat2(const Mat2 &x);

Mat2 translation(const RingElement &w);

} // namespace bianchi
