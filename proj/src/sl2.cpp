#include "bianchi/sl2.hpp"

#include <sstream>

namespace bianchi {

Mat2 mul(const FieldDescriptor &F, const Mat2 &x, const Mat2 &y)
{
    return {mul(F, x.a, y.a) + mul(F, x.b, y.c), mul(F, x.a, y.b) + mul(F, x.b, y.d),
            mul(F, x.c, y.a) + mul(F, x.d, y.c), mul(F, x.c, y.b) + mul(F, x.d, y.d)};
}

RingElement det(const FieldDescriptor &F, const Mat2 &x) { return mul(F, x.a, x.d) - mul(F, x.b, x.c); }

RingElement trace(const Mat2 &x) { return x.a + x.d; }

Mat2 inverse_sl2(const FieldDescriptor &F, const Mat2 &x)
{
    if (det(F, x) != RingElement(1))
        throw ArithmeticError("matrix " + format_mat2(x) + " does not have determinant 1");
    return {x.d, -x.b, -x.c, x.a};
}

Mat2 power(const FieldDescriptor &F, const Mat2 &x, long n)
{
    Mat2 base = n < 0 ? inverse_sl2(F, x) : x;
    unsigned long e = n < 0 ? static_cast<unsigned long>(-n) : static_cast<unsigned long>(n);
    Mat2 acc = Mat2::identity();
    while (e > 0) {
        if (e & 1)
            acc = mul(F, acc, base);
        base = mul(F, base, base);
        e >>= 1;
    }
    return acc;
}

bool is_plus_minus_identity(const Mat2 &x)
{
    return x == Mat2::identity() || x == Mat2::minus_identity();
}

Mat2 parse_mat2(const std::string &text)
{
    std::string rows[2];
    auto semi = text.find(';');
    if (semi == std::string::npos)
        throw ArithmeticError("matrix must look like 'a,b;c,d': " + text);
    rows[0] = text.substr(0, semi);
    rows[1] = text.substr(semi + 1);
    RingElement e[4];
    for (int r = 0; r < 2; ++r) {
        auto comma = rows[r].find(',');
        if (comma == std::string::npos || rows[r].find(',', comma + 1) != std::string::npos)
            throw ArithmeticError("matrix must look like 'a,b;c,d': " + text);
        e[2 * r] = parse_element(rows[r].substr(0, comma));
        e[2 * r + 1] = parse_element(rows[r].substr(comma + 1));
    }
    return {e[0], e[1], e[2], e[3]};
}

std::string format_mat2(const Mat2 &x)
{
    return format_element(x.a) + "," + format_element(x.b) + ";" + format_element(x.c) + "," +
           format_element(x.d);
}

Mat2 translation(const RingElement &w) { return {RingElement(1), w, RingElement(0), RingElement(1)}; }

} // namespace bianchi
