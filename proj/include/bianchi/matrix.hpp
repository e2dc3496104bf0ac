#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bianchi/quadfield.hpp"

namespace bianchi {

/// Dense row-major integer matrix.
struct IntMatrix {
    std::size_t rows = 0, cols = 0;
    std::vector<Integer> data;

    IntMatrix() = default;
    IntMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    static IntMatrix identity(std::size_t n);

    Integer &operator()(std::size_t i, std::size_t j) { return data[i * cols + j]; }
    const Integer &operator()(std::size_t i, std::size_t j) const { return data[i * cols + j]; }

    bool operator==(const IntMatrix &o) const { return rows == o.rows && cols == o.cols && data == o.data; }
    bool is_zero() const;

    IntMatrix operator*(const IntMatrix &o) const;
    IntMatrix operator+(const IntMatrix &o) const;
    IntMatrix operator-(const IntMatrix &o) const;
    IntMatrix transpose() const;
    Integer trace() const;
};

/// Block diagonal matrix diag(A, B).
IntMatrix block_sum(const IntMatrix &A, const IntMatrix &B);

/// Row vector times matrix.
std::vector<Integer> row_times(const std::vector<Integer> &v, const IntMatrix &M);

} // namespace bianchi
