#include "bianchi/matrix.hpp"

#include <algorithm>
#include <stdexcept>

namespace bianchi {

IntMatrix IntMatrix::identity(std::size_t n)
{
    IntMatrix I(n, n);
    for (std::size_t i = 0; i < n; ++i)
        I(i, i) = 1;
    return I;
}

bool IntMatrix::is_zero() const
{
    for (const auto &x : data)
        if (x != 0)
            return false;
    return true;
}

IntMatrix IntMatrix::operator*(const IntMatrix &o) const
{
    if (cols != o.rows)
        throw std::invalid_argument("matrix dimensions do not match for a product");
    IntMatrix out(rows, o.cols);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < cols; ++k) {
            const Integer &x = (*this)(i, k);
            if (x == 0)
                continue;
            for (std::size_t j = 0; j < o.cols; ++j)
                if (o(k, j) != 0)
                    out(i, j) += x * o(k, j);
        }
    return out;
}

IntMatrix IntMatrix::operator+(const IntMatrix &o) const
{
    if (rows != o.rows || cols != o.cols)
        throw std::invalid_argument("matrix dimensions do not match for a sum");
    IntMatrix out = *this;
    for (std::size_t i = 0; i < data.size(); ++i)
        out.data[i] += o.data[i];
    return out;
}

IntMatrix IntMatrix::operator-(const IntMatrix &o) const
{
    if (rows != o.rows || cols != o.cols)
        throw std::invalid_argument("matrix dimensions do not match for a difference");
    IntMatrix out = *this;
    for (std::size_t i = 0; i < data.size(); ++i)
        out.data[i] -= o.data[i];
    return out;
}

IntMatrix IntMatrix::transpose() const
{
    IntMatrix out(cols, rows);
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t j = 0; j < cols; ++j)
            out(j, i) = (*this)(i, j);
    return out;
}

Integer IntMatrix::trace() const
{
    Integer t = 0;
    for (std::size_t i = 0; i < std::min(rows, cols); ++i)
        t += (*this)(i, i);
    return t;
}

IntMatrix block_sum(const IntMatrix &A, const IntMatrix &B)
{
    IntMatrix out(A.rows + B.rows, A.cols + B.cols);
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j)
            out(i, j) = A(i, j);
    for (std::size_t i = 0; i < B.rows; ++i)
        for (std::size_t j = 0; j < B.cols; ++j)
            out(A.rows + i, A.cols + j) = B(i, j);
    return out;
}

std::vector<Integer> row_times(const std::vector<Integer> &v, const IntMatrix &M)
{
    if (v.size() != M.rows)
        throw std::invalid_argument("vector length does not match the matrix");
    std::vector<Integer> out(M.cols);
    for (std::size_t i = 0; i < M.rows; ++i) {
        if (v[i] == 0)
            continue;
        for (std::size_t j = 0; j < M.cols; ++j)
            if (M(i, j) != 0)
                out[j] += v[i] * M(i, j);
    }
    return out;
}

} // namespace bianchi
