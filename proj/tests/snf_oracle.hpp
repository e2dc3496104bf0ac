#pragma once

// Elementary divisors from gcds of k x k minors, for small dense matrices.

#include <algorithm>
#include <vector>

#include "bianchi/matrix.hpp"

namespace snf_oracle {

using bianchi::Integer;
using i128 = __int128;

inline i128 bareiss_det(std::vector<std::vector<i128>> a)
{
    std::size_t n = a.size();
    i128 prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t r = k + 1;
            while (r < n && a[r][k] == 0)
                ++r;
            if (r == n)
                return 0;
            std::swap(a[k], a[r]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j)
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

inline i128 gcd128(i128 a, i128 b)
{
    if (a < 0)
        a = -a;
    if (b < 0)
        b = -b;
    while (b) {
        i128 t = a % b;
        a = b;
        b = t;
    }
    return a;
}

inline void subsets(std::size_t n, std::size_t k, std::vector<std::vector<std::size_t>> &out)
{
    std::vector<std::size_t> cur;
    auto rec = [&](auto &self, std::size_t start) -> void {
        if (cur.size() == k) {
            out.push_back(cur);
            return;
        }
        for (std::size_t i = start; i < n; ++i) {
            cur.push_back(i);
            self(self, i + 1);
            cur.pop_back();
        }
    };
    rec(rec, 0);
}

// gcd of the k x k minors for k = 1..min(r, c); zero once the rank is passed.
inline std::vector<i128> minor_gcds(const std::vector<std::vector<long>> &M)
{
    std::size_t r = M.size(), c = M.empty() ? 0 : M[0].size();
    std::vector<i128> out;
    for (std::size_t k = 1; k <= std::min(r, c); ++k) {
        std::vector<std::vector<std::size_t>> rs, cs;
        subsets(r, k, rs);
        subsets(c, k, cs);
        i128 g = 0;
        for (const auto &ri : rs)
            for (const auto &ci : cs) {
                std::vector<std::vector<i128>> sub(k, std::vector<i128>(k));
                for (std::size_t a = 0; a < k; ++a)
                    for (std::size_t b = 0; b < k; ++b)
                        sub[a][b] = M[ri[a]][ci[b]];
                g = gcd128(g, bareiss_det(sub));
            }
        out.push_back(g);
        if (g == 0)
            break;
    }
    return out;
}

inline std::vector<Integer> oracle_divisors(const std::vector<std::vector<long>> &M)
{
    auto g = minor_gcds(M);
    std::vector<Integer> out;
    i128 prev = 1;
    for (auto x : g) {
        if (x == 0)
            break;
        out.push_back(Integer(static_cast<long>(x / prev)));
        prev = x;
    }
    return out;
}

inline bianchi::IntMatrix to_matrix(const std::vector<std::vector<long>> &M)
{
    bianchi::IntMatrix A(M.size(), M.empty() ? 0 : M[0].size());
    for (std::size_t i = 0; i < A.rows; ++i)
        for (std::size_t j = 0; j < A.cols; ++j)
            A(i, j) = M[i][j];
    return A;
}

} // namespace snf_oracle
