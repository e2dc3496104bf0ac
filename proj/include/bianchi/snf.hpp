#pragma once

// Smith normal form of sparse integer matrices.
//
// Strategy: Markowitz-ordered elimination on unit pivots (checked 64-bit
// arithmetic first, arbitrary precision on overflow). The dense residual has
// its rank and a nonsingular maximal minor found mod several primes. Primes
// below 2^20 dividing that minor are treated by elimination over Z/p^k; the
// rest by a Smith form modulo the remaining cofactor of the minor. Tall
// residuals are first compressed by random row combinations for the second
// step, which is then correct except with negligible probability.

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bianchi/matrix.hpp"
#include "bianchi/quadfield.hpp"

namespace bianchi {

struct SparseMatrix64 {
    std::size_t cols = 0;
    std::vector<std::vector<std::pair<std::uint32_t, std::int64_t>>> rows;
};

struct SparseMatrix {
    std::size_t cols = 0;
    std::vector<std::vector<std::pair<std::uint32_t, Integer>>> rows;

    static SparseMatrix from_dense(const IntMatrix &M);
    IntMatrix to_dense() const;
};

struct SNFOptions {
    /// Largest residual (rows * cols) handed to the dense phase.
    std::size_t dense_limit = 60'000'000;
    /// Force arbitrary precision from the start.
    bool force_bignum = false;
    /// Allow random row compression of tall residuals.
    bool compress = true;
};

struct SNFStats {
    std::size_t unit_pivots = 0;
    std::size_t residual_rows = 0;
    std::size_t residual_cols = 0;
    std::size_t residual_rank = 0;
    std::size_t modulus_bits = 0;
    std::size_t max_row_length = 0;
    std::size_t local_primes = 0;
    std::size_t residual_blocks = 0;
    bool compressed = false;
    bool used_bignum = false;
    double seconds = 0;
};

struct SNFResult {
    std::size_t rows = 0, cols = 0;
    std::size_t rank = 0;
    /// Nonzero elementary divisors d_1 | d_2 | ... | d_rank, units omitted.
    std::vector<Integer> torsion;
    std::size_t unit_divisors = 0;
    SNFStats stats;

    /// Full divisor list (with the units).
    std::vector<Integer> divisors() const;
};

SNFResult smith_normal_form(const SparseMatrix &M, const SNFOptions &options = {});
SNFResult smith_normal_form(const SparseMatrix64 &M, const SNFOptions &options = {});
SNFResult smith_normal_form(const IntMatrix &M);

/// Rank over F_p by sparse elimination.
std::size_t rank_mod_p(const SparseMatrix64 &M, std::uint64_t p);
std::size_t rank_mod_p(const SparseMatrix &M, std::uint64_t p);

/// Product of the torsion divisors and the sum of their logarithms.
Integer torsion_order(const std::vector<Integer> &torsion);
double log_torsion(const std::vector<Integer> &torsion);

} // namespace bianchi
