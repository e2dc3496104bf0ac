#pragma once

// rho(m) = Sym^{2m} of the standard representation on L(m), its dual L*(m) and
// the block sum Lbar(m) = L(m) + L*(m).
//
// Basis of L(m): v_0..v_{2m}, v'_0..v'_{2m} with v_i = e1^{2m-i} e2^i and
// v'_i = w v_i. Matrices act on column vectors.

#include <string>
#include <vector>

#include "bianchi/congruence.hpp"
#include "bianchi/matrix.hpp"
#include "bianchi/sl2.hpp"

namespace bianchi {

enum class Coefficients { L, Ldual, Lbar, Trivial };

std::string coefficients_name(Coefficients c);
Coefficients parse_coefficients(const std::string &name);
/// Z-rank of the coefficient lattice.
std::size_t coefficient_rank(Coefficients c, int m);

struct RepMatrix {
    int m = 0;
    Mat2 g;
    std::vector<RingElement> complex_model; // (2m+1)^2 row-major, over O_D
    IntMatrix integral_model;               // 2(2m+1) square, over Z
};

/// Column i of the complex model is (a e1 + c e2)^{2m-i} (b e1 + d e2)^i.
std::vector<RingElement> complex_model(const FieldDescriptor &F, const Mat2 &g, int m);
/// Realification of an O_D matrix on the basis {v, w v}.
IntMatrix realify(const FieldDescriptor &F, const std::vector<RingElement> &M, std::size_t n);

RepMatrix rho_matrix(const FieldDescriptor &F, const Mat2 &g, int m);
/// Transpose of rho(g^-1): the contragredient on L*(m).
IntMatrix dual_matrix(const FieldDescriptor &F, const Mat2 &g, int m);
IntMatrix lbar_matrix(const FieldDescriptor &F, const Mat2 &g, int m);

/// Matrix of g acting on row vectors from the right, v -> v A(g), so that
/// A(gh) = A(g) A(h). For L this is rho(g^-1)^T, for L* it is rho(g).
IntMatrix right_action(const FieldDescriptor &F, const Mat2 &g, int m, Coefficients c);

struct InvariantVector {
    std::size_t cusp = 0;
    std::vector<Integer> omega;       // coordinates in L(m)
    std::vector<Integer> omega_prime; // w * omega
    Integer clearing_scalar = 1;
};

/// rho(B^-1) e1^{2m} scaled by the least positive integer making it integral,
/// and its w-multiple. Verified against the cusp's translation generators.
InvariantVector invariant_vectors(const FieldDescriptor &F, const BianchiCusp &cusp, std::size_t index, int m);

} // namespace bianchi
