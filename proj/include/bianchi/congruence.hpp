#pragma once

// The finite quotient G = SL2(O_D / a), congruence subgroups described by their
// image H <= G, cusp counts and the torsion-freeness criterion.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "bianchi/quadfield.hpp"
#include "bianchi/sl2.hpp"

namespace bianchi {

/// Largest N(a) for which residues are packed into 16 bits.
inline constexpr std::int64_t kMaxQuotientNorm = 65535;
/// Largest N(a) accepted by the full group enumeration.
inline constexpr std::int64_t kEnumerationCap = 16;

/// O_D / a with residues r0 + r1*w, 0 <= r0 < a, 0 <= r1 < c, encoded as r0 + a*r1.
class QuotientRing {
  public:
    using Residue = std::uint32_t;

    QuotientRing(const FieldDescriptor &F, const IdealRep &modulus);

    const FieldDescriptor &field() const { return F_; }
    const IdealRep &modulus() const { return modulus_; }
    std::uint32_t size() const { return static_cast<std::uint32_t>(a_ * c_); }

    Residue reduce(std::int64_t x0, std::int64_t x1) const;
    Residue reduce(const RingElement &x) const;
    RingElement lift(Residue r) const;

    Residue add(Residue x, Residue y) const;
    Residue sub(Residue x, Residue y) const;
    Residue neg(Residue x) const;
    Residue mul(Residue x, Residue y) const;
    Residue zero() const { return 0; }
    Residue one() const { return 1; }

  private:
    std::int64_t r0(Residue x) const { return x % a_; }
    std::int64_t r1(Residue x) const { return x / a_; }

    FieldDescriptor F_;
    IdealRep modulus_;
    std::int64_t a_, b_, c_;
};

/// 2x2 matrix over O_D / a, entries (a b; c d).
struct MatMod {
    std::array<std::uint32_t, 4> e{};
    bool operator==(const MatMod &) const = default;
    std::uint64_t key() const
    {
        return std::uint64_t(e[0]) | (std::uint64_t(e[1]) << 16) | (std::uint64_t(e[2]) << 32) |
               (std::uint64_t(e[3]) << 48);
    }
};

/// The group G = SL2(O_D / a).
class QuotientGroup {
  public:
    QuotientGroup(const FieldDescriptor &F, const IdealRep &modulus);

    const QuotientRing &ring() const { return R_; }
    MatMod identity() const;
    MatMod minus_identity() const;
    MatMod mul(const MatMod &x, const MatMod &y) const;
    MatMod inverse(const MatMod &x) const;
    MatMod negate(const MatMod &x) const;
    MatMod reduce(const Mat2 &x) const;
    QuotientRing::Residue det(const MatMod &x) const;
    QuotientRing::Residue trace(const MatMod &x) const;
    /// Elementary generators T(1), T(w) and their transposes; they generate G.
    std::vector<MatMod> elementary_generators() const;

  private:
    QuotientRing R_;
};

/// |SL2(O_D/a)| = N^3 prod_{p | a} (1 - N(p)^-2).
Integer index_principal(const FieldDescriptor &F, const IdealRep &level);

/// Every element of SL2(O_D/a); refuses N(a) > kEnumerationCap.
std::vector<MatMod> enumerate_sl2_quotient(const FieldDescriptor &F, const IdealRep &level);

/// |SL2(O_D/a)| by counting solutions of ad - bc = 1 through a product table.
Integer count_sl2_quotient(const FieldDescriptor &F, const IdealRep &level);

enum class SubgroupKind { Principal, General };

struct SubgroupSpec {
    FieldDescriptor field;
    IdealRep level;
    SubgroupKind kind = SubgroupKind::Principal;
    /// For general specs: matrices over O_D whose reductions generate H.
    std::vector<Mat2> generators;
};

SubgroupSpec principal_spec(const FieldDescriptor &F, const IdealRep &level);
SubgroupSpec general_spec(const FieldDescriptor &F, const IdealRep &level, std::vector<Mat2> generators);

/// Closed subgroup H of G together with a canonical form for right cosets Hx.
/// With projective = true the cosets are those of {+-1}H, i.e. cosets in PSL2.
class CosetSpace {
  public:
    CosetSpace(const SubgroupSpec &spec, bool projective);

    const QuotientGroup &group() const { return G_; }
    bool projective() const { return projective_; }
    const std::vector<MatMod> &subgroup() const { return elements_; }
    bool subgroup_contains(const MatMod &x) const;
    bool contains_minus_identity() const;
    /// Representative of the coset Hx (or {+-1}Hx) that is minimal in key order.
    MatMod canonical(const MatMod &x) const;
    /// [G : H], or [G : {+-1}H] when projective.
    Integer index() const;

  private:
    QuotientGroup G_;
    bool projective_;
    bool principal_;
    std::vector<MatMod> elements_;
    std::unordered_map<std::uint64_t, std::uint32_t> lookup_;
};

/// The subgroup of G generated by the given elements (contains the identity).
std::vector<MatMod> subgroup_closure(const QuotientGroup &G, const std::vector<MatMod> &gens);

/// A cusp eta = [alpha : beta] of Gamma(D) with its peripheral data.
struct BianchiCusp {
    RingElement alpha{1};
    RingElement beta{0};
    IdealRep ideal;                        // (alpha, beta)
    std::vector<Mat2> translations;        // B^-1 T_w B for a Z-basis w of the translation lattice
    std::vector<RingElement> translation_lattice; // the w themselves, as fractions z / den
    Integer translation_denominator = 1;
    std::vector<Mat2> unit_generators;     // B^-1 diag(e, e^-1) B for generating units e
    Mat2 b_inverse_numerator;              // B^-1 = numerator / denominator
    Integer b_inverse_denominator = 1;
};

/// One cusp per ideal class: infinity for the principal class, otherwise built
/// from the reduced forms of discriminant delta_F.
std::vector<BianchiCusp> bianchi_cusps(const FieldDescriptor &F);

enum class CuspMethod { Formula, OrbitOracle };

struct CuspReport {
    Integer kappa;
    CuspMethod method = CuspMethod::OrbitOracle;
    std::vector<Integer> stabilizer_orders; // |image of Gamma(D)_eta_i in G| per Gamma(D)-cusp
    std::vector<Integer> cusps_per_class;   // cusps of the subgroup above eta_i
    std::optional<Integer> formula_value;   // closed-form count, when applicable and integral
    bool formula_applicable = false;
    std::string formula_note;
    bool agree = true;
};

/// Whether the cusp formula d_F [G:1] / (w N) is enabled: principal level,
/// -4 not in a and e - 1 not in a for every unit e != 1.
bool cusp_formula_applicable(const SubgroupSpec &spec, std::string *why = nullptr);

/// Cusp count. The oracle is always evaluated (unless prefer_formula and the
/// formula is applicable); when both run they are compared.
CuspReport cusp_count(const SubgroupSpec &spec, bool prefer_formula = false);

enum class TorsionFreeStatus { CertifiedTorsionFree, Inconclusive };

struct TorsionFreeReport {
    TorsionFreeStatus status = TorsionFreeStatus::Inconclusive;
    std::string reason;
};

TorsionFreeReport torsion_free_check(const SubgroupSpec &spec);

std::string format_matmod(const QuotientRing &R, const MatMod &x);

} // namespace bianchi
