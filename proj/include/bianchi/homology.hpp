#pragma once

// H_0 and H_1 of finite-index subgroups of Bianchi groups with coefficients in
// L(m), L*(m), Lbar(m) or the trivial lattice Z.
//
// Conventions: coefficient modules are right modules (row vectors, v -> v A(g)),
// the resolution is the cellular chain complex of the universal cover of the
// presentation complex, a left Z[G]-module. C_1 has basis e_x, C_2 basis e_r and
//   d2(v e_r) = sum_x v (dr/dx) e_x,    d1(v e_x) = v (x - 1).
//
// The default engine applies these formulas to the simplified
// Reidemeister-Schreier presentation of H. The coset-complex engine works over
// the parent presentation with the induced module Z[H\G] (x) L (diagonal
// action), which by Shapiro's lemma also computes the homology of H; it is much
// larger and serves as a cross-check at small index.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bianchi/congruence.hpp"
#include "bianchi/presentation.hpp"
#include "bianchi/snf.hpp"
#include "bianchi/symreps.hpp"

namespace bianchi {

/// Element of the integral group ring of a free group: sum of coeff * word.
struct GroupRingTerm {
    Word word;
    long coeff = 0;
    bool operator==(const GroupRingTerm &o) const { return word == o.word && coeff == o.coeff; }
};
using GroupRingElement = std::vector<GroupRingTerm>;

/// Collects equal (freely reduced) words and drops zero terms; sorted.
GroupRingElement normalize(GroupRingElement e);

/// Fox derivative dw/dx_k for generator index k.
GroupRingElement fox_derivative(const Word &w, int generator);

struct FoxMatrix {
    std::size_t generators = 0;
    /// entries[r][x] = d(relator r)/dx.
    std::vector<std::vector<GroupRingElement>> entries;
};

FoxMatrix fox_boundaries(const std::vector<Word> &relators, std::size_t generators);

/// Parent presentation, coset model and simplified subgroup presentation.
struct HomologyInstance {
    SubgroupSpec spec;
    SubgroupModel model;
    SubgroupPresentation simplified;
    TorsionFreeReport torsion_free;
    std::string level_text;
};

HomologyInstance prepare_instance(const SubgroupSpec &spec, const TietzeOptions &tietze = {});

enum class HomologyEngine { CosetComplex, SubgroupFox };

std::string engine_name(HomologyEngine e);

struct HomologyOptions {
    /// Refuse runs with (simplified generator count) * rank_L above this.
    std::size_t column_cap = 20000;
    bool enforce_cap = true;
    HomologyEngine engine = HomologyEngine::SubgroupFox;
    /// Ranks of the boundary maps are compared with their ranks mod p.
    std::vector<std::uint64_t> check_primes{1000003};
    SNFOptions snf;
};

class CapExceeded : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct HomologyReport {
    int q = 1;
    Coefficients coefficients = Coefficients::L;
    int m = 0;
    std::int64_t D = 0;
    std::string level;
    std::string engine;

    std::size_t free_rank = 0;
    std::vector<Integer> divisors; // torsion divisors > 1, d_1 | d_2 | ...
    std::size_t unit_divisors = 0;
    Integer torsion_order = 1;
    double log_torsion = 0;

    std::size_t index = 0;
    bool projective = true;
    std::size_t parent_generators = 0;
    std::size_t parent_relators = 0;
    std::size_t schreier_generators = 0;
    std::size_t subgroup_generators = 0; // after Tietze simplification
    std::size_t coefficient_rank = 0;
    std::size_t chain_dims[3] = {0, 0, 0};
    std::size_t rank_d1 = 0;
    std::size_t rank_d2 = 0;
    bool composite_zero = false;
    bool torsion_free = false;
    std::string torsion_free_reason;
    SNFStats snf;
    double seconds_build = 0;
    double seconds_snf = 0;
    double seconds_total = 0;
    std::vector<std::uint64_t> checked_primes;
};

/// Throws CapExceeded when the instance exceeds the column cap.
void check_cap(const HomologyInstance &inst, Coefficients c, int m, const HomologyOptions &options);

HomologyReport homology_h1(const HomologyInstance &inst, Coefficients c, int m, const HomologyOptions &options = {});
HomologyReport homology_h0(const HomologyInstance &inst, Coefficients c, int m, const HomologyOptions &options = {});

/// Abelianization of the simplified subgroup presentation.
struct AbelianGroup {
    std::size_t free_rank = 0;
    std::vector<Integer> torsion;
};
AbelianGroup subgroup_abelianization(const HomologyInstance &inst);

/// Peripheral cycle at a cusp of the subgroup: the word T t^x u^y T^-1 where
/// (x, y) is a shortest vector of the coset's translation lattice.
struct PeripheralCycle {
    std::size_t cusp = 0;
    std::uint32_t coset = 0;
    std::int64_t x = 0, y = 0;
    Word word;
    Mat2 matrix;
};

std::vector<PeripheralCycle> peripheral_cycles(const HomologyInstance &inst);

struct BoundaryIndexReport {
    int m = 0;
    std::size_t kappa = 0;
    std::size_t rank_h1 = 0;
    std::size_t peripheral_rank = 0;
    bool full_rank = false;
    /// [H_1 free : span of the peripheral classes] when full_rank.
    Integer index = 0;
    Integer dual_torsion_order = 1;
    bool inequality_holds = false;
    std::vector<Integer> clearing_scalars;
    std::vector<PeripheralCycle> cycles;
    HomologyReport h1_L;
    HomologyReport h1_Ldual;
};

BoundaryIndexReport boundary_image_index(const HomologyInstance &inst, int m, const HomologyOptions &options = {});

} // namespace bianchi
