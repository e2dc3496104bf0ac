#pragma once

// Towers of principal congruence subgroups inside a base level Gamma_0:
// cusp-growth ratios, torsion of H_1 with Lbar(m) and Lbar(2) coefficients per
// level, and the normalized growth t_i next to the asymptotic rate.

#include <optional>
#include <string>
#include <vector>

#include "bianchi/homology.hpp"
#include "bianchi/zeta.hpp"

namespace bianchi {

/// (2m(m+1) - 12)/pi; requires m >= 3.
RationalOverPi theoretical_rate(int m);

struct TowerSpec {
    FieldDescriptor field;
    IdealRep gamma0;
    std::vector<IdealRep> chain; // a_1 contains a_2 contains ...
    int m = 3;
};

/// p, p^2, ..., p^count.
std::vector<IdealRep> prime_power_chain(const FieldDescriptor &F, const IdealRep &p, int count);
/// base, base q_1, base q_1 q_2, ... with q_j the prime ideals in order of norm.
std::vector<IdealRep> prime_product_chain(const FieldDescriptor &F, const IdealRep &base, int count);
/// Semicolon separated ideal list.
std::vector<IdealRep> parse_chain(const FieldDescriptor &F, const std::string &text);

/// Throws std::invalid_argument unless norms increase, the ideals are nested and
/// lie in gamma0.
void validate_tower(const TowerSpec &tower);

struct HypothesisRow {
    std::string level;
    Integer norm;
    Integer index; // [Gamma(D) : Gamma(a)] = |SL2(O/a)|
    Integer kappa;
    double ratio = 0; // kappa log(index) / index
    double bound = 0; // 3 h_F log N / N
    bool within_bound = false;
};

struct HypothesisReport {
    std::vector<HypothesisRow> rows;
    /// Positions i with ratio[i] >= ratio[i-1].
    std::vector<std::size_t> nondecreasing_at;
    bool all_within_bound = true;
};

HypothesisReport hypothesis_check(const TowerSpec &tower);

struct TowerOptions {
    HomologyOptions homology;
    /// Levels whose estimated dense footprint exceeds this many MB are skipped.
    std::size_t budget_mb = 4096;
    /// Levels with more cosets of the parent than this are skipped; 0 disables.
    std::size_t coset_cap = 1500;
    /// Levels run concurrently.
    unsigned jobs = 1;
    bool compute_h0 = true;
};

struct LevelReport {
    std::string level;
    Integer norm;
    Integer index_gamma0; // [Gamma_0 : Gamma_i] in PSL2
    std::size_t cosets = 0;
    Integer kappa;
    double hyp_ratio = 0;
    double volume = 0;
    bool torsion_free = false;
    bool computed = false;
    std::string error;
    std::size_t rank_h1 = 0;
    std::size_t expected_rank = 0;
    double log_tors_m = 0;
    double log_tors_2 = 0;
    double t_i = 0;       // log|tors_m| / vol(X_i)
    double t_i_index = 0; // log|tors_m| / [Gamma_0 : Gamma_i]
    double t_i_normalized = 0; // (log|tors_m| - log|tors_2|) / vol(X_i)
    std::optional<double> log_h0;
    std::optional<double> log_h0_per_index;
    HomologyReport h1_m, h1_2;
};

struct GrowthReport {
    std::int64_t D = 0;
    int m = 0;
    std::string gamma0;
    bool gamma0_torsion_free = false;
    bool warning_not_torsion_free = false;
    double covolume = 0;
    double volume0 = 0;
    RationalOverPi rate;
    std::vector<RationalOverPi> l2_constants; // c_{H^3}(rho(k)) for k = 1..m
    HypothesisReport hypothesis;
    std::vector<LevelReport> levels;
    /// Positions i (among computed levels) where t decreased from the previous one.
    std::vector<std::size_t> t_decreasing_at;
    /// Positions i where log|H_0| / index did not decrease.
    std::vector<std::size_t> h0_nondecreasing_at;
};

GrowthReport run_tower(const TowerSpec &tower, const TowerOptions &options = {});

std::string growth_report_json(const GrowthReport &report);
std::string growth_report_csv(const GrowthReport &report);

} // namespace bianchi
