#pragma once

// Loxodromic conjugacy classes, truncated Ruelle zeta log-series, the covering
// estimate and the geodesic side of the normalized Reidemeister torsion.
//
// The geodesic enumeration is bounded by word length and is never complete;
// every table carries that caveat, and tail bounds use a constant c_X fitted to
// the enumerated lengths.

#include <complex>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <gmpxx.h>

#include "bianchi/homology.hpp"
#include "bianchi/presentation.hpp"
#include "bianchi/sl2.hpp"

namespace bianchi {

struct ConjugacyClassRecord {
    Word word;
    Mat2 matrix;
    RingElement trace;
    std::complex<double> lambda; // |lambda| > 1
    double lambda_error = 0;
    double length = 0;   // 2 log |lambda|
    double holonomy = 0; // arg lambda in (-pi, pi] for the representative matrix
    int multiplicity = 1;
};

/// Classifies one matrix; nullopt unless loxodromic.
std::optional<ConjugacyClassRecord> classify_loxodromic(const FieldDescriptor &F, const Mat2 &g);

struct EnumerationOptions {
    double cutoff = 8;
    int word_bound = 4;
    /// Conjugators tried when merging classes of equal trace: words up to this length.
    int conjugation_bound = 2;
    /// If set, the counting bound count(l <= R) <= c e^{2R} is checked with it.
    std::optional<double> reference_constant;
};

struct GeodesicTable {
    std::string subgroup;
    std::vector<std::string> generator_names;
    double cutoff = 0;
    int word_bound = 0;
    std::vector<ConjugacyClassRecord> classes; // sorted by length
    std::string dedup_policy;
    bool complete = false;
    std::size_t words_examined = 0;
    std::size_t possible_overcount = 0;
    /// Least c with #{l <= x} <= c e^{2x} over the table.
    double c_X = 0;
    bool counting_bound_violated = false;
    /// Smallest enumerated length (the true systole may be shorter).
    std::optional<double> min_length;
};

GeodesicTable enumerate_loxodromic(const FieldDescriptor &F, const std::vector<Mat2> &generators,
                                   const std::vector<std::string> &names, const EnumerationOptions &options);

/// Enumeration over the simplified generators of the subgroup, or over the
/// parent presentation when the subgroup is the whole group.
GeodesicTable enumerate_loxodromic(const HomologyInstance &inst, const EnumerationOptions &options);

/// Table built from explicit (length, holonomy, multiplicity) data.
GeodesicTable toy_table(const std::vector<std::tuple<double, double, int>> &classes, double c_X = 0);

/// Classes with length <= R; the fitted constant is kept.
GeodesicTable truncate(const GeodesicTable &table, double R);

/// Least c with #{l <= x} <= c e^{2x} for the given lengths.
double calibrate_counting_constant(const std::vector<ConjugacyClassRecord> &classes);

/// Bound on sum over l > R of e^{-s l} given #{l <= x} <= c e^{2x}.
double tail_bound(double c_X, double R, double s);

struct ZetaEvaluation {
    double s = 0;
    double k = 0;
    std::complex<double> value;
    double tail_bound = 0;
    double cutoff = 0;
    std::size_t classes_used = 0;
    bool complete = false;
};

/// -sum_{l(c) <= R} e^{2ik theta_c} e^{-s l(c)} / n(c); requires s >= 3.
ZetaEvaluation log_ruelle(const GeodesicTable &table, double s, double k);

struct CoveringCheck {
    double lhs = 0, lhs_error = 0; // |log R_X(s, sigma_k)|
    double rhs = 0, rhs_error = 0; // C(X0) [X0:X] e^{-l(X)/2}
    double C_X0 = 0;
    double systole = 0;
    bool pass = false;        // within error bars
    bool strict_pass = false; // lhs + error <= rhs - error
};

CoveringCheck covering_bound_check(const GeodesicTable &table_X, const GeodesicTable &table_X0, double index,
                                   double s, double k);

struct TorsionEstimate {
    double value = 0;
    double error = 0;
    double volume_term = 0;
    double zeta_term = 0;
    bool complete = false;
};

/// -(1/pi) vol (m(m+1) - 6) + sum_{k=3}^m log |R(k, sigma_k)|; requires m >= 3.
TorsionEstimate normalized_rt_geodesic(const GeodesicTable &table, int m, double vol);

/// q / pi for an exact rational q.
struct RationalOverPi {
    mpq_class coefficient;
    double value() const;
    bool operator==(const RationalOverPi &o) const { return coefficient == o.coefficient; }
};

/// c_{H^3}(rho(m)) = m(m+1)/pi + 1/(6 pi).
RationalOverPi l2_torsion_constant(int m);

std::string format_word(const std::vector<std::string> &names, const Word &w);

/// CSV with columns word, trace, length, holonomy, n.
std::string table_csv(const GeodesicTable &table);

} // namespace bianchi
