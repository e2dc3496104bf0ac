#pragma once

// Arithmetic of an imaginary quadratic field F = Q(sqrt(-D)), its ring of
// integers O_D = Z + Z*w, and ideals stored in Hermite normal form over the
// Z-basis {1, w}.

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <gmpxx.h>

namespace bianchi {

using Integer = mpz_class;

class ArithmeticError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

enum class OmegaKind {
    SqrtMinusD,   // D = 1,2 mod 4: w = sqrt(-D)
    HalfIntegral, // D = 3 mod 4:   w = (1 + sqrt(-D)) / 2
};

/// Largest D accepted by make_field. Class numbers and cusp data are only
/// exercised up to this bound.
inline constexpr std::int64_t kMaxDiscriminantParameter = 200;

struct FieldDescriptor {
    std::int64_t D = 0;
    OmegaKind omega_kind = OmegaKind::SqrtMinusD;
    std::int64_t discriminant = 0; // delta_F < 0
    std::int64_t class_number = 0;
    int unit_count = 0;

    // w^2 = omega_sq0 + omega_sq1 * w
    std::int64_t omega_sq0 = 0;
    std::int64_t omega_sq1 = 0;

    std::complex<double> omega() const;
    std::string omega_name() const;

    bool operator==(const FieldDescriptor &) const = default;
};

FieldDescriptor make_field(std::int64_t D);

bool is_squarefree(std::int64_t n);

/// Number of reduced primitive binary quadratic forms of discriminant disc < 0.
std::int64_t count_reduced_forms(std::int64_t disc);

/// Element a + b*w of O_D. The field is supplied by the caller for every
/// operation that needs the multiplication rule.
struct RingElement {
    Integer a = 0;
    Integer b = 0;

    RingElement() = default;
    RingElement(Integer a_, Integer b_) : a(std::move(a_)), b(std::move(b_)) {}
    RingElement(long v) : a(v), b(0) {}

    bool is_zero() const { return a == 0 && b == 0; }
    bool operator==(const RingElement &o) const { return a == o.a && b == o.b; }
    bool operator!=(const RingElement &o) const { return !(*this == o); }
    bool operator<(const RingElement &o) const { return a != o.a ? a < o.a : b < o.b; }

    RingElement operator-() const { return {-a, -b}; }
    RingElement operator+(const RingElement &o) const { return {a + o.a, b + o.b}; }
    RingElement operator-(const RingElement &o) const { return {a - o.a, b - o.b}; }
    RingElement operator*(const Integer &k) const { return {a * k, b * k}; }
};

RingElement mul(const FieldDescriptor &F, const RingElement &x, const RingElement &y);
RingElement conj(const FieldDescriptor &F, const RingElement &x);
Integer norm(const FieldDescriptor &F, const RingElement &x);
/// x + conj(x), a rational integer.
Integer trace(const FieldDescriptor &F, const RingElement &x);
std::complex<double> to_complex(const FieldDescriptor &F, const RingElement &x);
RingElement omega_element();
bool is_unit(const FieldDescriptor &F, const RingElement &x);
std::vector<RingElement> units(const FieldDescriptor &F);
/// Exact division x / y when y divides x in O_D.
std::optional<RingElement> exact_div(const FieldDescriptor &F, const RingElement &x, const RingElement &y);
/// Whether x is a rational integer in [-2, 2] (i.e. not loxodromic as a trace).
bool is_real_in_closed_interval(const FieldDescriptor &F, const RingElement &x, long lo, long hi);

/// Parses "a+b*w", "-3", "2*w", "1-w", ...
RingElement parse_element(const std::string &text);
std::string format_element(const RingElement &x);

/// Ideal in HNF: Z-basis {a, b + c*w} with a, c > 0, c | a, c | b, 0 <= b < a.
struct IdealRep {
    Integer a = 1;
    Integer b = 0;
    Integer c = 1;
    std::vector<RingElement> generators;

    Integer norm() const { return a * c; }
    bool is_unit_ideal() const { return a == 1 && c == 1; }
    bool same_lattice(const IdealRep &o) const { return a == o.a && b == o.b && c == o.c; }
    RingElement basis0() const { return {a, 0}; }
    RingElement basis1() const { return {b, c}; }
};

bool contains(const IdealRep &I, const RingElement &x);
/// Ideal generated (as an O_D-module) by the given elements.
IdealRep ideal_from_generators(const FieldDescriptor &F, const std::vector<RingElement> &gens);
IdealRep ideal_product(const FieldDescriptor &F, const IdealRep &I, const IdealRep &J);
IdealRep ideal_conjugate(const FieldDescriptor &F, const IdealRep &I);
/// I contained in J.
bool ideal_contains(const IdealRep &J, const IdealRep &I);
/// Every ideal of O_D with norm in [1, max_norm].
std::vector<IdealRep> enumerate_ideals(const FieldDescriptor &F, std::int64_t max_norm);
/// Some element generating I, or nullopt when I is not principal.
std::optional<RingElement> find_generator(const FieldDescriptor &F, const IdealRep &I);
std::string format_ideal(const FieldDescriptor &F, const IdealRep &I);
/// Parses a comma separated generator list, e.g. "2+w" or "3,1+w".
IdealRep parse_ideal(const FieldDescriptor &F, const std::string &text);

struct PrimeFactor {
    IdealRep prime;
    int exponent = 0;
    std::int64_t rational_prime = 0;
    int residue_degree = 0; // N(p) = rational_prime ^ residue_degree
};

struct PrimeFactorization {
    std::vector<PrimeFactor> factors;
};

std::vector<std::pair<std::int64_t, int>> factor_integer(std::int64_t n);
/// Primes of O_D above the rational prime p.
std::vector<PrimeFactor> primes_above(const FieldDescriptor &F, std::int64_t p);
PrimeFactorization factor_ideal(const FieldDescriptor &F, const IdealRep &I);
IdealRep multiply_out(const FieldDescriptor &F, const PrimeFactorization &f);

/// Kronecker symbol (d / n) for n >= 1.
int kronecker(std::int64_t d, std::int64_t n);

struct CovolumeResult {
    double zeta2 = 0;         // zeta_F(2)
    double covolume = 0;      // vol(Gamma(D) \ H^3)
    double error_bound = 0;   // bound on |covolume - true value|
    std::int64_t terms = 0;   // length of the character sum
};

/// |delta_F|^{3/2} zeta_F(2) / (4 pi^2) with zeta_F(2) = zeta(2) L(2, chi_delta).
/// The character sum is truncated at the first N whose Abel-summation tail
/// bound |delta| / N^2 is below 10^-precision.
CovolumeResult covolume(const FieldDescriptor &F, int precision);
/// Same sum truncated at an explicit length; exposed for the monotonicity checks.
CovolumeResult covolume_truncated(const FieldDescriptor &F, std::int64_t terms);

} // namespace bianchi
