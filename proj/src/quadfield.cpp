#include "bianchi/quadfield.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace bianchi {

bool is_squarefree(std::int64_t n)
{
    if (n <= 0)
        return false;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        if (n % (p * p) == 0)
            return false;
    }
    return true;
}

std::int64_t count_reduced_forms(std::int64_t disc)
{
    if (disc >= 0 || ((disc % 4) + 4) % 4 > 1)
        throw ArithmeticError("discriminant must be negative and 0 or 1 mod 4");
    // |b| <= a <= c, b >= 0 if |b| == a or a == c; a <= sqrt(|disc|/3).
    std::int64_t count = 0;
    for (std::int64_t a = 1; 3 * a * a <= -disc; ++a) {
        for (std::int64_t b = -a + 1; b <= a; ++b) {
            std::int64_t num = b * b - disc;
            if (num % (4 * a) != 0)
                continue;
            std::int64_t c = num / (4 * a);
            if (c < a)
                continue;
            if (c == a && b < 0)
                continue;
            if (std::gcd(std::gcd(a, std::abs(b)), c) != 1)
                continue;
            ++count;
        }
    }
    return count;
}

FieldDescriptor make_field(std::int64_t D)
{
    if (D <= 0)
        throw ArithmeticError("D must be a positive integer, got " + std::to_string(D));
    if (!is_squarefree(D))
        throw ArithmeticError("D must be square-free, got " + std::to_string(D));
    if (D > kMaxDiscriminantParameter)
        throw ArithmeticError("D = " + std::to_string(D) + " exceeds the supported range D <= " +
                              std::to_string(kMaxDiscriminantParameter));
    FieldDescriptor F;
    F.D = D;
    if (D % 4 == 3) {
        F.omega_kind = OmegaKind::HalfIntegral;
        F.discriminant = -D;
        F.omega_sq0 = -(1 + D) / 4;
        F.omega_sq1 = 1;
    } else {
        F.omega_kind = OmegaKind::SqrtMinusD;
        F.discriminant = -4 * D;
        F.omega_sq0 = -D;
        F.omega_sq1 = 0;
    }
    F.unit_count = D == 1 ? 4 : D == 3 ? 6 : 2;
    F.class_number = count_reduced_forms(F.discriminant);
    return F;
}

std::complex<double> FieldDescriptor::omega() const
{
    double s = std::sqrt(static_cast<double>(D));
    if (omega_kind == OmegaKind::HalfIntegral)
        return {0.5, s / 2};
    return {0.0, s};
}

std::string FieldDescriptor::omega_name() const
{
    if (omega_kind == OmegaKind::HalfIntegral)
        return "(1+sqrt(-" + std::to_string(D) + "))/2";
    return "sqrt(-" + std::to_string(D) + ")";
}

RingElement mul(const FieldDescriptor &F, const RingElement &x, const RingElement &y)
{
    // (a + b w)(c + d w) = ac + (ad + bc) w + bd w^2
    Integer bd = x.b * y.b;
    return {x.a * y.a + bd * F.omega_sq0, x.a * y.b + x.b * y.a + bd * F.omega_sq1};
}

RingElement conj(const FieldDescriptor &F, const RingElement &x)
{
    if (F.omega_kind == OmegaKind::HalfIntegral)
        return {x.a + x.b, -x.b};
    return {x.a, -x.b};
}

Integer norm(const FieldDescriptor &F, const RingElement &x)
{
    if (F.omega_kind == OmegaKind::HalfIntegral)
        return x.a * x.a + x.a * x.b + x.b * x.b * ((1 + F.D) / 4);
    return x.a * x.a + x.b * x.b * F.D;
}

Integer trace(const FieldDescriptor &F, const RingElement &x)
{
    if (F.omega_kind == OmegaKind::HalfIntegral)
        return 2 * x.a + x.b;
    return 2 * x.a;
}

std::complex<double> to_complex(const FieldDescriptor &F, const RingElement &x)
{
    return x.a.get_d() + x.b.get_d() * F.omega();
}

RingElement omega_element() { return {0, 1}; }

bool is_unit(const FieldDescriptor &F, const RingElement &x) { return norm(F, x) == 1; }

std::vector<RingElement> units(const FieldDescriptor &F)
{
    std::vector<RingElement> out;
    for (long a = -1; a <= 1; ++a)
        for (long b = -1; b <= 1; ++b) {
            RingElement x{a, b};
            if (is_unit(F, x))
                out.push_back(x);
        }
    std::sort(out.begin(), out.end());
    return out;
}

std::optional<RingElement> exact_div(const FieldDescriptor &F, const RingElement &x, const RingElement &y)
{
    if (y.is_zero())
        throw ArithmeticError("division by zero in O_D");
    Integer n = norm(F, y);
    RingElement num = mul(F, x, conj(F, y));
    if (!mpz_divisible_p(num.a.get_mpz_t(), n.get_mpz_t()) || !mpz_divisible_p(num.b.get_mpz_t(), n.get_mpz_t()))
        return std::nullopt;
    return RingElement{num.a / n, num.b / n};
}

bool is_real_in_closed_interval(const FieldDescriptor &F, const RingElement &x, long lo, long hi)
{
    (void)F;
    // w is never real, so x is real exactly when b == 0.
    return x.b == 0 && x.a >= lo && x.a <= hi;
}

RingElement parse_element(const std::string &text)
{
    std::string s;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)))
            s.push_back(ch);
    if (s.empty())
        throw ArithmeticError("empty ring element");
    RingElement out;
    std::size_t i = 0;
    while (i < s.size()) {
        int sign = 1;
        if (s[i] == '+' || s[i] == '-') {
            sign = s[i] == '-' ? -1 : 1;
            ++i;
        }
        std::size_t start = i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i])))
            ++i;
        Integer coeff = 1;
        bool have_digits = i > start;
        if (have_digits)
            coeff = Integer(s.substr(start, i - start));
        bool is_omega = false;
        if (i < s.size() && s[i] == '*') {
            ++i;
            if (i >= s.size() || s[i] != 'w')
                throw ArithmeticError("malformed ring element: " + text);
        }
        if (i < s.size() && s[i] == 'w') {
            is_omega = true;
            ++i;
        }
        if (!have_digits && !is_omega)
            throw ArithmeticError("malformed ring element: " + text);
        if (is_omega)
            out.b += sign * coeff;
        else
            out.a += sign * coeff;
        if (i < s.size() && s[i] != '+' && s[i] != '-')
            throw ArithmeticError("malformed ring element: " + text);
    }
    return out;
}

std::string format_element(const RingElement &x)
{
    std::ostringstream os;
    if (x.b == 0) {
        os << x.a.get_str();
        return os.str();
    }
    if (x.a != 0)
        os << x.a.get_str();
    Integer b = x.b;
    if (x.a != 0)
        os << (b < 0 ? "-" : "+");
    else if (b < 0)
        os << "-";
    Integer ab = abs(b);
    if (ab != 1)
        os << ab.get_str() << "*";
    os << "w";
    return os.str();
}

namespace {

// Hermite normal form of the Z-lattice spanned by vectors (x0, x1) in the
// coordinates of {1, w}.
IdealRep hnf_lattice(const std::vector<RingElement> &vectors)
{
    RingElement pivot{0, 0};
    Integer a = 0;
    for (const RingElement &v : vectors) {
        if (v.b == 0) {
            a = gcd(a, v.a);
            continue;
        }
        if (pivot.b == 0) {
            a = gcd(a, pivot.a);
            pivot = v;
            continue;
        }
        Integer g, s, t;
        mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), pivot.b.get_mpz_t(), v.b.get_mpz_t());
        RingElement combined{s * pivot.a + t * v.a, g};
        Integer other = (v.b / g) * pivot.a - (pivot.b / g) * v.a;
        a = gcd(a, other);
        pivot = combined;
    }
    if (pivot.b == 0 || a == 0)
        throw ArithmeticError("lattice is not of full rank (zero ideal?)");
    if (pivot.b < 0)
        pivot = -pivot;
    IdealRep I;
    I.a = abs(a);
    I.c = pivot.b;
    I.b = pivot.a % I.a;
    if (I.b < 0)
        I.b += I.a;
    return I;
}

Integer isqrt_floor(const Integer &n)
{
    Integer r;
    mpz_sqrt(r.get_mpz_t(), n.get_mpz_t());
    return r;
}

} // namespace

bool contains(const IdealRep &I, const RingElement &x)
{
    if (!mpz_divisible_p(x.b.get_mpz_t(), I.c.get_mpz_t()))
        return false;
    Integer q = x.b / I.c;
    Integer r = x.a - q * I.b;
    return mpz_divisible_p(r.get_mpz_t(), I.a.get_mpz_t()) != 0;
}

IdealRep ideal_from_generators(const FieldDescriptor &F, const std::vector<RingElement> &gens)
{
    std::vector<RingElement> vectors;
    for (const RingElement &g : gens) {
        vectors.push_back(g);
        vectors.push_back(mul(F, g, omega_element()));
    }
    IdealRep I = hnf_lattice(vectors);
    I.generators = gens;
    return I;
}

IdealRep ideal_product(const FieldDescriptor &F, const IdealRep &I, const IdealRep &J)
{
    std::vector<RingElement> vectors;
    for (const RingElement &x : {I.basis0(), I.basis1()})
        for (const RingElement &y : {J.basis0(), J.basis1()}) {
            RingElement p = mul(F, x, y);
            vectors.push_back(p);
            vectors.push_back(mul(F, p, omega_element()));
        }
    IdealRep out = hnf_lattice(vectors);
    if (!I.generators.empty() && !J.generators.empty() && I.generators.size() == 1 && J.generators.size() == 1)
        out.generators = {mul(F, I.generators[0], J.generators[0])};
    return out;
}

IdealRep ideal_conjugate(const FieldDescriptor &F, const IdealRep &I)
{
    IdealRep out = hnf_lattice({conj(F, I.basis0()), conj(F, I.basis1())});
    for (const RingElement &g : I.generators)
        out.generators.push_back(conj(F, g));
    return out;
}

bool ideal_contains(const IdealRep &J, const IdealRep &I)
{
    return contains(J, I.basis0()) && contains(J, I.basis1());
}

std::vector<IdealRep> enumerate_ideals(const FieldDescriptor &F, std::int64_t max_norm)
{
    std::vector<IdealRep> out;
    for (std::int64_t c = 1; c <= max_norm; ++c) {
        for (std::int64_t a = c; a * c <= max_norm; a += c) {
            for (std::int64_t b = 0; b < a; b += c) {
                IdealRep I;
                I.a = a;
                I.b = b;
                I.c = c;
                // closure under multiplication by w
                if (!contains(I, mul(F, I.basis0(), omega_element())) ||
                    !contains(I, mul(F, I.basis1(), omega_element())))
                    continue;
                if (auto g = find_generator(F, I))
                    I.generators = {*g};
                out.push_back(std::move(I));
            }
        }
    }
    std::sort(out.begin(), out.end(), [](const IdealRep &x, const IdealRep &y) {
        if (x.norm() != y.norm())
            return x.norm() < y.norm();
        if (x.a != y.a)
            return x.a < y.a;
        return x.b < y.b;
    });
    return out;
}

std::optional<RingElement> find_generator(const FieldDescriptor &F, const IdealRep &I)
{
    Integer N = I.norm();
    if (F.omega_kind == OmegaKind::SqrtMinusD) {
        for (Integer b = 0; b * b * F.D <= N; ++b) {
            Integer rest = N - b * b * F.D;
            Integer a = isqrt_floor(rest);
            if (a * a != rest)
                continue;
            for (const Integer &sa : {a, Integer(-a)})
                for (const Integer &sb : {b, Integer(-b)}) {
                    RingElement x{sa, sb};
                    if (contains(I, x))
                        return x;
                }
        }
        return std::nullopt;
    }
    // (2a + b)^2 + D b^2 = 4N
    for (Integer b = 0; b * b * F.D <= 4 * N; ++b) {
        Integer rest = 4 * N - b * b * F.D;
        Integer s = isqrt_floor(rest);
        if (s * s != rest)
            continue;
        for (const Integer &sb : {b, Integer(-b)})
            for (const Integer &ss : {s, Integer(-s)}) {
                Integer twice_a = ss - sb;
                if (!mpz_even_p(twice_a.get_mpz_t()))
                    continue;
                RingElement x{twice_a / 2, sb};
                if (contains(I, x))
                    return x;
            }
    }
    return std::nullopt;
}

std::string format_ideal(const FieldDescriptor &F, const IdealRep &I)
{
    if (I.generators.size() == 1)
        return "(" + format_element(I.generators[0]) + ")";
    if (auto g = find_generator(F, I))
        return "(" + format_element(*g) + ")";
    return "[" + I.a.get_str() + ", " + format_element(I.basis1()) + "]";
}

IdealRep parse_ideal(const FieldDescriptor &F, const std::string &text)
{
    std::vector<RingElement> gens;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
        gens.push_back(parse_element(item));
    if (gens.empty())
        throw ArithmeticError("empty ideal specification");
    bool all_zero = std::all_of(gens.begin(), gens.end(), [](const RingElement &x) { return x.is_zero(); });
    if (all_zero)
        throw ArithmeticError("the zero ideal is not allowed");
    return ideal_from_generators(F, gens);
}

std::vector<std::pair<std::int64_t, int>> factor_integer(std::int64_t n)
{
    if (n <= 0)
        throw ArithmeticError("factor_integer expects a positive integer");
    std::vector<std::pair<std::int64_t, int>> out;
    for (std::int64_t p = 2; p * p <= n; ++p) {
        int e = 0;
        while (n % p == 0) {
            n /= p;
            ++e;
        }
        if (e > 0)
            out.emplace_back(p, e);
    }
    if (n > 1)
        out.emplace_back(n, 1);
    return out;
}

std::vector<PrimeFactor> primes_above(const FieldDescriptor &F, std::int64_t p)
{
    // w is a root of x^2 - s1 x - s0.
    std::vector<std::int64_t> roots;
    for (std::int64_t r = 0; r < p; ++r) {
        __int128 v = (__int128)r * r - (__int128)F.omega_sq1 * r - F.omega_sq0;
        if (v % p == 0)
            roots.push_back(r);
    }
    std::vector<PrimeFactor> out;
    if (roots.empty()) {
        PrimeFactor f;
        f.prime = ideal_from_generators(F, {RingElement(p)});
        f.rational_prime = p;
        f.residue_degree = 2;
        out.push_back(f);
        return out;
    }
    for (std::int64_t r : roots) {
        PrimeFactor f;
        f.prime = ideal_from_generators(F, {RingElement(p), RingElement(-r, 1)});
        if (auto g = find_generator(F, f.prime))
            f.prime.generators = {*g};
        f.rational_prime = p;
        f.residue_degree = 1;
        out.push_back(f);
    }
    return out;
}

PrimeFactorization factor_ideal(const FieldDescriptor &F, const IdealRep &I)
{
    if (I.norm() == 0)
        throw ArithmeticError("cannot factor the zero ideal");
    PrimeFactorization out;
    std::int64_t N = I.norm().get_si();
    for (auto [p, e] : factor_integer(N)) {
        (void)e;
        for (PrimeFactor f : primes_above(F, p)) {
            IdealRep power = f.prime;
            int k = 0;
            while (ideal_contains(power, I)) {
                ++k;
                power = ideal_product(F, power, f.prime);
            }
            if (k > 0) {
                f.exponent = k;
                out.factors.push_back(f);
            }
        }
    }
    IdealRep check = multiply_out(F, out);
    if (!check.same_lattice(I))
        throw ArithmeticError("internal error: factorization does not multiply back to the ideal");
    return out;
}

IdealRep multiply_out(const FieldDescriptor &F, const PrimeFactorization &f)
{
    IdealRep acc = ideal_from_generators(F, {RingElement(1)});
    for (const PrimeFactor &pf : f.factors)
        for (int i = 0; i < pf.exponent; ++i)
            acc = ideal_product(F, acc, pf.prime);
    return acc;
}

namespace {

int jacobi(std::int64_t a, std::int64_t n)
{
    // n odd positive
    a %= n;
    if (a < 0)
        a += n;
    int result = 1;
    while (a != 0) {
        while (a % 2 == 0) {
            a /= 2;
            std::int64_t r = n % 8;
            if (r == 3 || r == 5)
                result = -result;
        }
        std::swap(a, n);
        if (a % 4 == 3 && n % 4 == 3)
            result = -result;
        a %= n;
    }
    return n == 1 ? result : 0;
}

} // namespace

int kronecker(std::int64_t d, std::int64_t n)
{
    if (n <= 0)
        throw ArithmeticError("kronecker symbol needs n >= 1");
    int result = 1;
    while (n % 2 == 0) {
        n /= 2;
        if (d % 2 == 0)
            return 0;
        std::int64_t r = ((d % 8) + 8) % 8;
        if (r == 3 || r == 5)
            result = -result;
    }
    if (n == 1)
        return result;
    return result * jacobi(d, n);
}

CovolumeResult covolume_truncated(const FieldDescriptor &F, std::int64_t terms)
{
    if (terms < 1)
        throw ArithmeticError("covolume needs at least one term");
    const std::int64_t period = -F.discriminant;
    std::vector<int> chi(period);
    for (std::int64_t r = 1; r <= period; ++r)
        chi[r % period] = kronecker(F.discriminant, r);

    // Kahan-compensated partial sum of chi(n)/n^2, smallest terms first.
    long double sum = 0, comp = 0;
    for (std::int64_t n = terms; n >= 1; --n) {
        int c = chi[n % period];
        if (c == 0)
            continue;
        long double nn = static_cast<long double>(n);
        long double y = c / (nn * nn) - comp;
        long double t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    const long double pi = std::numbers::pi_v<long double>;
    const long double scale = std::pow(static_cast<long double>(period), 1.5L) / (4 * pi * pi);
    const long double zeta2_rational = pi * pi / 6;

    // Window sums of chi are bounded by the period; Abel summation then gives
    // |sum_{n>N} chi(n)/n^2| <= period / N^2.
    long double tail = static_cast<long double>(period) / (static_cast<long double>(terms) * terms);
    long double rounding = 1e-16L * (1 + static_cast<long double>(terms) * 1e-3L);

    CovolumeResult out;
    out.terms = terms;
    out.zeta2 = static_cast<double>(zeta2_rational * sum);
    out.covolume = static_cast<double>(scale * zeta2_rational * sum);
    out.error_bound = static_cast<double>(scale * zeta2_rational * (tail + rounding) + 4e-16L * scale);
    return out;
}

CovolumeResult covolume(const FieldDescriptor &F, int precision)
{
    if (precision < 6 || precision > 15)
        throw ArithmeticError("precision must lie in [6, 15] decimal digits");
    const double period = static_cast<double>(-F.discriminant);
    const double scale = std::pow(period, 1.5) / (4 * std::numbers::pi * std::numbers::pi) *
                         (std::numbers::pi * std::numbers::pi / 6);
    const double target = std::pow(10.0, -precision);
    // scale * period / N^2 <= target / 2
    double n_needed = std::ceil(std::sqrt(2 * scale * period / target));
    constexpr double kMaxTerms = 4e8;
    std::int64_t terms = static_cast<std::int64_t>(std::min(n_needed, kMaxTerms));
    return covolume_truncated(F, std::max<std::int64_t>(terms, 16));
}

} // namespace bianchi
