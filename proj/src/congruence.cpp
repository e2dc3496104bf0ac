#include "bianchi/congruence.hpp"

#include <algorithm>
#include <deque>
#include <numeric>
#include <unordered_set>

namespace bianchi {

namespace {

std::int64_t mod_floor(__int128 x, std::int64_t m)
{
    __int128 r = x % m;
    if (r < 0)
        r += m;
    return static_cast<std::int64_t>(r);
}

std::int64_t to_int64(const Integer &x)
{
    if (!x.fits_slong_p())
        throw ArithmeticError("integer out of 64-bit range: " + x.get_str());
    return x.get_si();
}

} // namespace

QuotientRing::QuotientRing(const FieldDescriptor &F, const IdealRep &modulus) : F_(F), modulus_(modulus)
{
    if (modulus.is_unit_ideal())
        throw ArithmeticError("the level must be a proper ideal, got the unit ideal");
    if (modulus.a == 0)
        throw ArithmeticError("the level must be a nonzero ideal");
    if (modulus.norm() > kMaxQuotientNorm)
        throw ArithmeticError("N(a) = " + modulus.norm().get_str() + " exceeds the supported bound " +
                              std::to_string(kMaxQuotientNorm));
    a_ = to_int64(modulus.a);
    b_ = to_int64(modulus.b);
    c_ = to_int64(modulus.c);
}

QuotientRing::Residue QuotientRing::reduce(std::int64_t x0, std::int64_t x1) const
{
    std::int64_t s1 = mod_floor(x1, c_);
    __int128 q = (static_cast<__int128>(x1) - s1) / c_;
    std::int64_t s0 = mod_floor(static_cast<__int128>(x0) - q * b_, a_);
    return static_cast<Residue>(s0 + a_ * s1);
}

QuotientRing::Residue QuotientRing::reduce(const RingElement &x) const
{
    Integer s1 = x.b % modulus_.c;
    if (s1 < 0)
        s1 += modulus_.c;
    Integer q = (x.b - s1) / modulus_.c;
    Integer s0 = (x.a - q * modulus_.b) % modulus_.a;
    if (s0 < 0)
        s0 += modulus_.a;
    return static_cast<Residue>(s0.get_si() + a_ * s1.get_si());
}

RingElement QuotientRing::lift(Residue r) const { return {Integer(static_cast<long>(r0(r))), Integer(static_cast<long>(r1(r)))}; }

QuotientRing::Residue QuotientRing::add(Residue x, Residue y) const { return reduce(r0(x) + r0(y), r1(x) + r1(y)); }

QuotientRing::Residue QuotientRing::sub(Residue x, Residue y) const { return reduce(r0(x) - r0(y), r1(x) - r1(y)); }

QuotientRing::Residue QuotientRing::neg(Residue x) const { return reduce(-r0(x), -r1(x)); }

QuotientRing::Residue QuotientRing::mul(Residue x, Residue y) const
{
    std::int64_t x0 = r0(x), x1 = r1(x), y0 = r0(y), y1 = r1(y);
    std::int64_t t = x1 * y1;
    return reduce(x0 * y0 + F_.omega_sq0 * t, x0 * y1 + x1 * y0 + F_.omega_sq1 * t);
}

QuotientGroup::QuotientGroup(const FieldDescriptor &F, const IdealRep &modulus) : R_(F, modulus) {}

MatMod QuotientGroup::identity() const { return {{R_.one(), 0, 0, R_.one()}}; }

MatMod QuotientGroup::minus_identity() const { return {{R_.neg(R_.one()), 0, 0, R_.neg(R_.one())}}; }

MatMod QuotientGroup::mul(const MatMod &x, const MatMod &y) const
{
    const auto &R = R_;
    return {{R.add(R.mul(x.e[0], y.e[0]), R.mul(x.e[1], y.e[2])), R.add(R.mul(x.e[0], y.e[1]), R.mul(x.e[1], y.e[3])),
             R.add(R.mul(x.e[2], y.e[0]), R.mul(x.e[3], y.e[2])), R.add(R.mul(x.e[2], y.e[1]), R.mul(x.e[3], y.e[3]))}};
}

MatMod QuotientGroup::inverse(const MatMod &x) const { return {{x.e[3], R_.neg(x.e[1]), R_.neg(x.e[2]), x.e[0]}}; }

MatMod QuotientGroup::negate(const MatMod &x) const
{
    return {{R_.neg(x.e[0]), R_.neg(x.e[1]), R_.neg(x.e[2]), R_.neg(x.e[3])}};
}

MatMod QuotientGroup::reduce(const Mat2 &x) const
{
    return {{R_.reduce(x.a), R_.reduce(x.b), R_.reduce(x.c), R_.reduce(x.d)}};
}

QuotientRing::Residue QuotientGroup::det(const MatMod &x) const
{
    return R_.sub(R_.mul(x.e[0], x.e[3]), R_.mul(x.e[1], x.e[2]));
}

QuotientRing::Residue QuotientGroup::trace(const MatMod &x) const { return R_.add(x.e[0], x.e[3]); }

std::vector<MatMod> QuotientGroup::elementary_generators() const
{
    auto one = R_.one();
    auto w = R_.reduce(0, 1);
    return {{{one, one, 0, one}}, {{one, w, 0, one}}, {{one, 0, one, one}}, {{one, 0, w, one}}};
}

Integer index_principal(const FieldDescriptor &F, const IdealRep &level)
{
    if (level.is_unit_ideal())
        throw ArithmeticError("index_principal: the unit ideal is rejected");
    if (level.a == 0)
        throw ArithmeticError("index_principal: the zero ideal is rejected");
    Integer result = 1;
    for (const auto &f : factor_ideal(F, level).factors) {
        Integer q = f.prime.norm();
        Integer qpow;
        mpz_pow_ui(qpow.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(3 * f.exponent - 2));
        result *= qpow * (q * q - 1);
    }
    return result;
}

std::vector<MatMod> enumerate_sl2_quotient(const FieldDescriptor &F, const IdealRep &level)
{
    if (level.norm() > kEnumerationCap)
        throw ArithmeticError("enumerate_sl2_quotient: N(a) = " + level.norm().get_str() +
                              " is above the enumeration cap " + std::to_string(kEnumerationCap));
    QuotientGroup G(F, level);
    const auto &R = G.ring();
    std::uint32_t n = R.size();
    std::vector<MatMod> out;
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t b = 0; b < n; ++b)
            for (std::uint32_t c = 0; c < n; ++c)
                for (std::uint32_t d = 0; d < n; ++d) {
                    MatMod x{{a, b, c, d}};
                    if (G.det(x) == R.one())
                        out.push_back(x);
                }
    return out;
}

Integer count_sl2_quotient(const FieldDescriptor &F, const IdealRep &level)
{
    if (level.norm() > 4096)
        throw ArithmeticError("count_sl2_quotient: N(a) too large for the quadratic-time count");
    QuotientRing R(F, level);
    std::uint32_t n = R.size();
    std::vector<std::uint64_t> products(n, 0);
    for (std::uint32_t b = 0; b < n; ++b)
        for (std::uint32_t c = 0; c < n; ++c)
            ++products[R.mul(b, c)];
    Integer total = 0;
    std::uint64_t acc = 0;
    for (std::uint32_t a = 0; a < n; ++a)
        for (std::uint32_t d = 0; d < n; ++d)
            acc += products[R.sub(R.mul(a, d), R.one())];
    mpz_set_ui(total.get_mpz_t(), acc);
    return total;
}

SubgroupSpec principal_spec(const FieldDescriptor &F, const IdealRep &level)
{
    SubgroupSpec s;
    s.field = F;
    s.level = level;
    s.kind = SubgroupKind::Principal;
    return s;
}

SubgroupSpec general_spec(const FieldDescriptor &F, const IdealRep &level, std::vector<Mat2> generators)
{
    SubgroupSpec s;
    s.field = F;
    s.level = level;
    s.kind = SubgroupKind::General;
    for (const auto &g : generators)
        if (det(F, g) != RingElement(1))
            throw ArithmeticError("subgroup generator " + format_mat2(g) + " does not have determinant 1");
    s.generators = std::move(generators);
    return s;
}

std::vector<MatMod> subgroup_closure(const QuotientGroup &G, const std::vector<MatMod> &gens)
{
    std::vector<MatMod> elements{G.identity()};
    std::unordered_set<std::uint64_t> seen{G.identity().key()};
    for (std::size_t i = 0; i < elements.size(); ++i) {
        for (const auto &g : gens) {
            MatMod y = G.mul(elements[i], g);
            if (seen.insert(y.key()).second)
                elements.push_back(y);
        }
    }
    return elements;
}

CosetSpace::CosetSpace(const SubgroupSpec &spec, bool projective)
    : G_(spec.field, spec.level), projective_(projective), principal_(spec.kind == SubgroupKind::Principal)
{
    if (principal_) {
        elements_ = {G_.identity()};
    } else {
        std::vector<MatMod> gens;
        for (const auto &g : spec.generators)
            gens.push_back(G_.reduce(g));
        elements_ = subgroup_closure(G_, gens);
    }
    for (std::uint32_t i = 0; i < elements_.size(); ++i)
        lookup_.emplace(elements_[i].key(), i);
}

bool CosetSpace::subgroup_contains(const MatMod &x) const { return lookup_.count(x.key()) > 0; }

bool CosetSpace::contains_minus_identity() const { return subgroup_contains(G_.minus_identity()); }

MatMod CosetSpace::canonical(const MatMod &x) const
{
    MatMod best = x;
    bool first = true;
    for (const auto &h : elements_) {
        MatMod y = principal_ ? x : G_.mul(h, x);
        if (first || y.key() < best.key())
            best = y;
        first = false;
        if (projective_) {
            MatMod z = G_.negate(y);
            if (z.key() < best.key())
                best = z;
        }
        if (principal_)
            break;
    }
    return best;
}

Integer CosetSpace::index() const
{
    Integer order = index_principal(G_.ring().field(), G_.ring().modulus());
    Integer h = static_cast<unsigned long>(elements_.size());
    if (projective_ && !contains_minus_identity())
        h *= 2;
    return order / h;
}

namespace {

Mat2 diag(const FieldDescriptor &F, const RingElement &e)
{
    RingElement inv = conj(F, e); // units have norm 1
    return {e, RingElement(0), RingElement(0), inv};
}

void check_peripheral(const FieldDescriptor &F, const BianchiCusp &c, const Mat2 &P)
{
    if (det(F, P) != RingElement(1))
        throw ArithmeticError("peripheral generator " + format_mat2(P) + " is not unimodular");
    RingElement x = mul(F, P.a, c.alpha) + mul(F, P.b, c.beta);
    RingElement y = mul(F, P.c, c.alpha) + mul(F, P.d, c.beta);
    // P fixes the line through (alpha, beta) up to sign.
    bool plus = x == c.alpha && y == c.beta;
    bool minus = x == -c.alpha && y == -c.beta;
    if (!plus && !minus)
        throw ArithmeticError("peripheral generator " + format_mat2(P) + " does not fix the cusp");
}

} // namespace

std::vector<BianchiCusp> bianchi_cusps(const FieldDescriptor &F)
{
    std::vector<BianchiCusp> out;
    {
        BianchiCusp inf;
        inf.ideal = ideal_from_generators(F, {RingElement(1)});
        inf.translations = {translation(RingElement(1)), translation(omega_element())};
        inf.translation_lattice = {RingElement(1), omega_element()};
        if (F.D == 1 || F.D == 3)
            inf.unit_generators = {diag(F, omega_element())};
        else
            inf.unit_generators = {Mat2::minus_identity()};
        inf.b_inverse_numerator = Mat2::identity();
        out.push_back(inf);
    }
    // Non-principal reduced forms (A, B, C), A > 1, give ideals [A, (-B + sqrt(delta)) / 2].
    std::int64_t disc = F.discriminant;
    for (std::int64_t A = 2; 3 * A * A <= -disc; ++A) {
        for (std::int64_t B = -A + 1; B <= A; ++B) {
            std::int64_t num = B * B - disc;
            if (num % (4 * A) != 0)
                continue;
            std::int64_t C = num / (4 * A);
            if (C < A || (C == A && B < 0) || std::gcd(std::gcd(A, std::abs(B)), C) != 1)
                continue;
            BianchiCusp cusp;
            cusp.alpha = RingElement(A);
            if (F.omega_kind == OmegaKind::SqrtMinusD)
                cusp.beta = RingElement(Integer(-B / 2), Integer(1));
            else
                cusp.beta = RingElement(Integer((-B - 1) / 2), Integer(1));
            cusp.ideal = ideal_from_generators(F, {cusp.alpha, cusp.beta});
            if (cusp.ideal.norm() != A)
                throw ArithmeticError("class representative of norm " + cusp.ideal.norm().get_str() +
                                      " does not match its form");
            const RingElement &a = cusp.alpha;
            const RingElement &b = cusp.beta;
            cusp.b_inverse_numerator = {mul(F, a, a), RingElement(0), mul(F, a, b), RingElement(1)};
            cusp.b_inverse_denominator = A;
            IdealRep cb = ideal_conjugate(F, cusp.ideal);
            IdealRep cb2 = ideal_product(F, cb, cb);
            Integer den = Integer(A) * A;
            cusp.translation_denominator = den;
            for (const RingElement &z : {cb2.basis0(), cb2.basis1()}) {
                auto bz = exact_div(F, mul(F, b, z), a);
                auto bbz = exact_div(F, mul(F, mul(F, b, b), z), RingElement(Integer(den), Integer(0)));
                if (!bz || !bbz)
                    throw ArithmeticError("translation lattice is not integral at a non-principal cusp");
                Mat2 P{RingElement(1) - *bz, z, -*bbz, RingElement(1) + *bz};
                check_peripheral(F, cusp, P);
                cusp.translations.push_back(P);
                cusp.translation_lattice.push_back(z);
            }
            cusp.unit_generators = {Mat2::minus_identity()};
            out.push_back(cusp);
        }
    }
    if (static_cast<std::int64_t>(out.size()) != F.class_number)
        throw ArithmeticError("cusp count of Gamma(D) disagrees with the class number");
    return out;
}

bool cusp_formula_applicable(const SubgroupSpec &spec, std::string *why)
{
    auto say = [&](const std::string &s) {
        if (why)
            *why = s;
        return false;
    };
    if (spec.kind != SubgroupKind::Principal)
        return say("formula covers principal levels only");
    if (contains(spec.level, RingElement(-4)))
        return say("-4 lies in the level");
    for (const auto &e : units(spec.field)) {
        if (e == RingElement(1))
            continue;
        if (contains(spec.level, e - RingElement(1)))
            return say("unit " + format_element(e) + " is congruent to 1 modulo the level");
    }
    if (why)
        why->clear();
    return true;
}

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;
    explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0u); }
    std::uint32_t find(std::uint32_t x)
    {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    bool unite(std::uint32_t x, std::uint32_t y)
    {
        x = find(x);
        y = find(y);
        if (x == y)
            return false;
        parent[std::max(x, y)] = std::min(x, y);
        return true;
    }
};

} // namespace

CuspReport cusp_count(const SubgroupSpec &spec, bool prefer_formula)
{
    const auto &F = spec.field;
    CuspReport report;
    report.formula_applicable = cusp_formula_applicable(spec, &report.formula_note);

    Integer order = index_principal(F, spec.level);
    if (spec.kind == SubgroupKind::Principal) {
        Integer num = order * F.class_number;
        Integer den = spec.level.norm() * F.unit_count;
        if (num % den == 0)
            report.formula_value = num / den;
        else if (report.formula_note.empty())
            report.formula_note = "formula value is not an integer";
        else
            report.formula_note += "; formula value " + num.get_str() + "/" + den.get_str() + " is not an integer";
        if (!report.formula_value)
            report.formula_applicable = false;
    }
    if (prefer_formula && report.formula_applicable) {
        report.method = CuspMethod::Formula;
        report.kappa = *report.formula_value;
        return report;
    }

    QuotientGroup G(F, spec.level);
    auto cusps = bianchi_cusps(F);
    report.method = CuspMethod::OrbitOracle;
    report.kappa = 0;

    if (spec.kind == SubgroupKind::Principal) {
        Integer group_order = spec.level.norm() <= 4096 ? count_sl2_quotient(F, spec.level) : order;
        for (const auto &c : cusps) {
            std::vector<MatMod> gens;
            for (const auto &P : c.translations)
                gens.push_back(G.reduce(P));
            for (const auto &U : c.unit_generators)
                gens.push_back(G.reduce(U));
            gens.push_back(G.minus_identity());
            Integer stab = static_cast<unsigned long>(subgroup_closure(G, gens).size());
            report.stabilizer_orders.push_back(stab);
            if (group_order % stab != 0)
                throw ArithmeticError("stabilizer order does not divide |G|");
            report.cusps_per_class.push_back(group_order / stab);
            report.kappa += group_order / stab;
        }
    } else {
        CosetSpace space(spec, false);
        std::vector<MatMod> reps{space.canonical(G.identity())};
        std::unordered_map<std::uint64_t, std::uint32_t> index_of{{reps[0].key(), 0}};
        auto gens = G.elementary_generators();
        for (std::size_t i = 0; i < reps.size(); ++i)
            for (const auto &g : gens) {
                MatMod y = space.canonical(G.mul(reps[i], g));
                if (index_of.emplace(y.key(), reps.size()).second)
                    reps.push_back(y);
            }
        if (Integer(static_cast<unsigned long>(reps.size())) != space.index())
            throw ArithmeticError("coset enumeration does not reach every coset");
        for (const auto &c : cusps) {
            std::vector<MatMod> gens_p;
            for (const auto &P : c.translations)
                gens_p.push_back(G.reduce(P));
            for (const auto &U : c.unit_generators)
                gens_p.push_back(G.reduce(U));
            gens_p.push_back(G.minus_identity());
            report.stabilizer_orders.push_back(static_cast<unsigned long>(subgroup_closure(G, gens_p).size()));
            UnionFind uf(reps.size());
            std::size_t orbits = reps.size();
            for (std::size_t i = 0; i < reps.size(); ++i)
                for (const auto &p : gens_p) {
                    auto j = index_of.at(space.canonical(G.mul(reps[i], p)).key());
                    if (uf.unite(static_cast<std::uint32_t>(i), j))
                        --orbits;
                }
            report.cusps_per_class.push_back(static_cast<unsigned long>(orbits));
            report.kappa += static_cast<unsigned long>(orbits);
        }
    }
    if (report.formula_applicable)
        report.agree = *report.formula_value == report.kappa;
    return report;
}

TorsionFreeReport torsion_free_check(const SubgroupSpec &spec)
{
    TorsionFreeReport r;
    if (spec.kind == SubgroupKind::Principal) {
        for (long t : {-4, -3, -2, -1}) {
            if (contains(spec.level, RingElement(t))) {
                r.reason = std::to_string(t) + " lies in the level";
                return r;
            }
        }
        r.status = TorsionFreeStatus::CertifiedTorsionFree;
        r.reason = "2 and 3 are not in the level";
        return r;
    }
    CosetSpace space(spec, false);
    const auto &G = space.group();
    const auto &R = G.ring();
    if (space.contains_minus_identity()) {
        r.reason = "-I lies in the image subgroup";
        return r;
    }
    for (const auto &h : space.subgroup()) {
        auto t = G.trace(h);
        for (long v : {-1, 0, 1}) {
            if (t == R.reduce(v, 0)) {
                r.reason = "an element of the image subgroup has trace " + std::to_string(v) + " modulo the level";
                return r;
            }
        }
    }
    r.status = TorsionFreeStatus::CertifiedTorsionFree;
    r.reason = "no element of the image subgroup has the trace of a torsion element";
    return r;
}

std::string format_matmod(const QuotientRing &R, const MatMod &x)
{
    return format_mat2({R.lift(x.e[0]), R.lift(x.e[1]), R.lift(x.e[2]), R.lift(x.e[3])});
}

} // namespace bianchi
