#include "bianchi/symreps.hpp"

namespace bianchi {

std::string coefficients_name(Coefficients c)
{
    switch (c) {
    case Coefficients::L:
        return "L";
    case Coefficients::Ldual:
        return "Ldual";
    case Coefficients::Lbar:
        return "Lbar";
    case Coefficients::Trivial:
        return "Z";
    }
    return "?";
}

Coefficients parse_coefficients(const std::string &name)
{
    if (name == "L")
        return Coefficients::L;
    if (name == "Ldual" || name == "L*")
        return Coefficients::Ldual;
    if (name == "Lbar")
        return Coefficients::Lbar;
    if (name == "Z" || name == "trivial")
        return Coefficients::Trivial;
    throw ArithmeticError("unknown coefficient system '" + name + "' (expected L, Ldual, Lbar or Z)");
}

std::size_t coefficient_rank(Coefficients c, int m)
{
    std::size_t n = 2 * (2 * static_cast<std::size_t>(m) + 1);
    switch (c) {
    case Coefficients::L:
    case Coefficients::Ldual:
        return n;
    case Coefficients::Lbar:
        return 2 * n;
    case Coefficients::Trivial:
        return 1;
    }
    return 0;
}

namespace {

using Poly = std::vector<RingElement>; // coefficient of e1^{deg-j} e2^j at j

Poly poly_mul(const FieldDescriptor &F, const Poly &p, const Poly &q)
{
    Poly out(p.size() + q.size() - 1, RingElement(0));
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (p[i].is_zero())
            continue;
        for (std::size_t j = 0; j < q.size(); ++j)
            if (!q[j].is_zero())
                out[i + j] = out[i + j] + mul(F, p[i], q[j]);
    }
    return out;
}

void require_unimodular(const FieldDescriptor &F, const Mat2 &g)
{
    if (det(F, g) != RingElement(1))
        throw ArithmeticError("rho(m) needs det g = 1, got det " + format_element(det(F, g)) + " for " +
                              format_mat2(g));
}

} // namespace

std::vector<RingElement> complex_model(const FieldDescriptor &F, const Mat2 &g, int m)
{
    if (m < 0)
        throw ArithmeticError("weight m must be non-negative");
    std::size_t n = 2 * static_cast<std::size_t>(m) + 1;
    Poly p{g.a, g.c};
    Poly q{g.b, g.d};
    std::vector<Poly> ppow(n), qpow(n);
    ppow[0] = qpow[0] = Poly{RingElement(1)};
    for (std::size_t k = 1; k < n; ++k) {
        ppow[k] = poly_mul(F, ppow[k - 1], p);
        qpow[k] = poly_mul(F, qpow[k - 1], q);
    }
    std::vector<RingElement> M(n * n, RingElement(0));
    for (std::size_t i = 0; i < n; ++i) {
        Poly col = poly_mul(F, ppow[n - 1 - i], qpow[i]);
        for (std::size_t j = 0; j < n; ++j)
            M[j * n + i] = col[j];
    }
    return M;
}

IntMatrix realify(const FieldDescriptor &F, const std::vector<RingElement> &M, std::size_t n)
{
    IntMatrix R(2 * n, 2 * n);
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = 0; i < n; ++i) {
            const auto &x = M[j * n + i].a;
            const auto &y = M[j * n + i].b;
            R(j, i) = x;
            R(n + j, i) = y;
            // alpha * w = y*s0 + (x + y*s1) w
            R(j, n + i) = y * F.omega_sq0;
            R(n + j, n + i) = x + y * F.omega_sq1;
        }
    return R;
}

RepMatrix rho_matrix(const FieldDescriptor &F, const Mat2 &g, int m)
{
    require_unimodular(F, g);
    RepMatrix r;
    r.m = m;
    r.g = g;
    r.complex_model = complex_model(F, g, m);
    r.integral_model = realify(F, r.complex_model, 2 * static_cast<std::size_t>(m) + 1);
    return r;
}

IntMatrix dual_matrix(const FieldDescriptor &F, const Mat2 &g, int m)
{
    require_unimodular(F, g);
    return rho_matrix(F, inverse_sl2(F, g), m).integral_model.transpose();
}

IntMatrix lbar_matrix(const FieldDescriptor &F, const Mat2 &g, int m)
{
    return block_sum(rho_matrix(F, g, m).integral_model, dual_matrix(F, g, m));
}

IntMatrix right_action(const FieldDescriptor &F, const Mat2 &g, int m, Coefficients c)
{
    require_unimodular(F, g);
    switch (c) {
    case Coefficients::L:
        return dual_matrix(F, g, m);
    case Coefficients::Ldual:
        return rho_matrix(F, g, m).integral_model;
    case Coefficients::Lbar:
        return block_sum(dual_matrix(F, g, m), rho_matrix(F, g, m).integral_model);
    case Coefficients::Trivial:
        return IntMatrix::identity(1);
    }
    return {};
}

InvariantVector invariant_vectors(const FieldDescriptor &F, const BianchiCusp &cusp, std::size_t index, int m)
{
    std::size_t n = 2 * static_cast<std::size_t>(m) + 1;
    // rho(B^-1) e1^{2m} is the first column of the complex model of the numerator,
    // divided by den^{2m}.
    auto M = complex_model(F, cusp.b_inverse_numerator, m);
    Integer den_pow;
    mpz_pow_ui(den_pow.get_mpz_t(), cusp.b_inverse_denominator.get_mpz_t(), static_cast<unsigned long>(2 * m));
    Integer content = 0;
    for (std::size_t j = 0; j < n; ++j) {
        mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), M[j * n].a.get_mpz_t());
        mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), M[j * n].b.get_mpz_t());
    }
    Integer g;
    mpz_gcd(g.get_mpz_t(), den_pow.get_mpz_t(), content.get_mpz_t());
    // vector = M e / den^{2m}; the least positive s with s * vector integral is den^{2m} / g.
    InvariantVector out;
    out.cusp = index;
    out.clearing_scalar = den_pow / g;
    std::vector<RingElement> col(n);
    for (std::size_t j = 0; j < n; ++j)
        col[j] = {M[j * n].a / g, M[j * n].b / g};
    out.omega.assign(2 * n, 0);
    out.omega_prime.assign(2 * n, 0);
    for (std::size_t j = 0; j < n; ++j) {
        out.omega[j] = col[j].a;
        out.omega[n + j] = col[j].b;
        RingElement wc = mul(F, col[j], omega_element());
        out.omega_prime[j] = wc.a;
        out.omega_prime[n + j] = wc.b;
    }
    std::vector<Mat2> fixers = cusp.translations;
    fixers.push_back(Mat2::minus_identity());
    for (const auto &P : fixers) {
        const auto rho = rho_matrix(F, P, m).integral_model;
        for (const auto *v : {&out.omega, &out.omega_prime}) {
            IntMatrix col_v(2 * n, 1);
            for (std::size_t j = 0; j < 2 * n; ++j)
                col_v(j, 0) = (*v)[j];
            if (!(rho * col_v == col_v))
                throw ArithmeticError("invariant vector is not fixed by " + format_mat2(P) +
                                      "; the cusp normalisation is inconsistent");
        }
    }
    return out;
}

} // namespace bianchi
