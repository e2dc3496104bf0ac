#include "doctest.h"

#include <complex>
#include <random>

#include "bianchi/symreps.hpp"

using namespace bianchi;

namespace {

Mat2 random_element(const FieldDescriptor &F, std::mt19937 &rng, int len)
{
    std::vector<Mat2> gens{translation(1), translation(omega_element()), parse_mat2("0,-1;1,0")};
    Mat2 x = Mat2::identity();
    for (int k = 0; k < len; ++k) {
        const Mat2 &g = gens[rng() % gens.size()];
        x = mul(F, x, rng() % 2 ? g : inverse_sl2(F, g));
    }
    return x;
}

std::vector<Integer> random_vector(std::mt19937 &rng, std::size_t n)
{
    std::vector<Integer> v(n);
    for (auto &x : v)
        x = static_cast<long>(rng() % 21) - 10;
    return v;
}

Integer dot(const std::vector<Integer> &a, const std::vector<Integer> &b)
{
    Integer s = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        s += a[i] * b[i];
    return s;
}

std::vector<Integer> apply_matrix(const IntMatrix &M, const std::vector<Integer> &v)
{
    return row_times(v, M.transpose());
}

// Determinant over O_D by fraction-free elimination.
RingElement det_over_o(const FieldDescriptor &F, std::vector<RingElement> M, std::size_t n)
{
    RingElement prev(1), sign(1);
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (M[k * n + k].is_zero()) {
            std::size_t r = k + 1;
            while (r < n && M[r * n + k].is_zero())
                ++r;
            if (r == n)
                return RingElement(0);
            for (std::size_t j = 0; j < n; ++j)
                std::swap(M[k * n + j], M[r * n + j]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                auto num = mul(F, M[i * n + j], M[k * n + k]) - mul(F, M[i * n + k], M[k * n + j]);
                M[i * n + j] = *exact_div(F, num, prev);
            }
        prev = M[k * n + k];
    }
    return mul(F, sign, M[n * n - 1]);
}

} // namespace

TEST_CASE("unipotent example at m = 1")
{
    auto F = make_field(1);
    auto r = rho_matrix(F, translation(1), 1);
    std::vector<long> expected{1, 1, 1, 0, 1, 2, 0, 0, 1};
    for (std::size_t k = 0; k < 9; ++k)
        CHECK(r.complex_model[k] == RingElement(expected[k]));
    CHECK(dual_matrix(F, translation(1), 1) == rho_matrix(F, translation(-1), 1).integral_model.transpose());
}

TEST_CASE("plus and minus identity act trivially")
{
    for (long D : {1, 2, 3, 7, 11})
        for (int m = 0; m <= 5; ++m) {
            auto F = make_field(D);
            auto n = coefficient_rank(Coefficients::L, m);
            CHECK(rho_matrix(F, Mat2::identity(), m).integral_model == IntMatrix::identity(n));
            CHECK(rho_matrix(F, Mat2::minus_identity(), m).integral_model == IntMatrix::identity(n));
            CHECK(dual_matrix(F, Mat2::minus_identity(), m) == IntMatrix::identity(n));
        }
    auto F = make_field(1);
    CHECK_THROWS_AS(rho_matrix(F, parse_mat2("2,0;0,1"), 1), ArithmeticError);
}

TEST_CASE("complex model agrees with numerical symmetric powers")
{
    std::mt19937 rng(5);
    for (long D : {1, 2, 3, 7}) {
        auto F = make_field(D);
        for (int trial = 0; trial < 20; ++trial) {
            Mat2 g = random_element(F, rng, 6);
            int m = 1 + trial % 3;
            std::size_t n = 2 * m + 1;
            auto M = complex_model(F, g, m);
            std::complex<double> x(0.3, -0.7), y(1.1, 0.4);
            auto ga = to_complex(F, g.a), gb = to_complex(F, g.b), gc = to_complex(F, g.c), gd = to_complex(F, g.d);
            std::complex<double> gx = ga * x + gb * y, gy = gc * x + gd * y;
            double scale = 1;
            for (std::size_t j = 0; j < n; ++j) {
                auto binom = [&](int N, int k) {
                    double b = 1;
                    for (int i = 1; i <= k; ++i)
                        b = b * (N - k + i) / i;
                    return b;
                };
                std::complex<double> lhs = 0;
                for (std::size_t i = 0; i < n; ++i)
                    lhs += to_complex(F, M[j * n + i]) * binom(2 * m, (int)i) * std::pow(x, 2 * m - (int)i) * std::pow(y, (int)i);
                std::complex<double> rhs = binom(2 * m, (int)j) * std::pow(gx, 2 * m - (int)j) * std::pow(gy, (int)j);
                scale = std::max(scale, std::abs(rhs));
                CHECK(std::abs(lhs - rhs) < 1e-8 * scale);
            }
        }
    }
}

TEST_CASE("homomorphism, determinant and integrality")
{
    std::mt19937 rng(11);
    int pairs = 0;
    for (long D : {1, 2, 3, 7, 11}) {
        auto F = make_field(D);
        for (int trial = 0; trial < 200; ++trial) {
            int m = 1 + trial % 5;
            Mat2 g = random_element(F, rng, 1 + rng() % 5);
            Mat2 h = random_element(F, rng, 1 + rng() % 5);
            auto rg = rho_matrix(F, g, m).integral_model;
            auto rh = rho_matrix(F, h, m).integral_model;
            CHECK(rg * rh == rho_matrix(F, mul(F, g, h), m).integral_model);
            auto Ag = right_action(F, g, m, Coefficients::Lbar);
            auto Ah = right_action(F, h, m, Coefficients::Lbar);
            CHECK(Ag * Ah == right_action(F, mul(F, g, h), m, Coefficients::Lbar));
            ++pairs;
            if (trial < 20) {
                std::size_t n = 2 * m + 1;
                CHECK(det_over_o(F, rho_matrix(F, g, m).complex_model, n) == RingElement(1));
            }
        }
    }
    CHECK(pairs == 1000);
}

TEST_CASE("dual pairing and traces")
{
    std::mt19937 rng(23);
    for (int trial = 0; trial < 100; ++trial) {
        long D = std::vector<long>{1, 2, 3, 7, 11}[trial % 5];
        auto F = make_field(D);
        int m = 1 + trial % 4;
        Mat2 g = random_element(F, rng, 1 + rng() % 6);
        auto rho = rho_matrix(F, g, m).integral_model;
        auto dual = dual_matrix(F, g, m);
        auto v = random_vector(rng, rho.rows);
        auto phi = random_vector(rng, rho.rows);
        CHECK(dot(apply_matrix(dual, phi), apply_matrix(rho, v)) == dot(phi, v));
        CHECK(rho.trace() == dual.trace());
        auto bar = lbar_matrix(F, g, m);
        for (std::size_t i = 0; i < rho.rows; ++i)
            for (std::size_t j = 0; j < rho.rows; ++j) {
                CHECK(bar(i, rho.rows + j) == 0);
                CHECK(bar(rho.rows + i, j) == 0);
            }
    }
}

TEST_CASE("invariant vectors")
{
    for (long D : {1, 2, 3, 5, 6, 7, 11, 15}) {
        auto F = make_field(D);
        auto cusps = bianchi_cusps(F);
        for (int m = 1; m <= 4; ++m)
            for (std::size_t j = 0; j < cusps.size(); ++j) {
                auto iv = invariant_vectors(F, cusps[j], j, m);
                if (j == 0) {
                    CHECK(iv.omega[0] == 1);
                    CHECK(iv.clearing_scalar == 1);
                    for (std::size_t k = 1; k < iv.omega.size(); ++k)
                        CHECK(iv.omega[k] == 0);
                    CHECK(iv.omega_prime[2 * m + 1] == 1);
                }
                // omega and omega' are independent.
                bool independent = false;
                for (std::size_t a = 0; a < iv.omega.size(); ++a)
                    for (std::size_t b = 0; b < iv.omega.size(); ++b)
                        if (iv.omega[a] * iv.omega_prime[b] != iv.omega[b] * iv.omega_prime[a])
                            independent = true;
                CHECK(independent);
            }
    }
}
