#include "doctest.h"

#include <random>

#include "bianchi/congruence.hpp"

using namespace bianchi;

TEST_CASE("index formula against enumeration")
{
    auto F = make_field(1);
    CHECK(index_principal(F, parse_ideal(F, "1+w")) == 6);
    CHECK(index_principal(F, parse_ideal(F, "2")) == 48);
    CHECK(index_principal(F, parse_ideal(F, "3")) == 720);
    CHECK(enumerate_sl2_quotient(F, parse_ideal(F, "1+w")).size() == 6);
    CHECK(enumerate_sl2_quotient(F, parse_ideal(F, "2")).size() == 48);
    auto F2 = make_field(2);
    CHECK(enumerate_sl2_quotient(F2, parse_ideal(F2, "w")).size() == 6);
    CHECK_THROWS_AS(index_principal(F, parse_ideal(F, "1")), ArithmeticError);
    CHECK_THROWS_AS(enumerate_sl2_quotient(F, parse_ideal(F, "5")), ArithmeticError);

    for (long D : {1, 2, 3, 7, 11}) {
        auto G = make_field(D);
        for (const auto &I : enumerate_ideals(G, 16)) {
            if (I.is_unit_ideal())
                continue;
            CHECK(count_sl2_quotient(G, I) == index_principal(G, I));
            if (I.norm() <= 9)
                CHECK(Integer((unsigned long)enumerate_sl2_quotient(G, I).size()) == index_principal(G, I));
        }
    }
}

TEST_CASE("index multiplicativity on coprime ideals")
{
    for (long D : {1, 2, 3, 7, 11}) {
        auto F = make_field(D);
        auto ideals = enumerate_ideals(F, 30);
        for (const auto &I : ideals)
            for (const auto &J : ideals) {
                if (I.is_unit_ideal() || J.is_unit_ideal() || I.norm() * J.norm() > 400)
                    continue;
                if (!I.is_unit_ideal() && std::gcd(I.norm().get_si(), J.norm().get_si()) != 1)
                    continue;
                auto IJ = ideal_product(F, I, J);
                CHECK(index_principal(F, IJ) == index_principal(F, I) * index_principal(F, J));
            }
    }
}

TEST_CASE("quotient ring axioms")
{
    auto F = make_field(7);
    QuotientRing R(F, parse_ideal(F, "4,1+w"));
    std::uint32_t n = R.size();
    for (std::uint32_t x = 0; x < n; ++x) {
        CHECK(R.reduce(R.lift(x)) == x);
        for (std::uint32_t y = 0; y < n; ++y) {
            CHECK(R.mul(x, y) == R.mul(y, x));
            CHECK(R.add(R.sub(x, y), y) == x);
            CHECK(R.mul(x, y) == R.reduce(mul(F, R.lift(x), R.lift(y))));
        }
    }
}

TEST_CASE("cusp counts")
{
    auto F = make_field(1);
    auto c3 = cusp_count(principal_spec(F, parse_ideal(F, "3")));
    CHECK(c3.kappa == 20);
    CHECK(c3.agree);
    auto c5 = cusp_count(principal_spec(F, parse_ideal(F, "5")));
    CHECK(c5.kappa == 144);
    CHECK(c5.agree);
    auto c21 = cusp_count(principal_spec(F, parse_ideal(F, "2+w")));
    CHECK(c21.kappa == 6);
    CHECK(c21.formula_applicable);
    CHECK(cusp_count(principal_spec(F, parse_ideal(F, "2+w")), true).method == CuspMethod::Formula);

    auto F3 = make_field(3);
    auto small = cusp_count(principal_spec(F3, parse_ideal(F3, "2*w-1")));
    CHECK(!small.formula_applicable);
}

TEST_CASE("cusp formula and oracle on class number two")
{
    auto F = make_field(5);
    REQUIRE(bianchi_cusps(F).size() == 2);
    for (const auto &I : enumerate_ideals(F, 40)) {
        if (I.is_unit_ideal())
            continue;
        auto spec = principal_spec(F, I);
        auto r = cusp_count(spec);
        if (r.formula_applicable) {
            INFO(format_ideal(F, I));
            CHECK(r.agree);
        }
    }
}

TEST_CASE("general subgroups")
{
    auto F = make_field(1);
    auto p = parse_ideal(F, "2+w");
    // H trivial: same as the principal subgroup.
    auto triv = general_spec(F, p, {Mat2::identity()});
    CHECK(cusp_count(triv).kappa == 6);
    CHECK(CosetSpace(triv, false).index() == 120);
    // Gamma_0(p): image is the Borel subgroup of SL2(F_5).
    auto g0 = general_spec(F, p, {translation(1), translation(omega_element()), parse_mat2("2,1;5,3"), Mat2::minus_identity()});
    CosetSpace s0(g0, false);
    CHECK(s0.subgroup().size() == 20);
    CHECK(s0.index() == 6);
    CHECK(cusp_count(g0).kappa == 2);
    CHECK(torsion_free_check(g0).status == TorsionFreeStatus::Inconclusive);
    // Whole group.
    auto whole = general_spec(F, p, {translation(1), parse_mat2("1,0;1,1"), translation(omega_element()), parse_mat2("1,0;w,1")});
    CHECK(cusp_count(whole).kappa == 1);
    CHECK(CosetSpace(whole, true).index() == 1);
}

TEST_CASE("torsion-free criterion")
{
    auto F = make_field(1);
    CHECK(torsion_free_check(principal_spec(F, parse_ideal(F, "2+w"))).status == TorsionFreeStatus::CertifiedTorsionFree);
    CHECK(torsion_free_check(principal_spec(F, parse_ideal(F, "1+w"))).status == TorsionFreeStatus::Inconclusive);
    CHECK(torsion_free_check(principal_spec(F, parse_ideal(F, "3"))).status == TorsionFreeStatus::Inconclusive);
    auto triv = general_spec(F, parse_ideal(F, "2+w"), {Mat2::identity()});
    CHECK(torsion_free_check(triv).status == TorsionFreeStatus::CertifiedTorsionFree);
    auto triv3 = general_spec(F, parse_ideal(F, "3"), {Mat2::identity()});
    CHECK(torsion_free_check(triv3).status == TorsionFreeStatus::Inconclusive);
}

TEST_CASE("reduction kernel lands in the principal congruence subgroup")
{
    for (long D : {1, 2, 3, 7, 11}) {
        auto F = make_field(D);
        std::vector<Mat2> gens{translation(1), translation(omega_element()), parse_mat2("0,-1;1,0")};
        for (const auto &I : enumerate_ideals(F, 12)) {
            if (I.is_unit_ideal())
                continue;
            QuotientGroup G(F, I);
            std::mt19937 rng(17);
            int hits = 0;
            for (int trial = 0; trial < 3000; ++trial) {
                Mat2 x = Mat2::identity();
                int len = 1 + rng() % 12;
                for (int k = 0; k < len; ++k) {
                    const Mat2 &g = gens[rng() % gens.size()];
                    x = mul(F, x, rng() % 2 ? g : inverse_sl2(F, g));
                }
                bool in_level = contains(I, x.a - RingElement(1)) && contains(I, x.b) && contains(I, x.c) &&
                                contains(I, x.d - RingElement(1));
                bool trivial_image = G.reduce(x) == G.identity();
                CHECK(in_level == trivial_image);
                hits += trivial_image;
            }
            CHECK(hits > 0);
        }
    }
}
