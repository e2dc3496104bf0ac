#include "doctest.h"

#include "bianchi/homology.hpp"

using namespace bianchi;

namespace {

GroupRingElement term(Word w, long c) { return {{std::move(w), c}}; }

HomologyInstance instance(long D, const std::string &level)
{
    auto F = make_field(D);
    return prepare_instance(principal_spec(F, parse_ideal(F, level)));
}

HomologyOptions with_engine(HomologyEngine e)
{
    HomologyOptions o;
    o.engine = e;
    return o;
}

std::vector<Integer> merged(std::vector<Integer> a, const std::vector<Integer> &b)
{
    a.insert(a.end(), b.begin(), b.end());
    return a;
}

} // namespace

TEST_CASE("Fox derivatives")
{
    CHECK(fox_derivative({1, 2}, 0) == term({}, 1));
    CHECK(fox_derivative({1, 2}, 1) == term({1}, 1));
    CHECK(fox_derivative({-1}, 0) == term({-1}, -1));
    CHECK(fox_derivative({1, 2, -1, -2}, 0) == normalize({{{}, 1}, {{1, 2, -1}, -1}}));
    CHECK(fox_derivative({1, 1, 1}, 0) == normalize({{{}, 1}, {{1}, 1}, {{1, 1}, 1}}));
    CHECK(fox_derivative({2, 2}, 0).empty());
    // The augmentation of dw/dx is the exponent sum of x in w.
    Word w{1, 2, -1, 2, 2, -1, -2};
    long sums[2] = {0, 0};
    for (int x = 0; x < 2; ++x)
        for (const auto &t : fox_derivative(w, x))
            sums[x] += t.coeff;
    CHECK(sums[0] == -1);
    CHECK(sums[1] == 2);
}

TEST_CASE("trivial coefficients give the abelianization")
{
    for (auto [D, level] : std::vector<std::pair<long, std::string>>{{1, "2+w"}, {1, "2"}, {2, "1+w"}, {3, "2"}, {7, "w"}}) {
        CAPTURE(D);
        CAPTURE(level);
        auto inst = instance(D, level);
        auto ab = subgroup_abelianization(inst);
        for (auto e : {HomologyEngine::CosetComplex, HomologyEngine::SubgroupFox}) {
            auto h = homology_h1(inst, Coefficients::Trivial, 0, with_engine(e));
            CHECK(h.composite_zero);
            CHECK(h.free_rank == ab.free_rank);
            CHECK(h.divisors == ab.torsion);
        }
    }
}

TEST_CASE("engines agree")
{
    for (auto [D, level] : std::vector<std::pair<long, std::string>>{{1, "2+w"}, {1, "1+w"}, {2, "1+w"}, {3, "2"}}) {
        for (int m = 1; m <= 2; ++m)
            for (auto c : {Coefficients::L, Coefficients::Ldual}) {
                CAPTURE(D);
                CAPTURE(level);
                CAPTURE(m);
                CAPTURE(coefficients_name(c));
                auto inst = instance(D, level);
                auto a = homology_h1(inst, c, m, with_engine(HomologyEngine::CosetComplex));
                auto b = homology_h1(inst, c, m, with_engine(HomologyEngine::SubgroupFox));
                CHECK(a.composite_zero);
                CHECK(b.composite_zero);
                CHECK(a.free_rank == b.free_rank);
                CHECK(a.divisors == b.divisors);
                auto a0 = homology_h0(inst, c, m, with_engine(HomologyEngine::CosetComplex));
                auto b0 = homology_h0(inst, c, m, with_engine(HomologyEngine::SubgroupFox));
                CHECK(a0.free_rank == 0);
                CHECK(b0.free_rank == 0);
                CHECK(a0.divisors == b0.divisors);
            }
    }
}

TEST_CASE("principal congruence subgroup of level 2+i")
{
    auto inst = instance(1, "2+w");
    CHECK(inst.model.table.cosets == 60);
    auto cycles = peripheral_cycles(inst);
    CHECK(cycles.size() == 6);
    for (int m = 2; m <= 3; ++m) {
        CAPTURE(m);
        auto L = homology_h1(inst, Coefficients::L, m);
        auto Ld = homology_h1(inst, Coefficients::Ldual, m);
        auto Lb = homology_h1(inst, Coefficients::Lbar, m);
        CHECK(L.free_rank == 12);
        CHECK(Ld.free_rank == 12);
        CHECK(Lb.free_rank == 24);
        CHECK(Lb.torsion_order == L.torsion_order * Ld.torsion_order);
        auto both = merged(L.divisors, Ld.divisors);
        std::sort(both.begin(), both.end());
        auto bar = Lb.divisors;
        std::sort(bar.begin(), bar.end());
        CHECK(torsion_order(bar) == torsion_order(both));
        CHECK(L.rank_d1 + L.rank_d2 + L.free_rank == L.chain_dims[1]);
    }
}

TEST_CASE("coinvariants of the full group")
{
    auto F = make_field(1);
    auto spec = general_spec(F, parse_ideal(F, "1+w"), {});
    spec.generators = {Mat2{1, 1, 0, 1}, Mat2{1, omega_element(), 0, 1}, Mat2{0, -1, 1, 0}};
    auto inst = prepare_instance(spec);
    CHECK(inst.model.table.cosets == 1);
    auto P = load_presentation(1);
    for (int m = 1; m <= 3; ++m)
        for (auto c : {Coefficients::L, Coefficients::Ldual}) {
            CAPTURE(m);
            std::size_t n = coefficient_rank(c, m);
            IntMatrix stacked(P.generator_count() * n, n);
            for (std::size_t g = 0; g < P.generator_count(); ++g) {
                auto A = right_action(F, P.generators[g], m, c);
                for (std::size_t i = 0; i < n; ++i)
                    for (std::size_t j = 0; j < n; ++j)
                        stacked(g * n + i, j) = A(i, j) - (i == j ? 1 : 0);
            }
            auto oracle = smith_normal_form(stacked);
            auto h0 = homology_h0(inst, c, m, with_engine(HomologyEngine::CosetComplex));
            CHECK(h0.free_rank == n - oracle.rank);
            CHECK(h0.divisors == oracle.torsion);
        }
}

TEST_CASE("boundary index")
{
    auto inst = instance(1, "2+w");
    for (auto e : {HomologyEngine::CosetComplex, HomologyEngine::SubgroupFox}) {
        auto B = boundary_image_index(inst, 2, with_engine(e));
        CHECK(B.kappa == 6);
        CHECK(B.full_rank);
        CHECK(B.rank_h1 == 12);
        CHECK(B.index > 0);
        CHECK(B.inequality_holds);
        CHECK(B.clearing_scalars.size() == 6);
    }
    auto a = boundary_image_index(inst, 1, with_engine(HomologyEngine::CosetComplex));
    auto b = boundary_image_index(inst, 1, with_engine(HomologyEngine::SubgroupFox));
    CHECK(a.index == b.index);
}

TEST_CASE("column cap")
{
    auto inst = instance(1, "2+w");
    HomologyOptions o;
    o.column_cap = 10;
    CHECK_THROWS_AS(homology_h1(inst, Coefficients::L, 2, o), CapExceeded);
    o.enforce_cap = false;
    CHECK_NOTHROW(homology_h1(inst, Coefficients::L, 1, o));
}
