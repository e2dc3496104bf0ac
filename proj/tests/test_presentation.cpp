#include "doctest.h"

#include "bianchi/presentation.hpp"
#include "bianchi/snf.hpp"

using namespace bianchi;

namespace {

struct Abelian {
    std::size_t free_rank;
    std::vector<Integer> torsion;
};

Abelian abelianize(std::size_t gens, const std::vector<Word> &relators)
{
    auto r = smith_normal_form(exponent_sum_matrix(gens, relators));
    return {gens - r.rank, r.torsion};
}

} // namespace

TEST_CASE("word operations")
{
    Word w{1, 2, -2, 3, -1};
    CHECK(free_reduce(w) == Word{1, 3, -1});
    CHECK(cyclic_reduce(w) == Word{3});
    CHECK(inverse_word(Word{1, -2, 3}) == Word{-3, 2, -1});
    CHECK(word_power(Word{1, 2}, -2) == Word{-2, -1, -2, -1});
    CHECK(word_power(Word{1}, 0).empty());
}

TEST_CASE("shipped presentations load and abelianize correctly")
{
    struct Case {
        long D;
        std::size_t free_rank;
        std::vector<Integer> torsion;
    };
    std::vector<Case> cases{{1, 0, {2, 2}}, {2, 1, {6}}, {3, 0, {3}}, {7, 1, {2}}, {11, 1, {3}}};
    for (const auto &c : cases) {
        CAPTURE(c.D);
        auto P = load_presentation(c.D);
        CHECK(P.projective);
        CHECK(P.t_index >= 0);
        CHECK(P.u_index >= 0);
        for (std::size_t i = 0; i < P.relators.size(); ++i) {
            auto g = evaluate(P.field, P.generators, P.relators[i]);
            CHECK(g == (P.signs[i] > 0 ? Mat2::identity() : Mat2::minus_identity()));
        }
        auto ab = abelianize(P.generator_count(), P.relators);
        CHECK(ab.free_rank == c.free_rank);
        CHECK(ab.torsion == c.torsion);

        auto S = sl2_presentation(P);
        CHECK_FALSE(S.projective);
        for (std::size_t i = 0; i < S.relators.size(); ++i) {
            CHECK(S.signs[i] == 1);
            CHECK(evaluate(S.field, S.generators, S.relators[i]) == Mat2::identity());
        }
    }
    CHECK_THROWS(load_presentation(6));
}

TEST_CASE("parsing rejects a false relator")
{
    std::string text = "field 1\ngen a 0,-1;1,0\ngen t 1,1;0,1\nrel a^2\nrel a t\n";
    CHECK_THROWS(parse_presentation(text, "inline"));
    auto P = parse_presentation("field 1\ngen a 0,-1;1,0\ngen t 1,1;0,1\nrel a^2\nrel a t a t a t\n", "inline");
    CHECK(P.signs.size() == 2);
    CHECK(format_word(P, P.relators[1]) == "a t a t a t");
}

TEST_CASE("coset tables and Reidemeister-Schreier")
{
    for (long D : {1, 2, 3, 7, 11}) {
        CAPTURE(D);
        auto F = make_field(D);
        auto P = load_presentation(D);
        for (const auto &I : enumerate_ideals(F, 5)) {
            if (I.is_unit_ideal())
                continue;
            CAPTURE(format_ideal(F, I));
            auto spec = principal_spec(F, I);
            auto model = make_subgroup_model(P, spec);
            const auto &T = model.table;
            CHECK(Integer((unsigned long)T.cosets) == model.space.index());
            // Every coset is reached by its transversal word.
            for (std::uint32_t c = 0; c < T.cosets; ++c)
                CHECK(T.act(0, T.transversal(c)) == c);
            // Relators act trivially on every coset.
            for (const auto &r : model.presentation.relators)
                for (std::uint32_t c = 0; c < T.cosets; ++c)
                    CHECK(T.act(c, r) == c);

            auto SP = subgroup_presentation(model, false);
            CHECK(SP.schreier_count == T.cosets * (model.presentation.generator_count() - 1) + 1);
            auto QG = model.space.group();
            for (const auto &g : SP.generator_matrices) {
                auto r = QG.reduce(g);
                bool ok = r == QG.identity() || (T.projective && r == QG.minus_identity());
                CHECK(ok);
            }
            auto simplified = subgroup_presentation(model, true);
            CHECK(simplified.stats.generators_after <= SP.stats.generators_after);
            // Both presentations give the same abelianization.
            auto a = abelianize(SP.generator_words.size(), SP.relators);
            auto b = abelianize(simplified.generator_words.size(), simplified.relators);
            CHECK(a.free_rank == b.free_rank);
            CHECK(a.torsion == b.torsion);
        }
    }
}

TEST_CASE("index-one subgroup and the sign of -I")
{
    auto F = make_field(1);
    auto P = load_presentation(1);
    auto spec = general_spec(F, parse_ideal(F, "1+w"), {});
    auto whole = spec;
    whole.generators = {Mat2{1, 1, 0, 1}, Mat2{1, omega_element(), 0, 1}, Mat2{0, -1, 1, 0}};
    auto model = make_subgroup_model(P, whole);
    CHECK(model.table.cosets == 1);

    auto small = make_subgroup_model(P, principal_spec(F, parse_ideal(F, "2+w")));
    CHECK(small.table.projective);
    CHECK(small.table.cosets == 60);
    auto big = make_subgroup_model(P, principal_spec(F, parse_ideal(F, "1+w")));
    CHECK_FALSE(big.table.projective);
    CHECK(big.table.cosets == 6);
}
