#include "doctest.h"

#include <cmath>

#include "bianchi/tower.hpp"
#include "json.hpp"

using namespace bianchi;

namespace {

TowerSpec gaussian_tower(const std::string &gamma0, const std::string &chain, int m = 3)
{
    TowerSpec t;
    t.field = make_field(1);
    t.gamma0 = parse_ideal(t.field, gamma0);
    t.chain = parse_chain(t.field, chain);
    t.m = m;
    return t;
}

} // namespace

TEST_CASE("theoretical rate")
{
    CHECK(theoretical_rate(3).coefficient == 12);
    CHECK(theoretical_rate(3).value() == doctest::Approx(3.819719).epsilon(1e-6));
    CHECK(theoretical_rate(4).coefficient == 28);
    for (int m = 3; m <= 10; ++m) {
        CAPTURE(m);
        auto r = theoretical_rate(m);
        CHECK(r.coefficient - mpq_class(2 * (m * (m + 1) - 6)) == 0);
        mpq_class twice = 2 * (l2_torsion_constant(m).coefficient - l2_torsion_constant(2).coefficient);
        CHECK(r.coefficient == twice);
    }
    CHECK_THROWS_AS(theoretical_rate(2), std::invalid_argument);
}

TEST_CASE("chains")
{
    auto F = make_field(1);
    auto p = parse_ideal(F, "2+w");
    auto pw = prime_power_chain(F, p, 3);
    REQUIRE(pw.size() == 3);
    CHECK(pw[0].norm() == 5);
    CHECK(pw[1].norm() == 25);
    CHECK(pw[2].norm() == 125);
    auto pp = prime_product_chain(F, p, 3);
    REQUIRE(pp.size() == 3);
    CHECK(pp[1].norm() == 10);
    CHECK(pp[2].norm() == 50);
    CHECK(ideal_contains(pp[1], pp[2]));

    auto ok = gaussian_tower("2+w", "2+w; 1+3w");
    CHECK_NOTHROW(validate_tower(ok));
    CHECK_THROWS_AS(validate_tower(gaussian_tower("2+w", "1+3w; 2+w")), std::invalid_argument);
    CHECK_THROWS_AS(validate_tower(gaussian_tower("2+w", "2+w; 3")), std::invalid_argument);
    CHECK_THROWS_AS(validate_tower(gaussian_tower("2+w", "2+w", 2)), std::invalid_argument);
    CHECK_THROWS_AS(parse_chain(F, " ; "), std::invalid_argument);
}

TEST_CASE("cusp growth hypothesis")
{
    auto H = hypothesis_check(gaussian_tower("2+w", "2+w; 3+4w"));
    REQUIRE(H.rows.size() == 2);
    // |SL2(F_5)| = 120 with 120 / (4 * 5) cusps; |SL2(Z/25)| = 15000 with 15000 / (4 * 25).
    CHECK(H.rows[0].index == 120);
    CHECK(H.rows[0].kappa == 6);
    CHECK(H.rows[1].index == 15000);
    CHECK(H.rows[1].kappa == 150);
    CHECK(H.rows[0].ratio == doctest::Approx(6 * std::log(120.0) / 120));
    CHECK(H.rows[1].ratio < H.rows[0].ratio);
    CHECK(H.nondecreasing_at.empty());
    CHECK(H.all_within_bound);
    for (const auto &r : H.rows)
        CHECK(r.ratio <= r.bound);

    auto single = hypothesis_check(gaussian_tower("2+w", "2+w"));
    CHECK(single.rows.size() == 1);
    CHECK(single.all_within_bound);
    CHECK(single.nondecreasing_at.empty());
}

TEST_CASE("two-level tower")
{
    auto tower = gaussian_tower("2+w", "2+w; 1+3w");
    TowerOptions o;
    o.jobs = 2;
    auto R = run_tower(tower, o);
    CHECK(R.gamma0_torsion_free);
    CHECK_FALSE(R.warning_not_torsion_free);
    CHECK(R.rate.coefficient == 12);
    REQUIRE(R.levels.size() == 2);
    for (const auto &L : R.levels) {
        CAPTURE(L.level);
        REQUIRE(L.computed);
        CHECK(L.error.empty());
        CHECK(L.rank_h1 == L.expected_rank);
        CHECK(L.h1_m.free_rank == 4 * L.kappa.get_ui());
        CHECK(L.volume / R.volume0 == doctest::Approx(L.index_gamma0.get_d()).epsilon(1e-14));
        CHECK(L.t_i >= 0);
        CHECK(L.t_i == doctest::Approx(L.log_tors_m / L.volume));
        REQUIRE(L.log_h0);
    }
    CHECK(R.levels[0].index_gamma0 == 1);
    CHECK(R.levels[1].index_gamma0 == 6);
    CHECK(R.levels[1].kappa == 18);
    CHECK(R.levels[0].t_i == doctest::Approx(13.29713392008846).epsilon(1e-10));
    CHECK(R.levels[1].t_i == doctest::Approx(13.432639370853963).epsilon(1e-10));

    auto json = growth_report_json(R);
    auto j = nlohmann::json::parse(json);
    CHECK(j["levels"].size() == 2);
    CHECK(j["rate_theory"]["over_pi"] == "12");
    CHECK(json == growth_report_json(run_tower(tower)));
    auto csv = growth_report_csv(R);
    CHECK(csv.rfind("level,norm,index,kappa,hyp_ratio,rank_h1,log_tors_m,log_tors_2,t_i,rate_theory\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);
}

TEST_CASE("budget skip is recorded")
{
    TowerOptions o;
    o.budget_mb = 0;
    auto R = run_tower(gaussian_tower("2+w", "2+w"), o);
    REQUIRE(R.levels.size() == 1);
    CHECK_FALSE(R.levels[0].computed);
    CHECK(R.levels[0].error.find("budget") != std::string::npos);
    CHECK(growth_report_csv(R).find(",,,,,") != std::string::npos);
}
