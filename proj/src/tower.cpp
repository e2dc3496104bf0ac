#include "bianchi/tower.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "json.hpp"

namespace bianchi {

RationalOverPi theoretical_rate(int m)
{
    if (m < 3)
        throw std::invalid_argument("theoretical rate needs m >= 3");
    return {mpq_class(2 * m * (m + 1) - 12)};
}

std::vector<IdealRep> prime_power_chain(const FieldDescriptor &F, const IdealRep &p, int count)
{
    std::vector<IdealRep> out;
    IdealRep cur = p;
    for (int i = 0; i < count; ++i) {
        out.push_back(cur);
        cur = ideal_product(F, cur, p);
    }
    return out;
}

std::vector<IdealRep> prime_product_chain(const FieldDescriptor &F, const IdealRep &base, int count)
{
    std::vector<IdealRep> primes;
    for (std::int64_t bound = 16; static_cast<int>(primes.size()) + 1 < count; bound *= 4) {
        primes.clear();
        for (const auto &I : enumerate_ideals(F, bound)) {
            if (I.is_unit_ideal())
                continue;
            auto f = factor_ideal(F, I);
            if (f.factors.size() == 1 && f.factors[0].exponent == 1)
                primes.push_back(I);
        }
        std::stable_sort(primes.begin(), primes.end(), [](const auto &a, const auto &b) { return a.norm() < b.norm(); });
    }
    std::vector<IdealRep> out{base};
    for (int i = 1; i < count; ++i)
        out.push_back(ideal_product(F, out.back(), primes[static_cast<std::size_t>(i - 1)]));
    return out;
}

std::vector<IdealRep> parse_chain(const FieldDescriptor &F, const std::string &text)
{
    std::vector<IdealRep> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ';')) {
        item.erase(std::remove_if(item.begin(), item.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); }),
                   item.end());
        if (!item.empty())
            out.push_back(parse_ideal(F, item));
    }
    if (out.empty())
        throw std::invalid_argument("empty chain");
    return out;
}

void validate_tower(const TowerSpec &tower)
{
    if (tower.m < 3)
        throw std::invalid_argument("tower weight must be at least 3");
    if (tower.chain.empty())
        throw std::invalid_argument("empty chain");
    const auto &F = tower.field;
    for (std::size_t i = 0; i < tower.chain.size(); ++i) {
        const auto &I = tower.chain[i];
        if (!ideal_contains(tower.gamma0, I))
            throw std::invalid_argument(format_ideal(F, I) + " does not lie in " + format_ideal(F, tower.gamma0));
        if (i > 0) {
            const auto &prev = tower.chain[i - 1];
            if (!(I.norm() > prev.norm()))
                throw std::invalid_argument("norms along the chain must increase");
            if (!ideal_contains(prev, I))
                throw std::invalid_argument(format_ideal(F, I) + " does not lie in " + format_ideal(F, prev));
        }
    }
}

HypothesisReport hypothesis_check(const TowerSpec &tower)
{
    const auto &F = tower.field;
    HypothesisReport H;
    for (const auto &I : tower.chain) {
        HypothesisRow row;
        row.level = format_ideal(F, I);
        row.norm = I.norm();
        row.index = index_principal(F, I);
        row.kappa = cusp_count(principal_spec(F, I), true).kappa;
        double idx = row.index.get_d();
        row.ratio = row.kappa.get_d() * std::log(idx) / idx;
        double N = row.norm.get_d();
        row.bound = 3.0 * static_cast<double>(F.class_number) * std::log(N) / N;
        row.within_bound = row.ratio <= row.bound;
        H.all_within_bound = H.all_within_bound && row.within_bound;
        if (!H.rows.empty() && row.ratio >= H.rows.back().ratio)
            H.nondecreasing_at.push_back(H.rows.size());
        H.rows.push_back(std::move(row));
    }
    return H;
}

namespace {

double estimated_mb(const HomologyInstance &inst, int m)
{
    double n = static_cast<double>(coefficient_rank(Coefficients::Lbar, m));
    double rows = static_cast<double>(inst.simplified.relators.size()) * n;
    double cols = static_cast<double>(inst.simplified.generator_matrices.size()) * n;
    return rows * cols * 8.0 / (1024.0 * 1024.0);
}

} // namespace

GrowthReport run_tower(const TowerSpec &tower, const TowerOptions &options)
{
    validate_tower(tower);
    const auto &F = tower.field;
    GrowthReport R;
    R.D = F.D;
    R.m = tower.m;
    R.gamma0 = format_ideal(F, tower.gamma0);
    auto spec0 = principal_spec(F, tower.gamma0);
    R.gamma0_torsion_free = torsion_free_check(spec0).status == TorsionFreeStatus::CertifiedTorsionFree;
    R.warning_not_torsion_free = !R.gamma0_torsion_free;
    R.covolume = covolume(F, 12).covolume;
    R.rate = theoretical_rate(tower.m);
    for (int k = 1; k <= tower.m; ++k)
        R.l2_constants.push_back(l2_torsion_constant(k));
    R.hypothesis = hypothesis_check(tower);

    auto inst0 = prepare_instance(spec0);
    const std::size_t cosets0 = inst0.model.table.cosets;
    R.volume0 = R.covolume * static_cast<double>(cosets0);

    R.levels.resize(tower.chain.size());
    auto work = [&](std::size_t i) {
        LevelReport &L = R.levels[i];
        const auto &I = tower.chain[i];
        L.level = format_ideal(F, I);
        L.norm = I.norm();
        L.hyp_ratio = R.hypothesis.rows[i].ratio;
        L.kappa = R.hypothesis.rows[i].kappa;
        try {
            auto inst = prepare_instance(principal_spec(F, I));
            L.cosets = inst.model.table.cosets;
            if (L.cosets % cosets0 != 0)
                throw ArithmeticError("index is not a multiple of the base index");
            L.index_gamma0 = static_cast<unsigned long>(L.cosets / cosets0);
            L.volume = R.volume0 * L.index_gamma0.get_d();
            L.torsion_free = inst.torsion_free.status == TorsionFreeStatus::CertifiedTorsionFree;
            L.expected_rank = 4 * static_cast<std::size_t>(L.kappa.get_ui());
            if (options.coset_cap != 0 && L.cosets > options.coset_cap) {
                L.error = "skipped: " + std::to_string(L.cosets) + " cosets exceed the cap of " +
                          std::to_string(options.coset_cap);
                return;
            }
            double mb = estimated_mb(inst, tower.m);
            if (mb > static_cast<double>(options.budget_mb)) {
                char buf[128];
                std::snprintf(buf, sizeof buf, "skipped: estimated %.0f MB exceeds the %zu MB budget", mb,
                              options.budget_mb);
                L.error = buf;
                return;
            }
            L.h1_m = homology_h1(inst, Coefficients::Lbar, tower.m, options.homology);
            L.h1_2 = homology_h1(inst, Coefficients::Lbar, 2, options.homology);
            L.rank_h1 = L.h1_m.free_rank;
            L.log_tors_m = L.h1_m.log_torsion;
            L.log_tors_2 = L.h1_2.log_torsion;
            L.t_i = L.log_tors_m / L.volume;
            L.t_i_index = L.log_tors_m / L.index_gamma0.get_d();
            L.t_i_normalized = (L.log_tors_m - L.log_tors_2) / L.volume;
            if (options.compute_h0) {
                auto h0 = homology_h0(inst, Coefficients::Lbar, tower.m, options.homology);
                L.log_h0 = h0.log_torsion;
                L.log_h0_per_index = h0.log_torsion / L.index_gamma0.get_d();
            }
            L.computed = true;
        } catch (const std::exception &e) {
            L.error = e.what();
        }
    };

    unsigned jobs = std::max(1u, options.jobs);
    if (jobs == 1) {
        for (std::size_t i = 0; i < tower.chain.size(); ++i)
            work(i);
    } else {
        std::mutex mu;
        std::size_t next = 0;
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                while (true) {
                    std::size_t i;
                    {
                        std::lock_guard<std::mutex> lock(mu);
                        if (next >= tower.chain.size())
                            return;
                        i = next++;
                    }
                    work(i);
                }
            });
        for (auto &th : pool)
            th.join();
    }

    std::optional<std::size_t> prev;
    for (std::size_t i = 0; i < R.levels.size(); ++i) {
        const auto &L = R.levels[i];
        if (!L.computed)
            continue;
        if (prev) {
            const auto &P = R.levels[*prev];
            if (L.t_i < P.t_i)
                R.t_decreasing_at.push_back(i);
            if (L.log_h0_per_index && P.log_h0_per_index && *L.log_h0_per_index >= *P.log_h0_per_index)
                R.h0_nondecreasing_at.push_back(i);
        }
        prev = i;
    }
    return R;
}

namespace {

nlohmann::ordered_json rational_json(const RationalOverPi &q)
{
    return {{"over_pi", q.coefficient.get_str()}, {"value", q.value()}};
}

std::vector<std::string> divisor_strings(const std::vector<Integer> &d)
{
    std::vector<std::string> out;
    for (const auto &x : d)
        out.push_back(x.get_str());
    return out;
}

} // namespace

std::string growth_report_json(const GrowthReport &R)
{
    using json = nlohmann::ordered_json;
    json j;
    j["D"] = R.D;
    j["m"] = R.m;
    j["gamma0"] = R.gamma0;
    j["gamma0_certified_torsion_free"] = R.gamma0_torsion_free;
    j["warning_not_torsion_free"] = R.warning_not_torsion_free;
    j["covolume"] = R.covolume;
    j["volume_gamma0"] = R.volume0;
    j["rate_theory"] = rational_json(R.rate);
    j["rate_theory_note"] = "asymptotic lower bound for the liminf of log|H_1 tors| / vol; not a tolerance target "
                            "and not expected at finite level";
    json l2 = json::array();
    for (std::size_t k = 0; k < R.l2_constants.size(); ++k)
        l2.push_back({{"k", k + 1}, {"c", rational_json(R.l2_constants[k])}});
    j["l2_torsion_constants"] = l2;

    json hyp = json::array();
    for (const auto &h : R.hypothesis.rows)
        hyp.push_back({{"level", h.level},
                       {"norm", h.norm.get_str()},
                       {"index_full", h.index.get_str()},
                       {"kappa", h.kappa.get_str()},
                       {"ratio", h.ratio},
                       {"bound", h.bound},
                       {"within_bound", h.within_bound}});
    j["hypothesis"] = {{"rows", hyp},
                       {"nondecreasing_at", R.hypothesis.nondecreasing_at},
                       {"all_within_bound", R.hypothesis.all_within_bound}};

    json levels = json::array();
    for (const auto &L : R.levels) {
        json l;
        l["level"] = L.level;
        l["norm"] = L.norm.get_str();
        l["index_gamma0"] = L.index_gamma0.get_str();
        l["cosets"] = L.cosets;
        l["kappa"] = L.kappa.get_str();
        l["hyp_ratio"] = L.hyp_ratio;
        l["volume"] = L.volume;
        l["certified_torsion_free"] = L.torsion_free;
        l["computed"] = L.computed;
        if (!L.error.empty())
            l["error"] = L.error;
        if (L.computed) {
            l["rank_h1"] = L.rank_h1;
            l["expected_rank"] = L.expected_rank;
            l["log_tors_m"] = L.log_tors_m;
            l["log_tors_2"] = L.log_tors_2;
            l["divisors_m"] = divisor_strings(L.h1_m.divisors);
            l["divisors_2"] = divisor_strings(L.h1_2.divisors);
            l["t_i"] = L.t_i;
            l["t_i_per_index"] = L.t_i_index;
            l["t_i_normalized"] = L.t_i_normalized;
            if (L.log_h0) {
                l["log_h0"] = *L.log_h0;
                l["log_h0_per_index"] = *L.log_h0_per_index;
            }
        }
        levels.push_back(l);
    }
    j["levels"] = levels;
    j["t_decreasing_at"] = R.t_decreasing_at;
    j["h0_nondecreasing_at"] = R.h0_nondecreasing_at;
    return j.dump(2) + "\n";
}

std::string growth_report_csv(const GrowthReport &R)
{
    std::string out = "level,norm,index,kappa,hyp_ratio,rank_h1,log_tors_m,log_tors_2,t_i,rate_theory\n";
    char buf[512];
    for (const auto &L : R.levels) {
        if (L.computed)
            std::snprintf(buf, sizeof buf, "%s,%s,%s,%s,%.10g,%zu,%.10g,%.10g,%.10g,%.10g\n", L.level.c_str(),
                          L.norm.get_str().c_str(), L.index_gamma0.get_str().c_str(), L.kappa.get_str().c_str(),
                          L.hyp_ratio, L.rank_h1, L.log_tors_m, L.log_tors_2, L.t_i, R.rate.value());
        else
            std::snprintf(buf, sizeof buf, "%s,%s,%s,%s,%.10g,,,,,%.10g\n", L.level.c_str(), L.norm.get_str().c_str(),
                          L.index_gamma0.get_str().c_str(), L.kappa.get_str().c_str(), L.hyp_ratio, R.rate.value());
        out += buf;
    }
    return out;
}

} // namespace bianchi
