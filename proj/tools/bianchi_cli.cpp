#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "bianchi/homology.hpp"
#include "bianchi/symreps.hpp"
#include "bianchi/tower.hpp"
#include "bianchi/zeta.hpp"

using namespace bianchi;
using json = nlohmann::ordered_json;

namespace {

std::vector<std::string> strings(const std::vector<Integer> &v)
{
    std::vector<std::string> out;
    for (const auto &x : v)
        out.push_back(x.get_str());
    return out;
}

json matrix_json(const IntMatrix &M)
{
    json rows = json::array();
    for (std::size_t i = 0; i < M.rows; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < M.cols; ++j)
            row.push_back(M(i, j).get_str());
        rows.push_back(row);
    }
    return rows;
}

json homology_json(const HomologyReport &h)
{
    return {{"q", h.q},
            {"D", h.D},
            {"level", h.level},
            {"coefficients", coefficients_name(h.coefficients)},
            {"m", h.m},
            {"engine", h.engine},
            {"free_rank", h.free_rank},
            {"torsion_divisors", strings(h.divisors)},
            {"torsion_order", h.torsion_order.get_str()},
            {"log_torsion", h.log_torsion},
            {"index", h.index},
            {"subgroup_generators", h.subgroup_generators},
            {"coefficient_rank", h.coefficient_rank},
            {"chain_dims", {h.chain_dims[0], h.chain_dims[1], h.chain_dims[2]}},
            {"rank_d1", h.rank_d1},
            {"rank_d2", h.rank_d2},
            {"composite_zero", h.composite_zero},
            {"torsion_free", h.torsion_free},
            {"torsion_free_reason", h.torsion_free_reason},
            {"checked_primes", h.checked_primes}};
}

json zeta_json(const ZetaEvaluation &z, const GeodesicTable &T)
{
    return {{"subgroup", T.subgroup},
            {"s", z.s},
            {"k", z.k},
            {"value", {z.value.real(), z.value.imag()}},
            {"tail_bound", z.tail_bound},
            {"cutoff", z.cutoff},
            {"classes_used", z.classes_used},
            {"c_X", T.c_X},
            {"word_bound", T.word_bound},
            {"possible_overcount", T.possible_overcount},
            {"counting_bound_violated", T.counting_bound_violated},
            {"min_enumerated_length", T.min_length ? json(*T.min_length) : json(nullptr)},
            {"complete", T.complete},
            {"completeness", "heuristic: enumeration is bounded by word length"}};
}

GeodesicTable geodesics(std::int64_t D, const std::string &level, double R, int word_bound)
{
    auto F = make_field(D);
    auto I = parse_ideal(F, level);
    EnumerationOptions o;
    o.cutoff = R;
    o.word_bound = word_bound;
    if (I.is_unit_ideal()) {
        auto P = load_presentation(D);
        auto T = enumerate_loxodromic(F, P.generators, P.names, o);
        T.subgroup = "(1)";
        return T;
    }
    return enumerate_loxodromic(prepare_instance(principal_spec(F, I)), o);
}

void write_or_print(const std::string &path, const std::string &text)
{
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out)
        throw std::runtime_error("cannot write " + path);
    out << text;
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Torsion homology of Bianchi congruence subgroups"};
    app.require_subcommand(1);

    std::int64_t D = 1;
    int precision = 10;
    std::string level = "1";
    std::string kind = "principal";
    bool oracle = false;
    int m = 1;
    std::string g_text;
    std::string coeff = "L";
    int q = 1;
    std::string engine = "fox";
    double R = 8, s = 3, k = 0;
    int word_bound = 4;
    std::string gamma0, chain, out, csv;
    std::size_t budget = 4096;
    unsigned jobs = 1;
    std::size_t coset_cap = 1500;

    auto *field_info = app.add_subcommand("field-info", "field invariants and covolume");
    field_info->add_option("--D", D)->required();
    field_info->add_option("--precision", precision)->check(CLI::Range(6, 15));

    auto *subgroup = app.add_subcommand("subgroup", "index, cusps and torsion-freeness of a congruence subgroup");
    subgroup->add_option("--D", D)->required();
    subgroup->add_option("--level", level)->required();
    subgroup->add_option("--kind", kind)->check(CLI::IsMember({"principal"}));
    subgroup->add_flag("--oracle", oracle, "count cusps by orbits even when the closed form applies");

    auto *rep = app.add_subcommand("rep-matrix", "matrix of rho(m)");
    rep->add_option("--D", D)->required();
    rep->add_option("--m", m)->required();
    rep->add_option("--g", g_text, "a,b;c,d")->required();

    auto *homology = app.add_subcommand("homology", "H_q with lattice coefficients");
    homology->add_option("--D", D)->required();
    homology->add_option("--level", level)->required();
    homology->add_option("--m", m)->required();
    homology->add_option("--coeff", coeff)->check(CLI::IsMember({"L", "Ldual", "Lbar", "trivial"}));
    homology->add_option("--q", q)->check(CLI::IsMember({0, 1}));
    homology->add_option("--engine", engine)->check(CLI::IsMember({"fox", "coset"}));

    auto *boundary = app.add_subcommand("boundary-index", "index of the peripheral image in H_1 free part");
    boundary->add_option("--D", D)->required();
    boundary->add_option("--level", level)->required();
    boundary->add_option("--m", m)->required();
    boundary->add_option("--engine", engine)->check(CLI::IsMember({"fox", "coset"}));

    auto add_zeta_options = [&](CLI::App *cmd) {
        cmd->add_option("--D", D)->required();
        cmd->add_option("--level", level);
        cmd->add_option("--R", R);
        cmd->add_option("--word-bound", word_bound);
    };
    auto *zeta = app.add_subcommand("zeta", "truncated log Ruelle zeta");
    add_zeta_options(zeta);
    zeta->add_option("--s", s);
    zeta->add_option("--k", k);
    auto *zeta_table = app.add_subcommand("zeta-table", "geodesic table as CSV");
    add_zeta_options(zeta_table);

    auto *tower = app.add_subcommand("tower", "torsion growth along a chain of levels");
    tower->add_option("--D", D)->required();
    tower->add_option("--gamma0", gamma0)->required();
    tower->add_option("--chain", chain)->required();
    tower->add_option("--m", m)->required();
    tower->add_option("--budget-mb", budget);
    tower->add_option("--jobs", jobs);
    tower->add_option("--coset-cap", coset_cap, "skip levels above this many cosets; 0 disables");
    tower->add_option("--out", out);
    tower->add_option("--csv", csv);

    CLI11_PARSE(app, argc, argv);

    try {
        HomologyOptions hopts;
        hopts.engine = engine == "coset" ? HomologyEngine::CosetComplex : HomologyEngine::SubgroupFox;

        if (*field_info) {
            auto F = make_field(D);
            auto c = covolume(F, precision);
            json j = {{"D", D},
                      {"discriminant", F.discriminant},
                      {"class_number", F.class_number},
                      {"unit_count", F.unit_count},
                      {"zeta2", c.zeta2},
                      {"covolume", c.covolume},
                      {"error_bound", c.error_bound}};
            std::cout << j.dump(2) << "\n";
        } else if (*subgroup) {
            auto F = make_field(D);
            auto I = parse_ideal(F, level);
            auto spec = principal_spec(F, I);
            auto cusps = cusp_count(spec, !oracle);
            auto tf = torsion_free_check(spec);
            json j = {{"D", D},
                      {"level", format_ideal(F, I)},
                      {"norm", I.norm().get_str()},
                      {"index", index_principal(F, I).get_str()},
                      {"cusps", cusps.kappa.get_str()},
                      {"method", cusps.method == CuspMethod::Formula ? "formula" : "orbit-oracle"},
                      {"formula_applicable", cusps.formula_applicable},
                      {"formula_agrees", cusps.agree},
                      {"torsion_free", tf.status == TorsionFreeStatus::CertifiedTorsionFree},
                      {"torsion_free_reason", tf.reason}};
            std::cout << j.dump(2) << "\n";
        } else if (*rep) {
            auto F = make_field(D);
            auto g = parse_mat2(g_text);
            auto r = rho_matrix(F, g, m);
            std::size_t n = static_cast<std::size_t>(2 * m + 1);
            json cm = json::array();
            for (std::size_t i = 0; i < n; ++i) {
                json row = json::array();
                for (std::size_t j = 0; j < n; ++j)
                    row.push_back(format_element(r.complex_model[i * n + j]));
                cm.push_back(row);
            }
            json j = {{"D", D},
                      {"m", m},
                      {"g", format_mat2(g)},
                      {"complex_model", cm},
                      {"integral_model", matrix_json(r.integral_model)}};
            std::cout << j.dump(2) << "\n";
        } else if (*homology) {
            auto F = make_field(D);
            auto inst = prepare_instance(principal_spec(F, parse_ideal(F, level)));
            auto c = parse_coefficients(coeff);
            auto h = q == 0 ? homology_h0(inst, c, m, hopts) : homology_h1(inst, c, m, hopts);
            std::cout << homology_json(h).dump(2) << "\n";
        } else if (*boundary) {
            auto F = make_field(D);
            auto inst = prepare_instance(principal_spec(F, parse_ideal(F, level)));
            auto b = boundary_image_index(inst, m, hopts);
            json j = {{"D", D},
                      {"level", inst.level_text},
                      {"m", m},
                      {"kappa", b.kappa},
                      {"rank_h1", b.rank_h1},
                      {"peripheral_rank", b.peripheral_rank},
                      {"full_rank", b.full_rank},
                      {"index", b.index.get_str()},
                      {"dual_torsion_order", b.dual_torsion_order.get_str()},
                      {"inequality_holds", b.inequality_holds},
                      {"clearing_scalars", strings(b.clearing_scalars)}};
            std::cout << j.dump(2) << "\n";
        } else if (*zeta) {
            auto T = geodesics(D, level, R, word_bound);
            std::cout << zeta_json(log_ruelle(T, s, k), T).dump(2) << "\n";
        } else if (*zeta_table) {
            std::cout << table_csv(geodesics(D, level, R, word_bound));
        } else if (*tower) {
            TowerSpec spec;
            spec.field = make_field(D);
            spec.gamma0 = parse_ideal(spec.field, gamma0);
            spec.chain = parse_chain(spec.field, chain);
            spec.m = m;
            TowerOptions o;
            o.budget_mb = budget;
            o.jobs = jobs;
            o.coset_cap = coset_cap;
            auto report = run_tower(spec, o);
            write_or_print(out, growth_report_json(report));
            if (!csv.empty())
                write_or_print(csv, growth_report_csv(report));
        }
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
