#include "bianchi/homology.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <map>
#include <unordered_map>

namespace bianchi {

GroupRingElement normalize(GroupRingElement e)
{
    for (auto &t : e)
        t.word = free_reduce(t.word);
    std::sort(e.begin(), e.end(), [](const GroupRingTerm &a, const GroupRingTerm &b) { return a.word < b.word; });
    GroupRingElement out;
    for (auto &t : e) {
        if (!out.empty() && out.back().word == t.word)
            out.back().coeff += t.coeff;
        else
            out.push_back(std::move(t));
        if (out.back().coeff == 0)
            out.pop_back();
    }
    return out;
}

GroupRingElement fox_derivative(const Word &w, int generator)
{
    GroupRingElement out;
    Word prefix;
    for (int l : w) {
        if (letter_generator(l) == generator) {
            if (l > 0) {
                out.push_back({prefix, 1});
            } else {
                Word p = prefix;
                p.push_back(l);
                out.push_back({p, -1});
            }
        }
        prefix.push_back(l);
    }
    return normalize(std::move(out));
}

FoxMatrix fox_boundaries(const std::vector<Word> &relators, std::size_t generators)
{
    FoxMatrix M;
    M.generators = generators;
    for (const auto &r : relators) {
        std::vector<GroupRingElement> row;
        for (std::size_t x = 0; x < generators; ++x)
            row.push_back(fox_derivative(r, static_cast<int>(x)));
        M.entries.push_back(std::move(row));
    }
    return M;
}

HomologyInstance prepare_instance(const SubgroupSpec &spec, const TietzeOptions &tietze)
{
    auto parent = load_presentation(spec.field.D);
    HomologyInstance inst{spec, make_subgroup_model(parent, spec), {}, torsion_free_check(spec),
                          format_ideal(spec.field, spec.level)};
    inst.simplified = subgroup_presentation(inst.model, true, tietze);
    return inst;
}

std::string engine_name(HomologyEngine e)
{
    return e == HomologyEngine::CosetComplex ? "coset-complex" : "subgroup-fox";
}

void check_cap(const HomologyInstance &inst, Coefficients c, int m, const HomologyOptions &options)
{
    std::size_t cols = inst.simplified.generator_words.size() * coefficient_rank(c, m);
    if (options.enforce_cap && cols > options.column_cap)
        throw CapExceeded("instance too large: " + std::to_string(inst.simplified.generator_words.size()) +
                          " subgroup generators x rank " + std::to_string(coefficient_rank(c, m)) + " = " +
                          std::to_string(cols) + " columns exceeds the cap of " + std::to_string(options.column_cap));
}

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

IntMatrix action_of(const FieldDescriptor &F, const Mat2 &g, int m, Coefficients c)
{
    if (c == Coefficients::Trivial)
        return IntMatrix::identity(1);
    return right_action(F, g, m, c);
}

IntMatrix mat_mul(const IntMatrix &A, const IntMatrix &B) { return A * B; }

// The complex to evaluate: generator actions, relators and the coset action.
struct ComplexData {
    std::size_t generators = 0;
    std::size_t cosets = 1;
    std::size_t n = 1;
    const CosetTable *table = nullptr; // null: a single coset
    std::vector<Word> relators;
    std::vector<IntMatrix> fwd, inv; // A(x), A(x^-1)

    std::uint32_t act(std::uint32_t c, int letter) const { return table ? table->act(c, letter) : 0; }
    std::uint32_t c1_column(std::size_t x, std::uint32_t c, std::size_t i) const
    {
        return static_cast<std::uint32_t>((x * cosets + c) * n + i);
    }
};

ComplexData complex_for(const HomologyInstance &inst, Coefficients c, int m, HomologyEngine engine)
{
    const auto &F = inst.spec.field;
    ComplexData d;
    d.n = coefficient_rank(c, m);
    std::vector<Mat2> gens;
    if (engine == HomologyEngine::CosetComplex) {
        d.table = &inst.model.table;
        d.cosets = inst.model.table.cosets;
        d.relators = inst.model.presentation.relators;
        gens = inst.model.presentation.generators;
    } else {
        d.relators = inst.simplified.relators;
        gens = inst.simplified.generator_matrices;
    }
    d.generators = gens.size();
    for (const auto &g : gens) {
        d.fwd.push_back(action_of(F, g, m, c));
        d.inv.push_back(action_of(F, inverse_sl2(F, g), m, c));
    }
    if (static_cast<double>(d.generators) * static_cast<double>(d.cosets) * static_cast<double>(d.n) > 4.0e9)
        throw CapExceeded("chain group too large for 32-bit column indices");
    return d;
}

// Fox terms of one relator, independent of the coset: sign, generator, and the
// action of the group-ring word (prefix, with x^-1 included for inverse letters).
struct FoxTerm {
    int sign;
    std::size_t generator;
    IntMatrix action;
};

std::vector<FoxTerm> relator_terms(const ComplexData &d, const Word &r)
{
    std::vector<FoxTerm> out;
    IntMatrix P = IntMatrix::identity(d.n);
    for (int l : r) {
        auto x = static_cast<std::size_t>(letter_generator(l));
        if (l > 0) {
            out.push_back({1, x, P});
            P = mat_mul(P, d.fwd[x]);
        } else {
            P = mat_mul(P, d.inv[x]);
            out.push_back({-1, x, P});
        }
    }
    return out;
}

bool fits64(const std::vector<std::vector<FoxTerm>> &terms, const ComplexData &d)
{
    // Each C1 entry is a sum of at most (relator length) products sign * entry.
    for (const auto &rt : terms) {
        Integer bound = 0;
        for (const auto &t : rt) {
            Integer mx = 0;
            for (const auto &v : t.action.data)
                if (abs(v) > mx)
                    mx = abs(v);
            bound += mx;
        }
        if (bound > Integer("4611686018427387904"))
            return false;
    }
    for (const auto &A : d.fwd)
        for (const auto &v : A.data)
            if (!v.fits_slong_p())
                return false;
    return true;
}

template <class E> E convert(const Integer &v)
{
    if constexpr (std::is_same_v<E, Integer>)
        return v;
    else
        return v.get_si();
}

template <class E> using SparseRows = std::vector<std::vector<std::pair<std::uint32_t, E>>>;

template <class E> void merge_row(std::vector<std::pair<std::uint32_t, E>> &row)
{
    std::sort(row.begin(), row.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
    std::vector<std::pair<std::uint32_t, E>> out;
    for (auto &e : row) {
        if (!out.empty() && out.back().first == e.first)
            out.back().second += e.second;
        else
            out.push_back(std::move(e));
    }
    out.erase(std::remove_if(out.begin(), out.end(), [](const auto &e) { return e.second == 0; }), out.end());
    row = std::move(out);
}

template <class E> SparseRows<E> build_d2(const ComplexData &d, const std::vector<std::vector<FoxTerm>> &terms)
{
    SparseRows<E> rows;
    rows.reserve(d.relators.size() * d.cosets * d.n);
    std::vector<std::uint32_t> blocks;
    for (std::size_t r = 0; r < d.relators.size(); ++r) {
        for (std::uint32_t c = 0; c < d.cosets; ++c) {
            // Coset of each Fox term along the relator read from c.
            blocks.clear();
            std::uint32_t k = c;
            std::size_t j = 0;
            for (int l : d.relators[r]) {
                if (l > 0) {
                    blocks.push_back(k);
                    k = d.act(k, l);
                } else {
                    k = d.act(k, l);
                    blocks.push_back(k);
                }
                ++j;
            }
            if (k != c)
                throw ArithmeticError("relator does not close up on the cosets");
            for (std::size_t i = 0; i < d.n; ++i) {
                std::vector<std::pair<std::uint32_t, E>> row;
                for (std::size_t t = 0; t < terms[r].size(); ++t) {
                    const auto &T = terms[r][t];
                    for (std::size_t col = 0; col < d.n; ++col) {
                        const Integer &v = T.action(i, col);
                        if (v == 0)
                            continue;
                        E e = convert<E>(v);
                        if (T.sign < 0)
                            e = -e;
                        row.emplace_back(d.c1_column(T.generator, blocks[t], col), std::move(e));
                    }
                }
                merge_row(row);
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

template <class E> SparseRows<E> build_d1(const ComplexData &d)
{
    SparseRows<E> rows;
    rows.reserve(d.generators * d.cosets * d.n);
    for (std::size_t x = 0; x < d.generators; ++x)
        for (std::uint32_t c = 0; c < d.cosets; ++c) {
            std::uint32_t target = d.act(c, static_cast<int>(x) + 1);
            for (std::size_t i = 0; i < d.n; ++i) {
                std::vector<std::pair<std::uint32_t, E>> row;
                for (std::size_t col = 0; col < d.n; ++col)
                    if (d.fwd[x](i, col) != 0)
                        row.emplace_back(static_cast<std::uint32_t>(target * d.n + col), convert<E>(d.fwd[x](i, col)));
                row.emplace_back(static_cast<std::uint32_t>(c * d.n + i), E(-1));
                merge_row(row);
                rows.push_back(std::move(row));
            }
        }
    return rows;
}

// Whether A * B == 0 for sparse row matrices.
template <class EA, class EB> bool product_is_zero(const SparseRows<EA> &A, const SparseRows<EB> &B, std::size_t bcols)
{
    std::vector<Integer> acc(bcols);
    std::vector<std::uint32_t> touched;
    std::vector<char> mark(bcols, 0);
    for (const auto &row : A) {
        touched.clear();
        for (const auto &[k, v] : row)
            for (const auto &[j, w] : B[k]) {
                if (!mark[j]) {
                    mark[j] = 1;
                    touched.push_back(j);
                    acc[j] = 0;
                }
                acc[j] += Integer(v) * Integer(w);
            }
        bool zero = true;
        for (auto j : touched) {
            if (acc[j] != 0)
                zero = false;
            mark[j] = 0;
        }
        if (!zero)
            return false;
    }
    return true;
}

template <> bool product_is_zero(const SparseRows<std::int64_t> &A, const SparseRows<std::int64_t> &B, std::size_t bcols)
{
    std::vector<__int128> acc(bcols, 0);
    std::vector<std::uint32_t> touched;
    std::vector<char> mark(bcols, 0);
    for (const auto &row : A) {
        touched.clear();
        for (const auto &[k, v] : row)
            for (const auto &[j, w] : B[k]) {
                if (!mark[j]) {
                    mark[j] = 1;
                    touched.push_back(j);
                    acc[j] = 0;
                }
                acc[j] += static_cast<__int128>(v) * w;
            }
        bool zero = true;
        for (auto j : touched) {
            if (acc[j] != 0)
                zero = false;
            mark[j] = 0;
        }
        if (!zero)
            return false;
    }
    return true;
}

SparseMatrix64 as_matrix(SparseRows<std::int64_t> rows, std::size_t cols)
{
    SparseMatrix64 M;
    M.cols = cols;
    M.rows = std::move(rows);
    return M;
}

SparseMatrix as_matrix(SparseRows<Integer> rows, std::size_t cols)
{
    SparseMatrix M;
    M.cols = cols;
    M.rows = std::move(rows);
    return M;
}

std::size_t count_divisible(const std::vector<Integer> &divisors, std::uint64_t p)
{
    std::size_t k = 0;
    for (const auto &d : divisors)
        if (mpz_divisible_ui_p(d.get_mpz_t(), p))
            ++k;
    return k;
}

HomologyReport base_report(const HomologyInstance &inst, Coefficients c, int m, int q, const HomologyOptions &options)
{
    HomologyReport R;
    R.q = q;
    R.coefficients = c;
    R.m = m;
    R.D = inst.spec.field.D;
    R.level = inst.level_text;
    R.engine = engine_name(options.engine);
    R.index = inst.model.table.cosets;
    R.projective = inst.model.table.projective;
    R.parent_generators = inst.model.presentation.generator_count();
    R.parent_relators = inst.model.presentation.relators.size();
    R.schreier_generators = inst.simplified.schreier_count;
    R.subgroup_generators = inst.simplified.generator_words.size();
    R.coefficient_rank = coefficient_rank(c, m);
    R.torsion_free = inst.torsion_free.status == TorsionFreeStatus::CertifiedTorsionFree;
    R.torsion_free_reason = inst.torsion_free.reason;
    return R;
}

struct Computation {
    HomologyReport report;
    /// Smith form of d2 with the extra rows appended, when requested.
    std::optional<SNFResult> stacked;
};

template <class E> bool rows_fit64(const SparseRows<Integer> &rows)
{
    if constexpr (std::is_same_v<E, Integer>)
        return true;
    for (const auto &row : rows)
        for (const auto &e : row)
            if (!e.second.fits_slong_p())
                return false;
    return true;
}

template <class E>
Computation compute(const HomologyInstance &inst, const ComplexData &d, const std::vector<std::vector<FoxTerm>> &terms,
                    Coefficients c, int m, int q, const HomologyOptions &options, const SparseRows<Integer> *extra)
{
    auto start = Clock::now();
    Computation out;
    auto &R = out.report;
    R = base_report(inst, c, m, q, options);
    std::size_t c0 = d.cosets * d.n, c1 = d.generators * d.cosets * d.n, c2 = d.relators.size() * d.cosets * d.n;
    R.chain_dims[0] = c0;
    R.chain_dims[1] = c1;
    R.chain_dims[2] = c2;

    auto d1 = build_d1<E>(d);
    SparseRows<E> d2;
    if (q == 1) {
        d2 = build_d2<E>(d, terms);
        R.composite_zero = product_is_zero(d2, d1, c0);
        if (!R.composite_zero)
            throw ArithmeticError("boundary composite d2 d1 is not zero: presentation or evaluation bug");
        if (extra && !product_is_zero(*extra, d1, c0))
            throw ArithmeticError("peripheral chain is not a cycle");
    } else {
        R.composite_zero = true;
    }
    R.seconds_build = since(start);

    auto snf_start = Clock::now();
    auto M1 = as_matrix(std::move(d1), c0);
    auto s1 = smith_normal_form(M1, options.snf);
    R.rank_d1 = s1.rank;
    for (auto p : options.check_primes)
        if (rank_mod_p(M1, p) != s1.rank - count_divisible(s1.torsion, p))
            throw ArithmeticError("rank of d1 mod " + std::to_string(p) + " disagrees with its Smith form");
    if (q == 0) {
        R.free_rank = c0 - s1.rank;
        R.divisors = s1.torsion;
        R.unit_divisors = s1.unit_divisors;
        R.snf = s1.stats;
        if (m >= 1 && c != Coefficients::Trivial && R.free_rank != 0)
            throw ArithmeticError("H_0 has positive free rank for m >= 1");
    } else {
        if (extra) {
            if (rows_fit64<E>(*extra)) {
                SparseRows<E> stacked = d2;
                for (const auto &row : *extra) {
                    std::vector<std::pair<std::uint32_t, E>> r;
                    for (const auto &[col, v] : row)
                        r.emplace_back(col, convert<E>(v));
                    stacked.push_back(std::move(r));
                }
                out.stacked = smith_normal_form(as_matrix(std::move(stacked), c1), options.snf);
            } else {
                SparseMatrix stacked;
                stacked.cols = c1;
                for (const auto &row : d2) {
                    std::vector<std::pair<std::uint32_t, Integer>> r;
                    for (const auto &[col, v] : row)
                        r.emplace_back(col, Integer(v));
                    stacked.rows.push_back(std::move(r));
                }
                for (const auto &row : *extra)
                    stacked.rows.push_back(row);
                out.stacked = smith_normal_form(stacked, options.snf);
            }
        }
        auto M2 = as_matrix(std::move(d2), c1);
        auto s2 = smith_normal_form(M2, options.snf);
        R.rank_d2 = s2.rank;
        for (auto p : options.check_primes)
            if (rank_mod_p(M2, p) != s2.rank - count_divisible(s2.torsion, p))
                throw ArithmeticError("rank of d2 mod " + std::to_string(p) + " disagrees with its Smith form");
        R.free_rank = c1 - s2.rank - s1.rank;
        R.divisors = s2.torsion;
        R.unit_divisors = s2.unit_divisors;
        R.snf = s2.stats;
    }
    R.checked_primes = options.check_primes;
    R.torsion_order = torsion_order(R.divisors);
    R.log_torsion = log_torsion(R.divisors);
    R.seconds_snf = since(snf_start);
    R.seconds_total = since(start);
    return out;
}

Computation run(const HomologyInstance &inst, Coefficients c, int m, int q, const HomologyOptions &options,
                const SparseRows<Integer> *extra = nullptr)
{
    if (c != Coefficients::Trivial && m < (q == 0 ? 1 : 0))
        throw std::invalid_argument("H_0 needs m >= 1");
    check_cap(inst, c, m, options);
    auto d = complex_for(inst, c, m, options.engine);
    std::vector<std::vector<FoxTerm>> terms;
    if (q == 1)
        for (const auto &r : d.relators)
            terms.push_back(relator_terms(d, r));
    if (fits64(terms, d) && !options.snf.force_bignum)
        return compute<std::int64_t>(inst, d, terms, c, m, q, options, extra);
    return compute<Integer>(inst, d, terms, c, m, q, options, extra);
}

std::int64_t lattice_norm(const FieldDescriptor &F, std::int64_t x, std::int64_t y)
{
    return norm(F, RingElement{x, y}).get_si();
}

} // namespace

HomologyReport homology_h1(const HomologyInstance &inst, Coefficients c, int m, const HomologyOptions &options)
{
    return run(inst, c, m, 1, options).report;
}

HomologyReport homology_h0(const HomologyInstance &inst, Coefficients c, int m, const HomologyOptions &options)
{
    return run(inst, c, m, 0, options).report;
}

AbelianGroup subgroup_abelianization(const HomologyInstance &inst)
{
    auto g = inst.simplified.generator_words.size();
    auto r = smith_normal_form(exponent_sum_matrix(g, inst.simplified.relators));
    return {g - r.rank, r.torsion};
}

std::vector<PeripheralCycle> peripheral_cycles(const HomologyInstance &inst)
{
    const auto &F = inst.spec.field;
    const auto &T = inst.model.table;
    const auto &P = inst.model.presentation;
    const auto &space = inst.model.space;
    const auto &G = space.group();
    auto parent_cusps = bianchi_cusps(F);
    if (parent_cusps.size() != 1)
        throw ArithmeticError("peripheral cycles are implemented for class number one only");
    if (P.t_index < 0 || P.u_index < 0)
        throw ArithmeticError("presentation lacks the translation generators");

    std::unordered_map<std::uint64_t, std::uint32_t> index_of;
    for (std::uint32_t c = 0; c < T.cosets; ++c)
        index_of.emplace(T.representatives[c].key(), c);
    std::vector<MatMod> stabilizer{G.reduce(translation(RingElement(1))), G.reduce(translation(omega_element())),
                                   G.minus_identity()};
    for (const auto &u : parent_cusps[0].unit_generators)
        stabilizer.push_back(G.reduce(u));
    auto act = [&](std::uint32_t c, const MatMod &g) {
        return index_of.at(space.canonical(G.mul(T.representatives[c], g)).key());
    };

    int t_letter = P.t_index + 1, u_letter = P.u_index + 1;
    std::vector<char> seen(T.cosets, 0);
    std::vector<PeripheralCycle> out;
    for (std::uint32_t start = 0; start < T.cosets; ++start) {
        if (seen[start])
            continue;
        std::vector<std::uint32_t> stack{start};
        seen[start] = 1;
        while (!stack.empty()) {
            auto c = stack.back();
            stack.pop_back();
            for (const auto &g : stabilizer) {
                auto k = act(c, g);
                if (!seen[k]) {
                    seen[k] = 1;
                    stack.push_back(k);
                }
            }
        }
        // Translation lattice of the coset: (x, y) with start t^x u^y = start.
        std::map<std::uint32_t, std::int64_t> t_orbit;
        std::uint32_t k = start;
        std::int64_t a = 0;
        do {
            t_orbit.emplace(k, a);
            k = T.act(k, t_letter);
            ++a;
        } while (k != start);
        std::int64_t b = 0, s = 0;
        k = start;
        while (true) {
            k = T.act(k, u_letter);
            ++b;
            auto it = t_orbit.find(k);
            if (it != t_orbit.end()) {
                s = -it->second;
                break;
            }
        }
        // Lagrange reduction of {(a,0), (s,b)} for the norm form, then a
        // bounded search for the shortest vector with lexicographic ties.
        std::array<std::int64_t, 2> v1{a, 0}, v2{s, b};
        auto Q = [&](const std::array<std::int64_t, 2> &v) { return lattice_norm(F, v[0], v[1]); };
        while (true) {
            if (Q(v2) < Q(v1))
                std::swap(v1, v2);
            // Nearest integer to B(v1, v2) / Q(v1) via a short scan.
            std::int64_t best_k = 0, best_q = Q(v2);
            std::int64_t q1 = Q(v1);
            std::int64_t span = 1 + Q(v2) / std::max<std::int64_t>(q1, 1);
            for (std::int64_t kk = -span; kk <= span; ++kk) {
                std::array<std::int64_t, 2> w{v2[0] - kk * v1[0], v2[1] - kk * v1[1]};
                if (Q(w) < best_q) {
                    best_q = Q(w);
                    best_k = kk;
                }
            }
            if (best_k == 0)
                break;
            v2 = {v2[0] - best_k * v1[0], v2[1] - best_k * v1[1]};
        }
        std::array<std::int64_t, 2> best{0, 0};
        std::int64_t best_q = -1;
        for (std::int64_t i = -3; i <= 3; ++i)
            for (std::int64_t j = -3; j <= 3; ++j) {
                std::array<std::int64_t, 2> w{i * v1[0] + j * v2[0], i * v1[1] + j * v2[1]};
                if (w[0] == 0 && w[1] == 0)
                    continue;
                auto q = Q(w);
                if (best_q < 0 || q < best_q || (q == best_q && w < best)) {
                    best = w;
                    best_q = q;
                }
            }

        PeripheralCycle pc;
        pc.cusp = out.size();
        pc.coset = start;
        pc.x = best[0];
        pc.y = best[1];
        Word tr = T.transversal(start);
        Word body = concat(word_power(Word{t_letter}, best[0]), word_power(Word{u_letter}, best[1]));
        pc.word = free_reduce(concat(concat(tr, body), inverse_word(tr)));
        pc.matrix = evaluate(F, P.generators, pc.word);
        if (T.act(0, pc.word) != 0)
            throw ArithmeticError("peripheral word does not fix the base coset");
        MatMod red = G.reduce(pc.matrix);
        if (!space.subgroup_contains(red) && !(space.projective() && space.subgroup_contains(G.negate(red))))
            throw ArithmeticError("peripheral word is not in the subgroup");
        out.push_back(std::move(pc));
    }
    return out;
}

BoundaryIndexReport boundary_image_index(const HomologyInstance &inst, int m, const HomologyOptions &options)
{
    if (m < 1)
        throw std::invalid_argument("boundary index needs m >= 1");
    const auto &F = inst.spec.field;
    const auto &T = inst.model.table;
    const auto &P = inst.model.presentation;
    BoundaryIndexReport B;
    B.m = m;
    B.cycles = peripheral_cycles(inst);
    B.kappa = B.cycles.size();
    auto cusp = bianchi_cusps(F)[0];
    auto iv = invariant_vectors(F, cusp, 0, m);
    auto d = complex_for(inst, Coefficients::L, m, options.engine);
    const std::size_t n = d.n;

    SparseRows<Integer> tracked; // peripheral chains, appended to d2
    for (const auto &pc : B.cycles) {
        Mat2 Tc = evaluate(F, P.generators, T.transversal(pc.coset));
        IntMatrix back = right_action(F, inverse_sl2(F, Tc), m, Coefficients::L);
        Word word = options.engine == HomologyEngine::CosetComplex
                        ? pc.word
                        : rewrite_in_subgroup(inst.model, inst.simplified, pc.word);
        for (const auto *omega : {&iv.omega, &iv.omega_prime}) {
            IntMatrix v(1, n);
            for (std::size_t i = 0; i < n; ++i)
                v(0, i) = (*omega)[i];
            v = v * back;
            std::map<std::uint32_t, Integer> acc;
            IntMatrix cur = v;
            std::uint32_t k = 0;
            for (int l : word) {
                auto x = static_cast<std::size_t>(letter_generator(l));
                if (l > 0) {
                    for (std::size_t i = 0; i < n; ++i)
                        acc[d.c1_column(x, k, i)] += cur(0, i);
                    cur = cur * d.fwd[x];
                    k = d.act(k, l);
                } else {
                    cur = cur * d.inv[x];
                    k = d.act(k, l);
                    for (std::size_t i = 0; i < n; ++i)
                        acc[d.c1_column(x, k, i)] -= cur(0, i);
                }
            }
            std::vector<std::pair<std::uint32_t, Integer>> row;
            for (auto &[col, val] : acc)
                if (val != 0)
                    row.emplace_back(col, val);
            tracked.push_back(std::move(row));
        }
        B.clearing_scalars.push_back(iv.clearing_scalar);
    }

    // With P the peripheral span and S the saturation of im d2, P meets S
    // trivially when P has full rank in H_1 free; then
    //   |tors coker [d2; P]| = [H_1 free : P] * |H_1 tors|.
    auto comp = run(inst, Coefficients::L, m, 1, options, &tracked);
    B.h1_L = comp.report;
    B.rank_h1 = comp.report.free_rank;
    const auto &st = *comp.stacked;
    B.peripheral_rank = st.rank - comp.report.rank_d2;
    B.full_rank = B.peripheral_rank == 2 * B.kappa && B.rank_h1 == 2 * B.kappa;
    if (B.full_rank) {
        Integer stacked_order = torsion_order(st.torsion);
        if (!mpz_divisible_p(stacked_order.get_mpz_t(), comp.report.torsion_order.get_mpz_t()))
            throw ArithmeticError("peripheral index is not integral");
        B.index = stacked_order / comp.report.torsion_order;
    }
    B.h1_Ldual = homology_h1(inst, Coefficients::Ldual, m, options);
    B.dual_torsion_order = B.h1_Ldual.torsion_order;
    B.inequality_holds = B.full_rank && B.index <= B.dual_torsion_order;
    return B;
}

} // namespace bianchi
