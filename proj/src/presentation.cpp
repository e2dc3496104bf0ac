#include "bianchi/presentation.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <queue>
#include <sstream>
#include <unordered_map>

namespace bianchi {

Word inverse_word(const Word &w)
{
    Word out(w.rbegin(), w.rend());
    for (auto &l : out)
        l = -l;
    return out;
}

Word free_reduce(const Word &w)
{
    Word out;
    out.reserve(w.size());
    for (int l : w) {
        if (!out.empty() && out.back() == -l)
            out.pop_back();
        else
            out.push_back(l);
    }
    return out;
}

Word cyclic_reduce(const Word &w)
{
    Word r = free_reduce(w);
    std::size_t i = 0, j = r.size();
    while (j - i >= 2 && r[i] == -r[j - 1]) {
        ++i;
        --j;
    }
    return Word(r.begin() + static_cast<std::ptrdiff_t>(i), r.begin() + static_cast<std::ptrdiff_t>(j));
}

Word concat(const Word &a, const Word &b)
{
    Word out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Word word_power(const Word &w, long n)
{
    Word base = n < 0 ? inverse_word(w) : w;
    Word out;
    for (long k = 0; k < (n < 0 ? -n : n); ++k)
        out.insert(out.end(), base.begin(), base.end());
    return out;
}

Mat2 evaluate(const FieldDescriptor &F, const std::vector<Mat2> &generators, const Word &w)
{
    Mat2 x = Mat2::identity();
    for (int l : w) {
        const Mat2 &g = generators.at(static_cast<std::size_t>(letter_generator(l)));
        x = mul(F, x, l > 0 ? g : inverse_sl2(F, g));
    }
    return x;
}

std::string format_word(const GroupPresentation &P, const Word &w)
{
    std::string out;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (i)
            out += ' ';
        out += P.names.at(static_cast<std::size_t>(letter_generator(w[i])));
        if (w[i] < 0)
            out += "^-1";
    }
    return out;
}

Word parse_word(const GroupPresentation &P, const std::string &text)
{
    std::istringstream in(text);
    std::string tok;
    Word w;
    while (in >> tok) {
        std::string name = tok;
        long exponent = 1;
        auto caret = tok.find('^');
        if (caret != std::string::npos) {
            name = tok.substr(0, caret);
            try {
                std::size_t used = 0;
                exponent = std::stol(tok.substr(caret + 1), &used);
                if (used != tok.size() - caret - 1)
                    throw std::invalid_argument(tok);
            } catch (const std::exception &) {
                throw ArithmeticError("bad exponent in word token '" + tok + "'");
            }
        }
        auto it = std::find(P.names.begin(), P.names.end(), name);
        if (it == P.names.end())
            throw ArithmeticError("unknown generator '" + name + "' in word '" + text + "'");
        int letter = static_cast<int>(it - P.names.begin()) + 1;
        for (long k = 0; k < std::labs(exponent); ++k)
            w.push_back(exponent > 0 ? letter : -letter);
    }
    return w;
}

namespace {

void locate_translations(GroupPresentation &P)
{
    for (std::size_t i = 0; i < P.generators.size(); ++i) {
        if (P.generators[i] == translation(RingElement(1)))
            P.t_index = static_cast<int>(i);
        if (P.generators[i] == translation(omega_element()))
            P.u_index = static_cast<int>(i);
    }
}

void verify_relators(GroupPresentation &P)
{
    P.signs.clear();
    for (const auto &r : P.relators) {
        Mat2 v = evaluate(P.field, P.generators, r);
        if (v == Mat2::identity())
            P.signs.push_back(1);
        else if (v == Mat2::minus_identity() && P.projective)
            P.signs.push_back(-1);
        else
            throw ArithmeticError("relator '" + format_word(P, r) + "' of " + P.source + " evaluates to " +
                                  format_mat2(v));
    }
}

} // namespace

GroupPresentation parse_presentation(const std::string &text, const std::string &source)
{
    GroupPresentation P;
    P.source = source;
    P.projective = true;
    bool have_field = false;
    std::vector<std::string> relator_lines;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        std::istringstream ls(line);
        std::string kw;
        if (!(ls >> kw))
            continue;
        if (kw == "field") {
            std::int64_t D;
            if (!(ls >> D))
                throw ArithmeticError(source + ":" + std::to_string(lineno) + ": expected 'field D'");
            P.field = make_field(D);
            have_field = true;
        } else if (kw == "gen") {
            std::string name, mat;
            if (!(ls >> name >> mat))
                throw ArithmeticError(source + ":" + std::to_string(lineno) + ": expected 'gen NAME a,b;c,d'");
            if (!have_field)
                throw ArithmeticError(source + ": 'field' must precede generators");
            Mat2 g = parse_mat2(mat);
            if (det(P.field, g) != RingElement(1))
                throw ArithmeticError(source + ": generator " + name + " does not have determinant 1");
            P.names.push_back(name);
            P.generators.push_back(g);
        } else if (kw == "rel") {
            std::string rest;
            std::getline(ls, rest);
            relator_lines.push_back(rest);
        } else {
            throw ArithmeticError(source + ":" + std::to_string(lineno) + ": unknown keyword '" + kw + "'");
        }
    }
    if (!have_field || P.generators.empty())
        throw ArithmeticError(source + ": presentation needs a field and generators");
    for (const auto &r : relator_lines)
        P.relators.push_back(parse_word(P, r));
    verify_relators(P);
    locate_translations(P);
    return P;
}

std::string presentation_directory()
{
    if (const char *env = std::getenv("BIANCHI_DATA"))
        return std::string(env) + "/presentations";
#ifdef BIANCHI_DATA_DIR
    return std::string(BIANCHI_DATA_DIR) + "/presentations";
#else
    return "data/presentations";
#endif
}

GroupPresentation load_presentation(std::int64_t D)
{
    std::string path = presentation_directory() + "/D" + std::to_string(D) + ".txt";
    std::ifstream f(path);
    if (!f)
        throw ArithmeticError("no presentation data for D=" + std::to_string(D) + " (looked for " + path + ")");
    std::stringstream buf;
    buf << f.rdbuf();
    auto P = parse_presentation(buf.str(), path);
    if (P.field.D != D)
        throw ArithmeticError(path + " describes D=" + std::to_string(P.field.D));
    return P;
}

GroupPresentation sl2_presentation(const GroupPresentation &psl)
{
    if (!psl.projective)
        return psl;
    GroupPresentation P = psl;
    P.projective = false;
    P.source = psl.source + " (SL2 lift)";
    int a = -1;
    for (std::size_t i = 0; i < P.generators.size(); ++i)
        if (mul(P.field, P.generators[i], P.generators[i]) == Mat2::minus_identity()) {
            a = static_cast<int>(i);
            break;
        }
    if (a < 0)
        throw ArithmeticError("SL2 lift needs a generator squaring to -I");
    Word z{a + 1, a + 1};
    Word zinv = inverse_word(z);
    P.relators.clear();
    for (std::size_t i = 0; i < psl.relators.size(); ++i) {
        Word r = psl.signs[i] < 0 ? free_reduce(concat(psl.relators[i], zinv)) : psl.relators[i];
        if (!cyclic_reduce(r).empty())
            P.relators.push_back(r);
    }
    P.relators.push_back(concat(z, z));
    for (std::size_t g = 0; g < P.generators.size(); ++g) {
        if (static_cast<int>(g) == a)
            continue;
        Word gw{static_cast<int>(g) + 1};
        P.relators.push_back(concat(concat(z, gw), concat(zinv, inverse_word(gw))));
    }
    verify_relators(P);
    return P;
}

IntMatrix exponent_sum_matrix(std::size_t generators, const std::vector<Word> &relators)
{
    IntMatrix M(relators.size(), generators);
    for (std::size_t r = 0; r < relators.size(); ++r)
        for (int l : relators[r])
            M(r, static_cast<std::size_t>(letter_generator(l))) += letter_sign(l);
    return M;
}

Word CosetTable::transversal(std::uint32_t c) const
{
    Word w;
    std::int64_t cur = c;
    while (parent[static_cast<std::size_t>(cur)] >= 0) {
        w.push_back(parent_letter[static_cast<std::size_t>(cur)]);
        cur = parent[static_cast<std::size_t>(cur)];
    }
    std::reverse(w.begin(), w.end());
    return w;
}

CosetTable build_coset_table(const GroupPresentation &P, const CosetSpace &space)
{
    if (P.projective != space.projective())
        throw ArithmeticError("coset space and presentation disagree on PSL2 versus SL2");
    const auto &G = space.group();
    CosetTable T;
    T.projective = space.projective();
    T.generators = P.generator_count();
    std::vector<MatMod> gens;
    for (const auto &g : P.generators)
        gens.push_back(G.reduce(g));
    std::unordered_map<std::uint64_t, std::uint32_t> index_of;
    MatMod base = space.canonical(G.identity());
    T.representatives.push_back(base);
    T.parent.push_back(-1);
    T.parent_letter.push_back(0);
    index_of.emplace(base.key(), 0);
    for (std::size_t c = 0; c < T.representatives.size(); ++c) {
        for (std::size_t x = 0; x < gens.size(); ++x) {
            MatMod y = space.canonical(G.mul(T.representatives[c], gens[x]));
            auto [it, inserted] = index_of.emplace(y.key(), static_cast<std::uint32_t>(T.representatives.size()));
            if (inserted) {
                T.representatives.push_back(y);
                T.parent.push_back(static_cast<std::int64_t>(c));
                T.parent_letter.push_back(static_cast<int>(x) + 1);
            }
            T.forward.push_back(it->second);
        }
    }
    T.cosets = T.representatives.size();
    if (Integer(static_cast<unsigned long>(T.cosets)) != space.index())
        throw ArithmeticError("coset graph is not transitive: reached " + std::to_string(T.cosets) +
                              " cosets of " + space.index().get_str());
    T.backward.assign(T.forward.size(), UINT32_MAX);
    for (std::size_t c = 0; c < T.cosets; ++c)
        for (std::size_t x = 0; x < T.generators; ++x) {
            auto &slot = T.backward[T.forward[c * T.generators + x] * T.generators + x];
            if (slot != UINT32_MAX)
                throw ArithmeticError("generator action on cosets is not a permutation");
            slot = static_cast<std::uint32_t>(c);
        }
    return T;
}

SubgroupModel make_subgroup_model(const GroupPresentation &psl, const SubgroupSpec &spec)
{
    if (psl.field.D != spec.field.D)
        throw ArithmeticError("presentation and subgroup live over different fields");
    CosetSpace projective(spec, true);
    if (!projective.contains_minus_identity() && psl.projective) {
        auto table = build_coset_table(psl, projective);
        return SubgroupModel{psl, std::move(projective), std::move(table)};
    }
    GroupPresentation sl = sl2_presentation(psl);
    CosetSpace plain(spec, false);
    auto table = build_coset_table(sl, plain);
    return SubgroupModel{std::move(sl), std::move(plain), std::move(table)};
}

namespace {

struct TietzeState {
    std::vector<Word> relators;
    std::vector<bool> relator_alive;
    std::vector<int> version;
    std::vector<std::vector<std::size_t>> occurrences; // generator -> relators (may be stale)
    std::vector<bool> generator_alive;
    std::size_t live_generators = 0;
    std::size_t live_relators = 0;

    void index_relator(std::size_t r)
    {
        for (int l : relators[r])
            occurrences[static_cast<std::size_t>(letter_generator(l))].push_back(r);
    }
};

/// Generator occurring exactly once in r, preferring the one with fewest uses overall.
int single_occurrence(const TietzeState &S, const Word &r)
{
    std::unordered_map<int, int> count;
    for (int l : r)
        ++count[letter_generator(l)];
    int best = -1;
    std::size_t best_uses = SIZE_MAX;
    for (int l : r) {
        int g = letter_generator(l);
        if (count[g] != 1)
            continue;
        std::size_t uses = S.occurrences[static_cast<std::size_t>(g)].size();
        if (uses < best_uses) {
            best = g;
            best_uses = uses;
        }
    }
    return best;
}

} // namespace

// Schreier generators: non-tree pairs (c, x), numbered in order.
static std::vector<std::int64_t> schreier_ids(const CosetTable &T, std::vector<std::pair<std::uint32_t, int>> *pairs)
{
    std::size_t g = T.generators;
    std::vector<std::int64_t> sid(T.cosets * g, -1);
    std::int64_t next = 0;
    for (std::size_t c = 0; c < T.cosets; ++c)
        for (std::size_t x = 0; x < g; ++x) {
            std::uint32_t d = T.forward[c * g + x];
            bool tree = T.parent[d] == static_cast<std::int64_t>(c) && T.parent_letter[d] == static_cast<int>(x) + 1;
            if (!tree) {
                sid[c * g + x] = next++;
                if (pairs)
                    pairs->emplace_back(static_cast<std::uint32_t>(c), static_cast<int>(x));
            }
        }
    return sid;
}

SubgroupPresentation subgroup_presentation(const SubgroupModel &model, bool simplify, const TietzeOptions &options)
{
    const auto &P = model.presentation;
    const auto &T = model.table;
    const auto &F = P.field;
    SubgroupPresentation S;
    S.index = T.cosets;
    S.parent_generators = P.generator_count();

    std::size_t g = T.generators;
    std::vector<std::pair<std::uint32_t, int>> pairs;
    auto sid = schreier_ids(T, &pairs);
    S.schreier_count = pairs.size();
    if (S.schreier_count != T.cosets * (g - 1) + 1)
        throw ArithmeticError("Schreier generator count violates the index formula");

    TietzeState st;
    st.occurrences.resize(pairs.size());
    st.generator_alive.assign(pairs.size(), true);
    st.live_generators = pairs.size();
    for (std::size_t r = 0; r < P.relators.size(); ++r)
        for (std::size_t c = 0; c < T.cosets; ++c) {
            Word w;
            std::uint32_t cur = static_cast<std::uint32_t>(c);
            for (int l : P.relators[r]) {
                auto x = static_cast<std::size_t>(letter_generator(l));
                if (l > 0) {
                    if (sid[cur * g + x] >= 0)
                        w.push_back(static_cast<int>(sid[cur * g + x]) + 1);
                    cur = T.forward[cur * g + x];
                } else {
                    cur = T.backward[cur * g + x];
                    if (sid[cur * g + x] >= 0)
                        w.push_back(-(static_cast<int>(sid[cur * g + x]) + 1));
                }
            }
            if (cur != c)
                throw ArithmeticError("relator does not close up on the coset graph");
            w = cyclic_reduce(w);
            if (!w.empty())
                st.relators.push_back(std::move(w));
        }
    S.stats.generators_before = pairs.size();
    S.stats.relators_before = st.relators.size();
    st.relator_alive.assign(st.relators.size(), true);
    st.version.assign(st.relators.size(), 0);
    st.live_relators = st.relators.size();
    for (std::size_t r = 0; r < st.relators.size(); ++r)
        st.index_relator(r);

    if (simplify) {
        static const std::size_t thresholds[] = {1, 2, 3, 4, 6, 8, 12, 16, 24, 32, 48, 64, 96, 128};
        int passes = std::min<int>(options.max_passes, static_cast<int>(std::size(thresholds)));
        for (int pass = 0; pass < passes; ++pass) {
            S.stats.passes = pass + 1;
            std::size_t limit = thresholds[pass];
            using Item = std::tuple<std::size_t, std::size_t, int>;
            std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
            for (std::size_t r = 0; r < st.relators.size(); ++r)
                if (st.relator_alive[r] && st.relators[r].size() <= limit)
                    queue.emplace(st.relators[r].size(), r, st.version[r]);
            bool progress = false;
            while (!queue.empty()) {
                auto [len, r, ver] = queue.top();
                queue.pop();
                if (!st.relator_alive[r] || st.version[r] != ver)
                    continue;
                const Word R = st.relators[r];
                int x = single_occurrence(st, R);
                if (x < 0)
                    continue;
                // R = A x^e B  =>  x = A^-1 B^-1 (e = 1) or x = B A (e = -1).
                std::size_t pos = 0;
                while (letter_generator(R[pos]) != x)
                    ++pos;
                Word A(R.begin(), R.begin() + static_cast<std::ptrdiff_t>(pos));
                Word B(R.begin() + static_cast<std::ptrdiff_t>(pos) + 1, R.end());
                Word value = R[pos] > 0 ? free_reduce(concat(inverse_word(A), inverse_word(B))) : free_reduce(concat(B, A));
                Word value_inv = inverse_word(value);
                // Check the length cap before committing.
                std::vector<std::size_t> targets;
                bool too_long = false;
                for (std::size_t q : st.occurrences[static_cast<std::size_t>(x)]) {
                    if (q == r || !st.relator_alive[q])
                        continue;
                    if (!targets.empty() && targets.back() == q)
                        continue;
                    std::size_t hits = std::count_if(st.relators[q].begin(), st.relators[q].end(),
                                                     [&](int l) { return letter_generator(l) == x; });
                    if (hits == 0)
                        continue;
                    if (st.relators[q].size() + hits * (value.size() ? value.size() - 1 : 0) > options.max_relator_length)
                        too_long = true;
                    targets.push_back(q);
                }
                if (too_long)
                    continue;
                std::sort(targets.begin(), targets.end());
                targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
                st.relator_alive[r] = false;
                --st.live_relators;
                st.generator_alive[static_cast<std::size_t>(x)] = false;
                --st.live_generators;
                S.eliminations.emplace_back(static_cast<std::size_t>(x), value);
                for (std::size_t q : targets) {
                    Word nw;
                    for (int l : st.relators[q]) {
                        if (letter_generator(l) == x) {
                            const Word &sub = l > 0 ? value : value_inv;
                            nw.insert(nw.end(), sub.begin(), sub.end());
                        } else {
                            nw.push_back(l);
                        }
                    }
                    nw = cyclic_reduce(nw);
                    st.relators[q] = std::move(nw);
                    ++st.version[q];
                    if (st.relators[q].empty()) {
                        st.relator_alive[q] = false;
                        --st.live_relators;
                        continue;
                    }
                    st.index_relator(q);
                    if (st.relators[q].size() <= limit)
                        queue.emplace(st.relators[q].size(), q, st.version[q]);
                }
                st.occurrences[static_cast<std::size_t>(x)].clear();
                progress = true;
            }
            (void)progress;
            // Compact occurrence lists now and then.
            for (auto &occ : st.occurrences) {
                std::sort(occ.begin(), occ.end());
                occ.erase(std::unique(occ.begin(), occ.end()), occ.end());
                occ.erase(std::remove_if(occ.begin(), occ.end(), [&](std::size_t q) { return !st.relator_alive[q]; }),
                          occ.end());
            }
        }
    }

    // Renumber survivors.
    std::vector<int> new_id(pairs.size(), -1);
    for (std::size_t s = 0; s < pairs.size(); ++s)
        if (st.generator_alive[s]) {
            new_id[s] = static_cast<int>(S.remaining.size());
            S.remaining.push_back(s);
        }
    for (std::size_t r = 0; r < st.relators.size(); ++r) {
        if (!st.relator_alive[r])
            continue;
        Word w;
        for (int l : st.relators[r]) {
            int id = new_id[static_cast<std::size_t>(letter_generator(l))];
            if (id < 0)
                throw ArithmeticError("internal error: eliminated generator left in a relator");
            w.push_back(l > 0 ? id + 1 : -(id + 1));
        }
        S.stats.total_length_after += w.size();
        S.relators.push_back(std::move(w));
    }
    for (std::size_t s : S.remaining) {
        auto [c, x] = pairs[s];
        std::uint32_t d = T.forward[c * g + static_cast<std::size_t>(x)];
        Word w = free_reduce(concat(concat(T.transversal(c), Word{x + 1}), inverse_word(T.transversal(d))));
        Mat2 m = evaluate(F, P.generators, w);
        MatMod red = model.space.group().reduce(m);
        bool in_h = model.space.subgroup_contains(red) ||
                    (model.space.projective() && model.space.subgroup_contains(model.space.group().negate(red)));
        if (!in_h)
            throw ArithmeticError("Schreier generator does not reduce into the subgroup image");
        S.generator_words.push_back(std::move(w));
        S.generator_matrices.push_back(m);
    }
    S.stats.generators_after = S.remaining.size();
    S.stats.relators_after = S.relators.size();
    return S;
}

Word rewrite_in_subgroup(const SubgroupModel &model, const SubgroupPresentation &S, const Word &w)
{
    const auto &T = model.table;
    std::size_t g = T.generators;
    auto sid = schreier_ids(T, nullptr);
    Word out;
    std::uint32_t cur = 0;
    for (int l : w) {
        auto x = static_cast<std::size_t>(letter_generator(l));
        if (l > 0) {
            if (sid[cur * g + x] >= 0)
                out.push_back(static_cast<int>(sid[cur * g + x]) + 1);
            cur = T.forward[cur * g + x];
        } else {
            cur = T.backward[cur * g + x];
            if (sid[cur * g + x] >= 0)
                out.push_back(-(static_cast<int>(sid[cur * g + x]) + 1));
        }
    }
    if (cur != 0)
        throw std::invalid_argument("rewrite_in_subgroup: word does not lie in the subgroup");
    out = free_reduce(out);
    for (const auto &[x, value] : S.eliminations) {
        Word next;
        for (int l : out) {
            if (static_cast<std::size_t>(letter_generator(l)) != x) {
                next.push_back(l);
                continue;
            }
            Word v = l > 0 ? value : inverse_word(value);
            next.insert(next.end(), v.begin(), v.end());
        }
        out = free_reduce(next);
        if (out.size() > 10'000'000)
            throw ArithmeticError("rewrite_in_subgroup: word too long");
    }
    std::vector<int> new_id(S.schreier_count, -1);
    for (std::size_t k = 0; k < S.remaining.size(); ++k)
        new_id[S.remaining[k]] = static_cast<int>(k);
    for (int &l : out) {
        int id = new_id[static_cast<std::size_t>(letter_generator(l))];
        if (id < 0)
            throw ArithmeticError("rewrite_in_subgroup: eliminated generator survived");
        l = l > 0 ? id + 1 : -(id + 1);
    }
    return out;
}

} // namespace bianchi
