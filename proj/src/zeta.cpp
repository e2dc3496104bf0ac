#include "bianchi/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numbers>
#include <stdexcept>

namespace bianchi {

namespace {

using cld = std::complex<long double>;

struct Letter {
    int letter;
    Mat2 matrix;
};

std::vector<Letter> alphabet(const FieldDescriptor &F, const std::vector<Mat2> &generators)
{
    std::vector<Letter> out;
    for (std::size_t i = 0; i < generators.size(); ++i) {
        out.push_back({static_cast<int>(i) + 1, generators[i]});
        out.push_back({-(static_cast<int>(i) + 1), inverse_sl2(F, generators[i])});
    }
    return out;
}

// Position of a letter in the alphabet order used for canonical rotations.
int letter_key(int l) { return l > 0 ? 2 * (l - 1) : 2 * (-l - 1) + 1; }

bool cyclically_reduced(const Word &w) { return w.size() < 2 || w.front() != -w.back(); }

bool minimal_rotation(const Word &w)
{
    std::size_t n = w.size();
    for (std::size_t r = 1; r < n; ++r)
        for (std::size_t i = 0; i < n; ++i) {
            int a = letter_key(w[i]), b = letter_key(w[(i + r) % n]);
            if (b < a)
                return false;
            if (b > a)
                break;
        }
    return true;
}

// Number of repetitions of the shortest period of w.
int word_period_count(const Word &w)
{
    std::size_t n = w.size();
    for (std::size_t p = 1; p <= n / 2; ++p) {
        if (n % p != 0)
            continue;
        bool periodic = true;
        for (std::size_t i = p; i < n && periodic; ++i)
            periodic = w[i] == w[i - p];
        if (periodic)
            return static_cast<int>(n / p);
    }
    return 1;
}

RingElement sign_normalized(const RingElement &t) { return t < -t ? -t : t; }

bool equal_up_to_sign(const Mat2 &a, const Mat2 &b) { return a == b || a == -b; }

double angle_mod_pi(double x)
{
    double r = std::remainder(x, std::numbers::pi);
    return std::fabs(r);
}

} // namespace

std::optional<ConjugacyClassRecord> classify_loxodromic(const FieldDescriptor &F, const Mat2 &g)
{
    RingElement t = trace(g);
    if (is_real_in_closed_interval(F, t, -2, 2))
        return std::nullopt;
    auto tc = to_complex(F, t);
    cld T(tc.real(), tc.imag());
    cld root = std::sqrt(T * T - 4.0L);
    cld l1 = (T + root) / 2.0L, l2 = (T - root) / 2.0L;
    cld lambda = std::abs(l1) >= std::abs(l2) ? l1 : l2;
    long double eps = std::numeric_limits<long double>::epsilon();
    long double residual = std::abs(lambda + 1.0L / lambda - T);
    long double slope = std::abs(1.0L - 1.0L / (lambda * lambda));
    ConjugacyClassRecord rec;
    rec.matrix = g;
    rec.trace = t;
    rec.lambda = {static_cast<double>(lambda.real()), static_cast<double>(lambda.imag())};
    rec.lambda_error = static_cast<double>((residual + 16 * eps * (std::abs(T) + 2)) / slope) +
                       4 * std::numeric_limits<double>::epsilon() * std::abs(rec.lambda);
    rec.length = static_cast<double>(2 * std::log(std::abs(lambda)));
    rec.holonomy = static_cast<double>(std::arg(lambda));
    return rec;
}

double calibrate_counting_constant(const std::vector<ConjugacyClassRecord> &classes)
{
    std::vector<double> lengths;
    for (const auto &c : classes)
        lengths.push_back(c.length);
    std::sort(lengths.begin(), lengths.end());
    double best = 0;
    for (std::size_t i = 0; i < lengths.size(); ++i) {
        std::size_t j = i;
        while (j + 1 < lengths.size() && lengths[j + 1] == lengths[i])
            ++j;
        best = std::max(best, static_cast<double>(j + 1) * std::exp(-2 * lengths[i]));
    }
    return best;
}

double tail_bound(double c_X, double R, double s)
{
    if (s <= 2)
        throw std::invalid_argument("tail bound needs s > 2");
    if (c_X == 0)
        return 0;
    return s * c_X * std::exp((2 - s) * R) / (s - 2);
}

namespace {

void finish_table(GeodesicTable &T, const std::optional<double> &reference)
{
    std::stable_sort(T.classes.begin(), T.classes.end(),
                     [](const auto &a, const auto &b) { return a.length < b.length; });
    T.min_length.reset();
    if (!T.classes.empty())
        T.min_length = T.classes.front().length;
    if (reference) {
        for (std::size_t i = 0; i < T.classes.size(); ++i)
            if (static_cast<double>(i + 1) > *reference * std::exp(2 * T.classes[i].length) * (1 + 1e-12))
                T.counting_bound_violated = true;
    }
}

} // namespace

GeodesicTable enumerate_loxodromic(const FieldDescriptor &F, const std::vector<Mat2> &generators,
                                   const std::vector<std::string> &names, const EnumerationOptions &options)
{
    if (options.word_bound < 1)
        throw std::invalid_argument("word bound must be positive");
    GeodesicTable T;
    T.generator_names = names;
    T.cutoff = options.cutoff;
    T.word_bound = options.word_bound;
    T.dedup_policy = "trace bucket (up to sign), cyclic rotation, conjugation search up to length " +
                     std::to_string(options.conjugation_bound);
    auto letters = alphabet(F, generators);

    // Candidates: cyclically reduced words, minimal among their rotations.
    std::vector<ConjugacyClassRecord> candidates;
    Word w;
    std::vector<Mat2> prefix{Mat2::identity()};
    auto visit = [&](auto &&self) -> void {
        if (!w.empty()) {
            ++T.words_examined;
            if (cyclically_reduced(w) && minimal_rotation(w)) {
                if (auto rec = classify_loxodromic(F, prefix.back()); rec && rec->length <= options.cutoff) {
                    rec->word = w;
                    candidates.push_back(std::move(*rec));
                }
            }
        }
        if (static_cast<int>(w.size()) == options.word_bound)
            return;
        for (const auto &L : letters) {
            if (!w.empty() && w.back() == -L.letter)
                continue;
            w.push_back(L.letter);
            prefix.push_back(mul(F, prefix.back(), L.matrix));
            self(self);
            prefix.pop_back();
            w.pop_back();
        }
    };
    visit(visit);
    std::stable_sort(candidates.begin(), candidates.end(),
                     [](const auto &a, const auto &b) { return a.word.size() < b.word.size(); });

    // Conjugators h together with h^-1.
    std::vector<std::pair<Mat2, Mat2>> conjugators{{Mat2::identity(), Mat2::identity()}};
    {
        std::vector<std::pair<Word, std::pair<Mat2, Mat2>>> layer{{{}, {Mat2::identity(), Mat2::identity()}}};
        for (int len = 1; len <= options.conjugation_bound; ++len) {
            std::vector<std::pair<Word, std::pair<Mat2, Mat2>>> next;
            for (const auto &[word, mats] : layer)
                for (const auto &L : letters) {
                    if (!word.empty() && word.back() == -L.letter)
                        continue;
                    Word v = word;
                    v.push_back(L.letter);
                    Mat2 h = mul(F, mats.first, L.matrix);
                    Mat2 hinv = mul(F, inverse_sl2(F, L.matrix), mats.second);
                    next.push_back({v, {h, hinv}});
                    conjugators.emplace_back(h, hinv);
                }
            layer = std::move(next);
        }
    }

    std::map<RingElement, std::vector<std::size_t>> buckets;
    for (auto &cand : candidates) {
        auto &bucket = buckets[sign_normalized(cand.trace)];
        bool merged = false;
        for (std::size_t idx : bucket) {
            const Mat2 &B = T.classes[idx].matrix;
            for (const auto &[h, hinv] : conjugators)
                if (equal_up_to_sign(mul(F, mul(F, h, cand.matrix), hinv), B)) {
                    merged = true;
                    break;
                }
            if (merged)
                break;
        }
        if (merged)
            continue;
        if (!bucket.empty())
            ++T.possible_overcount;
        bucket.push_back(T.classes.size());
        T.classes.push_back(std::move(cand));
    }

    finish_table(T, options.reference_constant);

    // Multiplicities: periodic words, then powers of shorter classes.
    for (std::size_t i = 0; i < T.classes.size(); ++i) {
        auto &c = T.classes[i];
        int n = word_period_count(c.word);
        for (std::size_t j = 0; j < i; ++j) {
            const auto &c0 = T.classes[j];
            double ratio = c.length / c0.length;
            long k = std::lround(ratio);
            if (k < 2 || std::fabs(k * c0.length - c.length) > 1e-9 * (1 + c.length))
                continue;
            if (angle_mod_pi(k * c0.holonomy - c.holonomy) > 1e-9 * (1 + k))
                continue;
            if (sign_normalized(trace(power(F, c0.matrix, k))) != sign_normalized(c.trace))
                continue;
            n = std::max(n, static_cast<int>(k) * c0.multiplicity);
        }
        c.multiplicity = n;
    }
    T.c_X = calibrate_counting_constant(T.classes);
    return T;
}

GeodesicTable enumerate_loxodromic(const HomologyInstance &inst, const EnumerationOptions &options)
{
    const auto &F = inst.spec.field;
    GeodesicTable T;
    if (inst.model.table.cosets == 1) {
        const auto &P = inst.model.presentation;
        T = enumerate_loxodromic(F, P.generators, P.names, options);
    } else {
        std::vector<std::string> names;
        for (std::size_t i = 0; i < inst.simplified.generator_matrices.size(); ++i)
            names.push_back("s" + std::to_string(i + 1));
        T = enumerate_loxodromic(F, inst.simplified.generator_matrices, names, options);
    }
    T.subgroup = inst.level_text;
    return T;
}

GeodesicTable toy_table(const std::vector<std::tuple<double, double, int>> &classes, double c_X)
{
    GeodesicTable T;
    T.subgroup = "toy";
    T.dedup_policy = "explicit";
    T.complete = true;
    double cutoff = 0;
    for (const auto &[length, holonomy, n] : classes) {
        if (length <= 0 || n < 1)
            throw std::invalid_argument("toy class needs positive length and multiplicity");
        ConjugacyClassRecord rec;
        rec.length = length;
        rec.holonomy = holonomy;
        rec.multiplicity = n;
        rec.lambda = std::polar(std::exp(length / 2), holonomy);
        T.classes.push_back(rec);
        cutoff = std::max(cutoff, length);
    }
    T.cutoff = cutoff;
    T.c_X = c_X;
    finish_table(T, std::nullopt);
    return T;
}

GeodesicTable truncate(const GeodesicTable &table, double R)
{
    GeodesicTable T = table;
    T.classes.clear();
    for (const auto &c : table.classes)
        if (c.length <= R)
            T.classes.push_back(c);
    T.cutoff = std::min(R, table.cutoff);
    finish_table(T, std::nullopt);
    T.counting_bound_violated = table.counting_bound_violated;
    return T;
}

ZetaEvaluation log_ruelle(const GeodesicTable &table, double s, double k)
{
    if (!(s >= 3))
        throw std::invalid_argument("log_ruelle needs s >= 3");
    ZetaEvaluation Z;
    Z.s = s;
    Z.k = k;
    Z.cutoff = table.cutoff;
    Z.complete = table.complete;
    std::complex<double> sum = 0;
    for (const auto &c : table.classes) {
        if (c.length > table.cutoff)
            continue;
        sum += std::polar(1.0, 2 * k * c.holonomy) * std::exp(-s * c.length) / static_cast<double>(c.multiplicity);
        ++Z.classes_used;
    }
    Z.value = -sum;
    Z.tail_bound = tail_bound(table.c_X, table.cutoff, s);
    return Z;
}

CoveringCheck covering_bound_check(const GeodesicTable &table_X, const GeodesicTable &table_X0, double index,
                                   double s, double k)
{
    CoveringCheck C;
    auto Z = log_ruelle(table_X, s, k);
    C.lhs = std::abs(Z.value);
    C.lhs_error = Z.tail_bound;
    for (const auto &c : table_X0.classes)
        if (c.length <= table_X0.cutoff)
            C.C_X0 += std::exp(-2.5 * c.length);
    double C_err = tail_bound(table_X0.c_X, table_X0.cutoff, 2.5);
    if (table_X.min_length) {
        C.systole = *table_X.min_length;
        double f = index * std::exp(-C.systole / 2);
        C.rhs = C.C_X0 * f;
        C.rhs_error = C_err * f;
    } else {
        C.systole = std::numeric_limits<double>::infinity();
    }
    double slack = 1e-12 * (1 + C.lhs + C.rhs);
    C.pass = C.lhs - C.lhs_error <= C.rhs + C.rhs_error + slack;
    C.strict_pass = C.lhs + C.lhs_error <= C.rhs - C.rhs_error + slack;
    return C;
}

TorsionEstimate normalized_rt_geodesic(const GeodesicTable &table, int m, double vol)
{
    if (m < 3)
        throw std::invalid_argument("normalized torsion needs m >= 3");
    TorsionEstimate E;
    E.complete = table.complete;
    E.volume_term = -vol * (m * (m + 1) - 6) / std::numbers::pi;
    for (int k = 3; k <= m; ++k) {
        auto Z = log_ruelle(table, k, k);
        // log|R| is the real part of log R.
        E.zeta_term += Z.value.real();
        E.error += Z.tail_bound;
    }
    E.value = E.volume_term + E.zeta_term;
    return E;
}

double RationalOverPi::value() const { return coefficient.get_d() / std::numbers::pi; }

RationalOverPi l2_torsion_constant(int m)
{
    mpq_class q(m * (m + 1));
    q += mpq_class(1, 6);
    return {q};
}

std::string format_word(const std::vector<std::string> &names, const Word &w)
{
    std::string out;
    for (int l : w) {
        if (!out.empty())
            out += ' ';
        auto x = static_cast<std::size_t>(letter_generator(l));
        out += x < names.size() ? names[x] : "x" + std::to_string(x + 1);
        if (l < 0)
            out += "^-1";
    }
    return out;
}

std::string table_csv(const GeodesicTable &table)
{
    std::string out = "word,trace,length,holonomy,n\n";
    char buf[128];
    for (const auto &c : table.classes) {
        out += format_word(table.generator_names, c.word);
        out += ',';
        out += format_element(c.trace);
        std::snprintf(buf, sizeof buf, ",%.12f,%.12f,%d\n", c.length, c.holonomy, c.multiplicity);
        out += buf;
    }
    return out;
}

} // namespace bianchi
