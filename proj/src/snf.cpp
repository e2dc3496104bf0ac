#include "bianchi/snf.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>
#include <queue>
#include <random>
#include <type_traits>
#include <stdexcept>

namespace bianchi {

SparseMatrix SparseMatrix::from_dense(const IntMatrix &M)
{
    SparseMatrix S;
    S.cols = M.cols;
    S.rows.resize(M.rows);
    for (std::size_t i = 0; i < M.rows; ++i)
        for (std::size_t j = 0; j < M.cols; ++j)
            if (M(i, j) != 0)
                S.rows[i].emplace_back(static_cast<std::uint32_t>(j), M(i, j));
    return S;
}

IntMatrix SparseMatrix::to_dense() const
{
    IntMatrix M(rows.size(), cols);
    for (std::size_t i = 0; i < rows.size(); ++i)
        for (const auto &[c, v] : rows[i])
            M(i, c) += v;
    return M;
}

std::vector<Integer> SNFResult::divisors() const
{
    std::vector<Integer> out(unit_divisors, Integer(1));
    out.insert(out.end(), torsion.begin(), torsion.end());
    return out;
}

namespace {

struct Overflow {};

struct I64Ring {
    using T = std::int64_t;
    bool is_zero(T v) const { return v == 0; }
    bool is_unit(T v) const { return v == 1 || v == -1; }
    T unit_inverse(T v) const { return v; }
    T mul(T a, T b) const
    {
        T r;
        if (__builtin_mul_overflow(a, b, &r))
            throw Overflow{};
        return r;
    }
    T sub_mul(T a, T f, T b) const
    {
        T p = mul(f, b), r;
        if (__builtin_sub_overflow(a, p, &r))
            throw Overflow{};
        return r;
    }
    Integer to_integer(T v) const { return Integer(static_cast<long>(v)); }
};

struct MpzRing {
    using T = Integer;
    bool is_zero(const T &v) const { return v == 0; }
    bool is_unit(const T &v) const { return v == 1 || v == -1; }
    T unit_inverse(const T &v) const { return v; }
    T mul(const T &a, const T &b) const { return a * b; }
    T sub_mul(const T &a, const T &f, const T &b) const { return a - f * b; }
    Integer to_integer(const T &v) const { return v; }
};

struct ModPRing {
    using T = std::uint64_t;
    std::uint64_t p;
    bool is_zero(T v) const { return v == 0; }
    bool is_unit(T v) const { return v != 0; }
    T mul(T a, T b) const { return static_cast<T>(static_cast<unsigned __int128>(a) * b % p); }
    T unit_inverse(T v) const
    {
        T result = 1, base = v, e = p - 2;
        while (e) {
            if (e & 1)
                result = mul(result, base);
            base = mul(base, base);
            e >>= 1;
        }
        return result;
    }
    T sub_mul(T a, T f, T b) const
    {
        T fb = mul(f, b);
        return a >= fb ? a - fb : a + (p - fb);
    }
    Integer to_integer(T v) const
    {
        Integer r;
        mpz_set_ui(r.get_mpz_t(), v);
        return r;
    }
};

template <class Ring> class Eliminator {
  public:
    using T = typename Ring::T;
    struct Entry {
        std::uint32_t col;
        T val;
    };
    using Row = std::vector<Entry>;

    Eliminator(Ring ring, std::size_t ncols)
        : R(std::move(ring)), ncols(ncols), col_rows(ncols), col_count(ncols, 0), pivot_col(ncols, 0)
    {
    }

    void add_row(Row row)
    {
        auto k = static_cast<std::uint32_t>(rows.size());
        for (const auto &e : row) {
            col_rows[e.col].push_back(k);
            ++col_count[e.col];
        }
        max_len = std::max(max_len, row.size());
        rows.push_back(std::move(row));
        alive.push_back(1);
    }

    void run()
    {
        using Item = std::pair<std::uint32_t, std::uint32_t>;
        std::priority_queue<Item, std::vector<Item>, std::greater<Item>> queue;
        for (std::uint32_t j = 0; j < ncols; ++j)
            if (col_count[j] > 0)
                queue.emplace(col_count[j], j);
        std::vector<std::uint32_t> deferred;
        while (true) {
            std::size_t pivots_before = pivots;
            while (!queue.empty()) {
                auto [cnt, j] = queue.top();
                queue.pop();
                if (pivot_col[j] || col_count[j] == 0)
                    continue;
                if (cnt != col_count[j]) {
                    queue.emplace(col_count[j], j);
                    continue;
                }
                auto &list = col_rows[j];
                std::vector<std::uint32_t> kept;
                kept.reserve(list.size());
                std::int64_t best = -1;
                for (auto k : list) {
                    if (!alive[k])
                        continue;
                    auto idx = find(rows[k], j);
                    if (idx < 0)
                        continue;
                    if (!kept.empty() && kept.back() == k)
                        continue;
                    kept.push_back(k);
                    if (R.is_unit(rows[k][static_cast<std::size_t>(idx)].val) &&
                        (best < 0 || rows[k].size() < rows[static_cast<std::size_t>(best)].size()))
                        best = k;
                }
                std::sort(kept.begin(), kept.end());
                kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
                list = std::move(kept);
                if (best < 0) {
                    deferred.push_back(j);
                    continue;
                }
                eliminate(static_cast<std::uint32_t>(best), j);
            }
            if (pivots == pivots_before || deferred.empty())
                break;
            for (auto j : deferred)
                if (!pivot_col[j] && col_count[j] > 0)
                    queue.emplace(col_count[j], j);
            deferred.clear();
        }
    }

    Ring R;
    std::size_t ncols;
    std::vector<Row> rows;
    std::vector<char> alive;
    std::vector<std::vector<std::uint32_t>> col_rows;
    std::vector<std::uint32_t> col_count;
    std::vector<char> pivot_col;
    std::size_t pivots = 0;
    std::size_t max_len = 0;

  private:
    static std::int64_t find(const Row &row, std::uint32_t col)
    {
        auto it = std::lower_bound(row.begin(), row.end(), col, [](const Entry &e, std::uint32_t c) { return e.col < c; });
        if (it == row.end() || it->col != col)
            return -1;
        return it - row.begin();
    }

    // rows[k] -= f * rows[i]
    void axpy(std::uint32_t k, std::uint32_t i, const T &f)
    {
        const Row &src = rows[i];
        Row &dst = rows[k];
        Row out;
        out.reserve(dst.size() + src.size());
        std::size_t a = 0, b = 0;
        while (a < dst.size() || b < src.size()) {
            if (b == src.size() || (a < dst.size() && dst[a].col < src[b].col)) {
                out.push_back(std::move(dst[a++]));
            } else if (a == dst.size() || src[b].col < dst[a].col) {
                T v = R.sub_mul(T(0), f, src[b].val);
                auto c = src[b].col;
                ++b;
                if (R.is_zero(v))
                    continue;
                out.push_back({c, std::move(v)});
                ++col_count[c];
                col_rows[c].push_back(k);
            } else {
                T v = R.sub_mul(dst[a].val, f, src[b].val);
                auto c = src[b].col;
                ++a;
                ++b;
                if (R.is_zero(v)) {
                    --col_count[c];
                    continue;
                }
                out.push_back({c, std::move(v)});
            }
        }
        dst = std::move(out);
        max_len = std::max(max_len, dst.size());
    }

    void eliminate(std::uint32_t i, std::uint32_t j)
    {
        auto pidx = find(rows[i], j);
        T pinv = R.unit_inverse(rows[i][static_cast<std::size_t>(pidx)].val);
        std::vector<std::uint32_t> targets = col_rows[j];
        for (auto k : targets) {
            if (k == i || !alive[k])
                continue;
            auto idx = find(rows[k], j);
            if (idx < 0)
                continue;
            T f = R.mul(rows[k][static_cast<std::size_t>(idx)].val, pinv);
            axpy(k, i, f);
        }
        for (const auto &e : rows[i])
            --col_count[e.col];
        alive[i] = 0;
        Row().swap(rows[i]);
        pivot_col[j] = 1;
        col_rows[j].clear();
        ++pivots;
    }
};

void normalize_chain(std::vector<Integer> &d, std::size_t &ones)
{
    for (auto &x : d)
        x = abs(x);
    for (std::size_t i = 0; i < d.size(); ++i)
        for (std::size_t j = i + 1; j < d.size(); ++j) {
            Integer g;
            mpz_gcd(g.get_mpz_t(), d[i].get_mpz_t(), d[j].get_mpz_t());
            Integer l = d[i] / g * d[j];
            d[i] = g;
            d[j] = l;
        }
    std::vector<Integer> out;
    for (auto &x : d) {
        if (x == 1)
            ++ones;
        else
            out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    d = std::move(out);
}

using DenseMatrix = std::vector<std::vector<Integer>>;

struct RankProfile {
    std::vector<std::size_t> rows, cols;
};

std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t p)
{
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % p);
}

std::uint64_t powmod(std::uint64_t a, std::uint64_t e, std::uint64_t p)
{
    std::uint64_t r = 1;
    while (e) {
        if (e & 1)
            r = mulmod(r, a, p);
        a = mulmod(a, a, p);
        e >>= 1;
    }
    return r;
}

// Gaussian elimination mod p without row exchanges; the pivot rows and columns
// index a minor that is nonsingular mod p. With reversed, rows and columns are
// scanned from the end, which usually selects a different minor.
RankProfile rank_profile_mod_p(const DenseMatrix &A, std::size_t c, std::uint64_t p, bool reversed = false)
{
    std::size_t r = A.size();
    std::vector<std::vector<std::uint64_t>> B(r, std::vector<std::uint64_t>(c));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < c; ++j)
            B[reversed ? r - 1 - i : i][reversed ? c - 1 - j : j] = mpz_fdiv_ui(A[i][j].get_mpz_t(), p);
    std::vector<char> used(r, 0);
    RankProfile out;
    for (std::size_t j = 0; j < c; ++j) {
        std::size_t piv = r;
        for (std::size_t i = 0; i < r; ++i)
            if (!used[i] && B[i][j] != 0) {
                piv = i;
                break;
            }
        if (piv == r)
            continue;
        used[piv] = 1;
        out.rows.push_back(piv);
        out.cols.push_back(j);
        std::uint64_t inv = powmod(B[piv][j], p - 2, p);
        for (std::size_t i = 0; i < r; ++i) {
            if (used[i] || B[i][j] == 0)
                continue;
            std::uint64_t f = mulmod(B[i][j], inv, p);
            for (std::size_t k = j; k < c; ++k) {
                if (B[piv][k] == 0)
                    continue;
                std::uint64_t t = mulmod(f, B[piv][k], p);
                B[i][k] = B[i][k] >= t ? B[i][k] - t : B[i][k] + (p - t);
            }
        }
    }
    if (reversed) {
        for (auto &x : out.rows)
            x = r - 1 - x;
        for (auto &x : out.cols)
            x = c - 1 - x;
    }
    return out;
}

Integer bareiss_determinant(DenseMatrix a)
{
    std::size_t n = a.size();
    if (n == 0)
        return 1;
    Integer prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (a[k][k] == 0) {
            std::size_t s = k + 1;
            while (s < n && a[s][k] == 0)
                ++s;
            if (s == n)
                return 0;
            std::swap(a[k], a[s]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_ptr x = a[i][j].get_mpz_t();
                mpz_mul(x, x, a[k][k].get_mpz_t());
                mpz_submul(x, a[i][k].get_mpz_t(), a[k][j].get_mpz_t());
                mpz_divexact(x, x, prev.get_mpz_t());
            }
        prev = a[k][k];
    }
    return sign * a[n - 1][n - 1];
}

void reduce_mod(Integer &x, const Integer &M) { mpz_fdiv_r(x.get_mpz_t(), x.get_mpz_t(), M.get_mpz_t()); }

// Diagonal of a Smith form of A over Z/M (entries of A already in [0, M)).
std::vector<Integer> smith_mod(DenseMatrix &A, std::size_t c, const Integer &M)
{
    std::size_t r = A.size();
    std::vector<Integer> diag;
    Integer q, g, s, t, u, v, x, y;
    auto swap_cols = [&](std::size_t a, std::size_t b) {
        if (a != b)
            for (auto &row : A)
                std::swap(row[a], row[b]);
    };
    std::size_t k = 0;
    while (k < r && k < c) {
        std::size_t pi = r, pj = c;
        for (std::size_t i = k; i < r && !(pi < r && A[pi][pj] == 1); ++i)
            for (std::size_t j = k; j < c; ++j) {
                if (A[i][j] == 0)
                    continue;
                if (pi == r || A[i][j] < A[pi][pj]) {
                    pi = i;
                    pj = j;
                    if (A[i][j] == 1)
                        break;
                }
            }
        if (pi == r)
            break;
        std::swap(A[k], A[pi]);
        swap_cols(k, pj);
        // A unit pivot is scaled to 1.
        mpz_gcd(g.get_mpz_t(), A[k][k].get_mpz_t(), M.get_mpz_t());
        if (g == 1 && A[k][k] != 1) {
            mpz_invert(x.get_mpz_t(), A[k][k].get_mpz_t(), M.get_mpz_t());
            for (std::size_t j = k; j < c; ++j)
                if (A[k][j] != 0) {
                    A[k][j] *= x;
                    reduce_mod(A[k][j], M);
                }
        }
        while (true) {
            for (std::size_t i = k + 1; i < r; ++i) {
                if (A[i][k] == 0)
                    continue;
                const Integer a = A[k][k], b = A[i][k];
                if (mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t())) {
                    mpz_divexact(q.get_mpz_t(), b.get_mpz_t(), a.get_mpz_t());
                    for (std::size_t j = k; j < c; ++j)
                        if (A[k][j] != 0) {
                            A[i][j] -= q * A[k][j];
                            reduce_mod(A[i][j], M);
                        }
                } else {
                    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
                    u = a / g;
                    v = b / g;
                    for (std::size_t j = k; j < c; ++j) {
                        x = s * A[k][j] + t * A[i][j];
                        y = u * A[i][j] - v * A[k][j];
                        reduce_mod(x, M);
                        reduce_mod(y, M);
                        A[k][j] = x;
                        A[i][j] = y;
                    }
                }
            }
            bool changed = false;
            for (std::size_t j = k + 1; j < c; ++j) {
                if (A[k][j] == 0)
                    continue;
                const Integer a = A[k][k], b = A[k][j];
                if (mpz_divisible_p(b.get_mpz_t(), a.get_mpz_t())) {
                    mpz_divexact(q.get_mpz_t(), b.get_mpz_t(), a.get_mpz_t());
                    for (std::size_t i = k; i < r; ++i)
                        if (A[i][k] != 0) {
                            A[i][j] -= q * A[i][k];
                            reduce_mod(A[i][j], M);
                        }
                } else {
                    mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
                    u = a / g;
                    v = b / g;
                    for (std::size_t i = k; i < r; ++i) {
                        x = s * A[i][k] + t * A[i][j];
                        y = u * A[i][j] - v * A[i][k];
                        reduce_mod(x, M);
                        reduce_mod(y, M);
                        A[i][k] = x;
                        A[i][j] = y;
                    }
                    changed = true;
                }
            }
            if (!changed)
                break;
        }
        diag.push_back(A[k][k]);
        ++k;
    }
    return diag;
}

const std::uint64_t kRankPrimes[] = {2305843009213693951ULL, 1000000007ULL, 998244353ULL};

std::uint64_t mulmod_fast(std::uint64_t a, std::uint64_t b, std::uint64_t q)
{
    if (q <= 0xffffffffULL)
        return a * b % q;
    return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % q);
}

std::uint64_t inverse_mod(std::uint64_t a, std::uint64_t q)
{
    __int128 r0 = q, r1 = a % q, s0 = 0, s1 = 1;
    while (r1 != 0) {
        __int128 t = r0 / r1;
        __int128 r2 = r0 - t * r1, s2 = s0 - t * s1;
        r0 = r1;
        r1 = r2;
        s0 = s1;
        s1 = s2;
    }
    if (r0 != 1)
        throw ArithmeticError("inverse_mod: not a unit");
    s0 %= static_cast<__int128>(q);
    if (s0 < 0)
        s0 += q;
    return static_cast<std::uint64_t>(s0);
}

// p-adic valuations of the first `rank` invariant factors of A, by elimination
// over Z/p^k that always pivots on an entry of least valuation. Returns false
// when fewer than `rank` pivots of valuation below k exist.
template <class T>
bool local_valuations(const DenseMatrix &A, std::size_t c, std::uint64_t p, unsigned k, std::size_t rank,
                      std::vector<unsigned> &vals)
{
    constexpr bool word = std::is_same_v<T, std::uint64_t>;
    std::vector<T> pw(k + 1);
    pw[0] = 1;
    for (unsigned v = 0; v < k; ++v)
        pw[v + 1] = pw[v] * T(p);
    const T q = pw[k];
    std::size_t R = A.size();
    std::vector<std::vector<T>> B(R, std::vector<T>(c));
    for (std::size_t i = 0; i < R; ++i)
        for (std::size_t j = 0; j < c; ++j) {
            if constexpr (word)
                B[i][j] = mpz_fdiv_ui(A[i][j].get_mpz_t(), q);
            else
                mpz_fdiv_r(B[i][j].get_mpz_t(), A[i][j].get_mpz_t(), q.get_mpz_t());
        }
    std::vector<std::size_t> rows(R), cols(c);
    for (std::size_t i = 0; i < R; ++i)
        rows[i] = i;
    for (std::size_t j = 0; j < c; ++j)
        cols[j] = j;
    auto divisible = [&](const T &x, unsigned v) {
        if constexpr (word)
            return x % pw[v] == 0;
        else
            return mpz_divisible_p(x.get_mpz_t(), pw[v].get_mpz_t()) != 0;
    };
    T f, uinv, t;
    auto eliminate = [&](std::size_t ri, std::size_t cj, unsigned v) {
        std::size_t pi = rows[ri], pj = cols[cj];
        rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(ri));
        cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(cj));
        const T mod = pw[k - v];
        if constexpr (word)
            uinv = inverse_mod(B[pi][pj] / pw[v] % mod, mod);
        else {
            t = B[pi][pj] / pw[v];
            mpz_invert(uinv.get_mpz_t(), t.get_mpz_t(), mod.get_mpz_t());
        }
        for (std::size_t i : rows) {
            if (B[i][pj] == 0)
                continue;
            if constexpr (word)
                f = mulmod_fast(B[i][pj] / pw[v] % mod, uinv, mod);
            else {
                f = B[i][pj] / pw[v] * uinv;
                mpz_fdiv_r(f.get_mpz_t(), f.get_mpz_t(), mod.get_mpz_t());
            }
            if (f == 0)
                continue;
            auto &dst = B[i];
            const auto &src = B[pi];
            if constexpr (word) {
                std::uint64_t nf = q - f;
                if (q <= 0xffffffffULL) {
                    for (std::size_t j : cols)
                        if (src[j] != 0)
                            dst[j] = (dst[j] + nf * src[j]) % q;
                } else {
                    for (std::size_t j : cols)
                        if (src[j] != 0)
                            dst[j] = static_cast<std::uint64_t>(
                                (dst[j] + static_cast<unsigned __int128>(nf) * src[j]) % q);
                }
            } else {
                for (std::size_t j : cols)
                    if (src[j] != 0) {
                        dst[j] -= f * src[j];
                        mpz_fdiv_r(dst[j].get_mpz_t(), dst[j].get_mpz_t(), q.get_mpz_t());
                    }
            }
            dst[pj] = 0;
        }
    };
    vals.clear();
    for (unsigned v = 0; v < k && vals.size() < rank; ++v) {
        bool found = true;
        while (found && vals.size() < rank) {
            found = false;
            for (std::size_t cj = 0; cj < cols.size() && vals.size() < rank;) {
                std::size_t j = cols[cj], hit = rows.size();
                for (std::size_t ri = 0; ri < rows.size(); ++ri) {
                    const T &x = B[rows[ri]][j];
                    if (x != 0 && !divisible(x, v + 1)) {
                        hit = ri;
                        break;
                    }
                }
                if (hit == rows.size()) {
                    ++cj;
                    continue;
                }
                eliminate(hit, cj, v);
                vals.push_back(v);
                found = true;
            }
        }
    }
    return vals.size() == rank;
}

std::vector<unsigned> local_valuations_any(const DenseMatrix &A, std::size_t c, std::uint64_t p, unsigned k,
                                           std::size_t rank)
{
    std::vector<unsigned> vals;
    unsigned kw = 0;
    for (unsigned __int128 q = p; q < (static_cast<unsigned __int128>(1) << 62) && kw < k; q *= p)
        ++kw;
    if (kw > 0 && local_valuations<std::uint64_t>(A, c, p, kw, rank, vals))
        return vals;
    if (kw < k && local_valuations<Integer>(A, c, p, k, rank, vals))
        return vals;
    throw ArithmeticError("local elimination at p = " + std::to_string(p) + " found only " +
                          std::to_string(vals.size()) + " pivots of " + std::to_string(rank));
}

constexpr std::uint64_t kSmallPrimeBound = 1u << 20;

const std::vector<std::uint32_t> &small_primes()
{
    static const std::vector<std::uint32_t> primes = [] {
        std::vector<char> sieve(kSmallPrimeBound, 1);
        std::vector<std::uint32_t> out;
        for (std::uint64_t i = 2; i < kSmallPrimeBound; ++i) {
            if (!sieve[i])
                continue;
            out.push_back(static_cast<std::uint32_t>(i));
            for (std::uint64_t j = i * i; j < kSmallPrimeBound; j += i)
                sieve[j] = 0;
        }
        return out;
    }();
    return primes;
}

// Random integer combinations of the rows of A; `count` of them.
DenseMatrix compress_rows(const DenseMatrix &A, std::size_t c, std::size_t count, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::int64_t> dist(-(1 << 15), 1 << 15);
    std::size_t R = A.size();
    std::vector<std::vector<std::int64_t>> U(count, std::vector<std::int64_t>(R));
    for (auto &row : U)
        for (auto &x : row)
            x = dist(rng);
    bool small = R < (std::size_t(1) << 30);
    for (const auto &row : A)
        for (const auto &x : row)
            if (!small || mpz_sizeinbase(x.get_mpz_t(), 2) > 62)
                small = false;
    DenseMatrix B(count, std::vector<Integer>(c));
    if (small) {
        std::vector<std::vector<__int128>> acc(count, std::vector<__int128>(c, 0));
        for (std::size_t i = 0; i < R; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                if (A[i][j] == 0)
                    continue;
                __int128 a = A[i][j].get_si();
                for (std::size_t t = 0; t < count; ++t)
                    acc[t][j] += U[t][i] * a;
            }
        for (std::size_t t = 0; t < count; ++t)
            for (std::size_t j = 0; j < c; ++j) {
                __int128 v = acc[t][j];
                bool neg = v < 0;
                unsigned __int128 m = neg ? -static_cast<unsigned __int128>(v) : static_cast<unsigned __int128>(v);
                Integer hi(static_cast<unsigned long>(m >> 64)), lo(static_cast<unsigned long>(m));
                mpz_mul_2exp(hi.get_mpz_t(), hi.get_mpz_t(), 64);
                B[t][j] = hi + lo;
                if (neg)
                    B[t][j] = -B[t][j];
            }
    } else {
        for (std::size_t i = 0; i < R; ++i)
            for (std::size_t j = 0; j < c; ++j) {
                if (A[i][j] == 0)
                    continue;
                for (std::size_t t = 0; t < count; ++t)
                    B[t][j] += U[t][i] * A[i][j];
            }
    }
    return B;
}

// Invariant factors of a dense residual A of rank r (r from several primes).
//
// A nonzero maximal minor det of A is split as S * L with S the part over
// primes below 2^20. Every invariant factor divides det. The part over the
// small primes is found exactly by local elimination on A. The part over the
// primes of L is the Smith form of B modulo L, where B = A, or for tall
// residuals a few random combinations of its rows; the compressed lattice
// agrees with the row lattice of A at a prime q > 2^20 except with
// probability about q^-17.
void residual_smith(const DenseMatrix &A, std::size_t c, SNFResult &res, const SNFOptions &options)
{
    if (A.empty() || c == 0)
        return;
    RankProfile best;
    for (auto p : kRankPrimes) {
        auto prof = rank_profile_mod_p(A, c, p);
        if (prof.rows.size() > best.rows.size())
            best = std::move(prof);
    }
    std::size_t r = best.rows.size();
    res.stats.residual_rank = r;
    if (r == 0)
        return;
    DenseMatrix minor(r, std::vector<Integer>(r));
    for (std::size_t i = 0; i < r; ++i)
        for (std::size_t j = 0; j < r; ++j)
            minor[i][j] = A[best.rows[i]][best.cols[j]];
    Integer det = abs(bareiss_determinant(std::move(minor)));
    if (det == 0)
        throw ArithmeticError("selected minor is singular over Z");
    res.stats.modulus_bits = mpz_sizeinbase(det.get_mpz_t(), 2);

    Integer L = det;
    std::vector<std::pair<std::uint64_t, unsigned>> small;
    for (auto p : small_primes()) {
        if (L == 1)
            break;
        unsigned e = 0;
        while (mpz_divisible_ui_p(L.get_mpz_t(), p)) {
            mpz_divexact_ui(L.get_mpz_t(), L.get_mpz_t(), p);
            ++e;
        }
        if (e > 0)
            small.emplace_back(p, e);
    }

    // A second minor removes most of the cofactor that is not torsion: the
    // product of the divisors divides both determinants.
    if (L != 1) {
        RankProfile other;
        for (auto p : kRankPrimes) {
            other = rank_profile_mod_p(A, c, p, true);
            if (other.rows.size() == r)
                break;
        }
        if (other.rows.size() == r) {
            DenseMatrix second(r, std::vector<Integer>(r));
            for (std::size_t i = 0; i < r; ++i)
                for (std::size_t j = 0; j < r; ++j)
                    second[i][j] = A[other.rows[i]][other.cols[j]];
            Integer det2 = bareiss_determinant(std::move(second));
            if (det2 != 0)
                mpz_gcd(L.get_mpz_t(), L.get_mpz_t(), det2.get_mpz_t());
        }
    }

    const std::size_t extra = 16;
    const DenseMatrix *Bp = &A;
    DenseMatrix compressed;
    if (options.compress && A.size() >= 2 * (r + extra)) {
        for (std::uint64_t attempt = 0;; ++attempt) {
            compressed = compress_rows(A, c, r + extra, 0x9e3779b97f4a7c15ULL + attempt);
            if (rank_profile_mod_p(compressed, c, kRankPrimes[0]).rows.size() == r)
                break;
            if (attempt == 4)
                throw ArithmeticError("row compression lost rank");
        }
        Bp = &compressed;
        res.stats.compressed = true;
    }
    const DenseMatrix &B = *Bp;

    // Large primes.
    std::vector<Integer> large(r, Integer(1));
    if (L != 1) {
        DenseMatrix Bm = B;
        for (auto &row : Bm)
            for (auto &x : row)
                reduce_mod(x, L);
        auto diag = smith_mod(Bm, c, L);
        while (diag.size() < std::min(B.size(), c))
            diag.push_back(0);
        std::vector<Integer> values;
        for (auto &d : diag) {
            Integer g;
            mpz_gcd(g.get_mpz_t(), d.get_mpz_t(), L.get_mpz_t());
            values.push_back(g);
        }
        std::size_t ones = 0;
        normalize_chain(values, ones);
        if (ones >= r) {
            // all large parts trivial
        } else {
            for (std::size_t i = 0; i + ones < r; ++i)
                large[ones + i] = values[i];
        }
    }

    // Small primes. Valuations on B bound those on A from above, so they give
    // the precision needed for A.
    std::vector<Integer> result = large;
    for (const auto &[p, e] : small) {
        if (rank_profile_mod_p(B, c, p).rows.size() == r)
            continue;
        auto vals = local_valuations_any(B, c, p, e + 1, r);
        unsigned top = *std::max_element(vals.begin(), vals.end());
        if (top == 0)
            continue;
        if (Bp != &A)
            vals = local_valuations_any(A, c, p, top + 1, r);
        std::sort(vals.begin(), vals.end());
        for (std::size_t i = 0; i < r; ++i)
            if (vals[i] > 0) {
                Integer pp;
                mpz_ui_pow_ui(pp.get_mpz_t(), p, vals[i]);
                result[i] *= pp;
            }
        ++res.stats.local_primes;
    }
    std::size_t ones = 0;
    normalize_chain(result, ones);
    res.rank += r;
    res.unit_divisors += ones;
    res.torsion = std::move(result);
}

// The residual often splits into independent blocks (for instance L + L*
// coefficients); each block is reduced on its own and the chains are merged.
void residual_by_blocks(DenseMatrix A, std::size_t c, SNFResult &res, const SNFOptions &options)
{
    std::vector<std::size_t> parent(c);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x)
            x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<std::size_t> first(A.size(), c);
    for (std::size_t i = 0; i < A.size(); ++i)
        for (std::size_t j = 0; j < c; ++j) {
            if (A[i][j] == 0)
                continue;
            if (first[i] == c)
                first[i] = j;
            else
                parent[find(j)] = find(first[i]);
        }
    std::vector<std::size_t> block_of(c, c);
    std::vector<std::vector<std::size_t>> block_cols;
    for (std::size_t j = 0; j < c; ++j) {
        std::size_t r = find(j);
        if (block_of[r] == c) {
            block_of[r] = block_cols.size();
            block_cols.emplace_back();
        }
        block_cols[block_of[r]].push_back(j);
    }
    res.stats.residual_blocks = block_cols.size();
    if (block_cols.size() <= 1) {
        residual_smith(A, c, res, options);
        return;
    }
    std::vector<std::vector<std::size_t>> block_rows(block_cols.size());
    for (std::size_t i = 0; i < A.size(); ++i)
        if (first[i] < c)
            block_rows[block_of[find(first[i])]].push_back(i);
    std::vector<Integer> torsion;
    for (std::size_t b = 0; b < block_cols.size(); ++b) {
        const auto &cols = block_cols[b];
        DenseMatrix sub(block_rows[b].size(), std::vector<Integer>(cols.size()));
        for (std::size_t i = 0; i < block_rows[b].size(); ++i) {
            auto &row = A[block_rows[b][i]];
            for (std::size_t j = 0; j < cols.size(); ++j)
                sub[i][j] = std::move(row[cols[j]]);
        }
        SNFResult part;
        residual_smith(sub, cols.size(), part, options);
        res.rank += part.rank;
        res.unit_divisors += part.unit_divisors;
        res.stats.residual_rank += part.stats.residual_rank;
        res.stats.modulus_bits = std::max(res.stats.modulus_bits, part.stats.modulus_bits);
        res.stats.local_primes += part.stats.local_primes;
        res.stats.compressed = res.stats.compressed || part.stats.compressed;
        torsion.insert(torsion.end(), part.torsion.begin(), part.torsion.end());
    }
    std::size_t ones = 0;
    normalize_chain(torsion, ones);
    res.unit_divisors += ones;
    res.torsion = std::move(torsion);
}

template <class Ring>
SNFResult run_snf(Ring ring, const std::vector<typename Eliminator<Ring>::Row> &input_rows, std::size_t cols,
                  const SNFOptions &options)
{
    Eliminator<Ring> E(ring, cols);
    for (const auto &row : input_rows)
        E.add_row(row);
    E.run();

    SNFResult res;
    res.rows = input_rows.size();
    res.cols = cols;
    res.stats.unit_pivots = E.pivots;
    res.stats.max_row_length = E.max_len;
    res.unit_divisors = E.pivots;
    res.rank = E.pivots;

    std::vector<std::uint32_t> rrows;
    for (std::uint32_t k = 0; k < E.rows.size(); ++k)
        if (E.alive[k] && !E.rows[k].empty())
            rrows.push_back(k);
    std::vector<std::int64_t> pos(cols, -1);
    std::vector<std::uint32_t> rcols;
    for (auto k : rrows)
        for (const auto &e : E.rows[k])
            if (pos[e.col] < 0) {
                pos[e.col] = 0;
                rcols.push_back(e.col);
            }
    std::sort(rcols.begin(), rcols.end());
    for (std::size_t p = 0; p < rcols.size(); ++p)
        pos[rcols[p]] = static_cast<std::int64_t>(p);
    res.stats.residual_rows = rrows.size();
    res.stats.residual_cols = rcols.size();
    if (rrows.size() * rcols.size() > options.dense_limit)
        throw ArithmeticError("Smith form residual " + std::to_string(rrows.size()) + " x " +
                              std::to_string(rcols.size()) + " exceeds the dense limit");
    DenseMatrix A(rrows.size(), std::vector<Integer>(rcols.size()));
    for (std::size_t i = 0; i < rrows.size(); ++i)
        for (const auto &e : E.rows[rrows[i]])
            A[i][static_cast<std::size_t>(pos[e.col])] = ring.to_integer(e.val);
    residual_by_blocks(std::move(A), rcols.size(), res, options);
    return res;
}

template <class Ring, class Src> std::vector<typename Eliminator<Ring>::Row> convert_rows(const Src &rows, Ring ring)
{
    (void)ring;
    std::vector<typename Eliminator<Ring>::Row> out(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto sorted = rows[i];
        std::sort(sorted.begin(), sorted.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
        for (std::size_t k = 0; k < sorted.size(); ++k) {
            if (!out[i].empty() && out[i].back().col == sorted[k].first)
                throw std::invalid_argument("duplicate column in a sparse row");
            if (sorted[k].second == 0)
                continue;
            if constexpr (std::is_same_v<Ring, I64Ring>) {
                if constexpr (std::is_same_v<std::decay_t<decltype(sorted[k].second)>, Integer>) {
                    if (!sorted[k].second.fits_slong_p())
                        throw Overflow{};
                    out[i].push_back({sorted[k].first, sorted[k].second.get_si()});
                } else {
                    out[i].push_back({sorted[k].first, sorted[k].second});
                }
            } else {
                out[i].push_back({sorted[k].first, Integer(sorted[k].second)});
            }
        }
    }
    return out;
}

template <class Src> SNFResult snf_dispatch(const Src &rows, std::size_t cols, const SNFOptions &options)
{
    auto start = std::chrono::steady_clock::now();
    SNFResult res;
    bool done = false;
    if (!options.force_bignum) {
        try {
            res = run_snf(I64Ring{}, convert_rows(rows, I64Ring{}), cols, options);
            done = true;
        } catch (const Overflow &) {
        }
    }
    if (!done) {
        res = run_snf(MpzRing{}, convert_rows(rows, MpzRing{}), cols, options);
        res.stats.used_bignum = true;
    }
    res.stats.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

template <class Src> std::size_t rank_mod_p_impl(const Src &rows, std::size_t cols, std::uint64_t p)
{
    ModPRing ring{p};
    Eliminator<ModPRing> E(ring, cols);
    for (const auto &src : rows) {
        typename Eliminator<ModPRing>::Row row;
        auto sorted = src;
        std::sort(sorted.begin(), sorted.end(), [](const auto &a, const auto &b) { return a.first < b.first; });
        for (const auto &[c, v] : sorted) {
            Integer x = Integer(v) % Integer(static_cast<unsigned long>(p));
            if (x < 0)
                x += Integer(static_cast<unsigned long>(p));
            if (x != 0)
                row.push_back({c, x.get_ui()});
        }
        E.add_row(std::move(row));
    }
    E.run();
    for (std::size_t k = 0; k < E.rows.size(); ++k)
        if (E.alive[k] && !E.rows[k].empty())
            throw std::logic_error("mod-p elimination left a nonzero residual");
    return E.pivots;
}

} // namespace

SNFResult smith_normal_form(const SparseMatrix &M, const SNFOptions &options)
{
    return snf_dispatch(M.rows, M.cols, options);
}

SNFResult smith_normal_form(const SparseMatrix64 &M, const SNFOptions &options)
{
    return snf_dispatch(M.rows, M.cols, options);
}

SNFResult smith_normal_form(const IntMatrix &M) { return smith_normal_form(SparseMatrix::from_dense(M)); }

std::size_t rank_mod_p(const SparseMatrix64 &M, std::uint64_t p) { return rank_mod_p_impl(M.rows, M.cols, p); }

std::size_t rank_mod_p(const SparseMatrix &M, std::uint64_t p) { return rank_mod_p_impl(M.rows, M.cols, p); }

Integer torsion_order(const std::vector<Integer> &torsion)
{
    Integer p = 1;
    for (const auto &d : torsion)
        p *= d;
    return p;
}

double log_torsion(const std::vector<Integer> &torsion)
{
    double s = 0;
    for (const auto &d : torsion) {
        long e;
        double m = mpz_get_d_2exp(&e, d.get_mpz_t());
        s += std::log(m) + static_cast<double>(e) * std::log(2.0);
    }
    return s;
}

} // namespace bianchi
