#include "qbailey/qtools.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <numeric>

namespace qbailey {

namespace {

long lcm_long(long a, long b) { return a / std::gcd(a, b) * b; }

// 1 - (+-1) q^{e/D} as an exact series on grid D; e may be any integer.
LaurentSeries binomial_factor(long e, bool negated, long denom) {
    if (e == 0) {
        if (!negated) return LaurentSeries::monomial(0, 0, denom);  // 1 - q^0 = 0
        return LaurentSeries::monomial(2, 0, denom);                // 1 + q^0 = 2
    }
    LaurentSeries one = LaurentSeries::monomial(1, 0, denom);
    LaurentSeries m = LaurentSeries::monomial(negated ? 1 : -1, e, denom);
    return add(one, m);
}

}  // namespace

LaurentSeries pochhammer(const PochhammerSpec& spec, const SeriesContext& ctx) {
    if (spec.step <= Rat(0)) throw std::invalid_argument("pochhammer: step must be positive");
    long grid = lcm_long(lcm_long(ctx.denom, spec.start.den), spec.step.den);
    long c = spec.start.on_grid(grid);
    long s = spec.step.on_grid(grid);
    long order = ctx.order * (grid / ctx.denom);
    int sign = spec.negated ? +1 : -1;

    if (!spec.length.has_value()) {
        if (spec.start <= Rat(0))
            throw NonTerminatingProduct("pochhammer: infinite product needs start_exp > 0");
        LaurentSeries p = LaurentSeries::monomial(1, 0, grid).truncated(order);
        for (long e = c; e < order; e += s) p.mul_binomial_inplace(e, sign);
        return p;
    }

    long len = *spec.length;
    if (len >= 0) {
        LaurentSeries p = LaurentSeries::monomial(1, 0, grid);
        for (long j = 0; j < len; ++j) {
            long e = c + j * s;
            if (e > 0) {
                p.mul_binomial_inplace(e, sign);
            } else {
                p = mul(p, binomial_factor(e, spec.negated, grid));
                if (p.is_zero_window() && p.exact()) return p;  // a (1 - q^0) factor
            }
        }
        return p;  // exact polynomial; downstream truncation applies as needed
    }

    // (a; Q)_{-m} = prod_{j=1..m} (1 - a Q^{-j})^{-1}
    long m = -len;
    LaurentSeries p = LaurentSeries::monomial(1, 0, grid);
    for (long j = 1; j <= m; ++j) p = mul(p, binomial_factor(c - j * s, spec.negated, grid));
    return p.inverted(order);
}

LaurentSeries poch_qn(long c, std::optional<long> len, const SeriesContext& ctx) {
    return pochhammer({Rat(c), Rat(1), len, false}, ctx);
}

LaurentSeries inv_poch_qn(long c, std::optional<long> len, const SeriesContext& ctx) {
    return poch_qn(c, len, ctx).inverted(ctx.order * 2 + 64);
}

long negexp(long n, long m) {
    long acc = 0;
    for (long s = 1; s <= m; ++s)
        if (n + s < 0) acc += n + s;
    return acc;
}

long posexp(long n, long m) {
    long acc = 0;
    for (long s = 1; s <= m; ++s)
        if (n + s > 0) acc += n + s;
    return acc;
}

namespace {

// (q)_n as an exact polynomial on the integer grid.
LaurentSeries q_factorial(long n) {
    LaurentSeries p = LaurentSeries::monomial(1, 0, 1L);
    for (long j = 1; j <= n; ++j) p.mul_binomial_inplace(j, -1);
    return p;
}

struct BinomKey {
    long top;
    long bottom;
    bool primed;
    auto operator<=>(const BinomKey&) const = default;
};

std::map<BinomKey, LaurentSeries> binom_memo;
std::mutex binom_mutex;

LaurentSeries gauss_binom_uncached(long top, long bottom) {
    if (bottom < 0 || top - bottom < 0) return LaurentSeries::monomial(0, 0, 1L);
    long m = top - bottom, n = bottom;
    long deg = m * n;
    LaurentSeries num = q_factorial(top);
    LaurentSeries r = mul(num, q_factorial(n).inverted(deg + 1));
    r = mul(r, q_factorial(m).inverted(deg + 1));
    return r.with_exact_order();
}

LaurentSeries gauss_binom_primed_uncached(long top, long bottom) {
    long n = bottom, m = top - bottom;
    if (m < 0) return LaurentSeries::monomial(0, 0, 1L);
    // numerator (q^{n+1})_m; a factor with exponent 0 makes the whole thing 0
    LaurentSeries num = LaurentSeries::monomial(1, 0, 1L);
    for (long s = 1; s <= m; ++s) {
        if (n + s == 0) return LaurentSeries::monomial(0, 0, 1L);
        num = mul(num, binomial_factor(n + s, false, 1));
    }
    long width = posexp(n, m) - negexp(n, m) + 1;
    LaurentSeries r = mul(num, q_factorial(m).inverted(width + 1));
    return r.with_exact_order();
}

}  // namespace

LaurentSeries gauss_binom(long top, long bottom) {
    BinomKey key{top, bottom, false};
    {
        std::lock_guard<std::mutex> lock(binom_mutex);
        auto it = binom_memo.find(key);
        if (it != binom_memo.end()) return it->second;
    }
    LaurentSeries r = gauss_binom_uncached(top, bottom);
    std::lock_guard<std::mutex> lock(binom_mutex);
    return binom_memo.emplace(key, std::move(r)).first->second;
}

LaurentSeries gauss_binom_primed(long top, long bottom) {
    BinomKey key{top, bottom, true};
    {
        std::lock_guard<std::mutex> lock(binom_mutex);
        auto it = binom_memo.find(key);
        if (it != binom_memo.end()) return it->second;
    }
    LaurentSeries r = gauss_binom_primed_uncached(top, bottom);
    std::lock_guard<std::mutex> lock(binom_mutex);
    return binom_memo.emplace(key, std::move(r)).first->second;
}

LaurentSeries q_multinomial(long k, const std::vector<long>& v, bool base_inverse) {
    long rest = k;
    for (long x : v) {
        if (x < 0) return LaurentSeries::monomial(0, 0, 1L);
        rest -= x;
    }
    if (rest < 0 || k < 0) return LaurentSeries::monomial(0, 0, 1L);
    long deg = k * (k + 1) / 2 - rest * (rest + 1) / 2;
    for (long x : v) deg -= x * (x + 1) / 2;
    LaurentSeries r = q_factorial(k);
    for (long x : v) r = mul(r, q_factorial(x).inverted(deg + 1));
    r = mul(r, q_factorial(rest).inverted(deg + 1));
    r = r.with_exact_order();
    if (base_inverse) {
        /* (q^{-1};q^{-1})_n = (-1)^n q^{-n(n+1)/2} (q)_n applied to every
         * factor; the signs cancel because the subscripts sum to k, leaving
         * the pure shift (sum_j i_j^2 - k^2)/2 with i_N = k - sum v. */
        long shift = rest * rest - k * k;
        for (long x : v) shift += x * x;
        r = r.scaled(1, shift / 2);
    }
    return r;
}

long multinomial_inv_lowexp(long k, const std::vector<long>& v) {
    long rest = k;
    long total = 0;
    for (long x : v) {
        rest -= x;
        total += x * x;
    }
    total += rest * rest;
    return (total - k * k) / 2;
}

LaurentSeries limit_shifted_factorial(long n) {
    if (n < 0) throw std::invalid_argument("limit_shifted_factorial: n must be >= 0");
    return LaurentSeries::monomial((n % 2 == 0) ? 1 : -1, n * (n - 1) / 2, 1L);
}

bool ResidueCondition::allows(long j) const {
    long r = j % modulus;
    if (r < 0) r += modulus;
    for (long x : excluded) {
        long e = x % modulus;
        if (e < 0) e += modulus;
        if (r == e) return false;
    }
    return true;
}

LaurentSeries residue_product(const std::vector<ResidueCondition>& conditions,
                              const SeriesContext& ctx) {
    long order_units = (ctx.order + ctx.denom - 1) / ctx.denom;
    LaurentSeries p = LaurentSeries::monomial(1, 0, 1L).truncated(order_units);
    for (long j = 1; j < order_units; ++j) {
        bool ok = true;
        for (const auto& c : conditions)
            if (!c.allows(j)) {
                ok = false;
                break;
            }
        if (ok) p.mul_binomial_inplace(j, -1);
    }
    return p.inverted(order_units);
}

}  // namespace qbailey
