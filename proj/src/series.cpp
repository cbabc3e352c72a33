#include "qbailey/series.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace qbailey {

static long sat_scale(long v, long f) {
    if (v >= kExactOrder) return kExactOrder;
    if (v <= -kExactOrder) return -kExactOrder;
    return v * f;
}

void LaurentSeries::normalize() {
    size_t first = 0;
    while (first < coeffs_.size() && coeffs_[first] == 0) ++first;
    if (first == coeffs_.size()) {
        coeffs_.clear();
        lo_ = order_;
        return;
    }
    size_t last = coeffs_.size();
    while (last > first && coeffs_[last - 1] == 0) --last;
    if (first > 0 || last < coeffs_.size()) {
        std::vector<BigInt> trimmed(coeffs_.begin() + first, coeffs_.begin() + last);
        coeffs_ = std::move(trimmed);
        lo_ += static_cast<long>(first);
    }
}

LaurentSeries LaurentSeries::monomial(const BigInt& c, long e, long denom) {
    LaurentSeries s;
    s.denom_ = denom;
    s.order_ = kExactOrder;
    if (c == 0) {
        s.lo_ = kExactOrder;
        return s;
    }
    s.lo_ = e;
    s.coeffs_ = {c};
    return s;
}

LaurentSeries LaurentSeries::monomial(const BigInt& c, long e, const SeriesContext& ctx) {
    return monomial(c, e, ctx.denom).truncated(ctx.order);
}

LaurentSeries LaurentSeries::from_coeffs(long denom, long lo, std::vector<BigInt> coeffs,
                                         long order) {
    LaurentSeries s;
    s.denom_ = denom;
    s.lo_ = lo;
    s.order_ = order;
    s.coeffs_ = std::move(coeffs);
    if (lo + static_cast<long>(s.coeffs_.size()) > order)
        throw std::invalid_argument("from_coeffs: window exceeds order");
    s.normalize();
    return s;
}

const BigInt& LaurentSeries::coeff_at(long e) const {
    static const BigInt zero_big = 0;
    if (e >= order_)
        throw OrderExceeded("coeff_at: exponent " + std::to_string(e) + "/" +
                            std::to_string(denom_) + " beyond order");
    if (e < lo_ || e >= lo_ + static_cast<long>(coeffs_.size())) return zero_big;
    return coeffs_[static_cast<size_t>(e - lo_)];
}

BigInt LaurentSeries::coeff_at_rational(long num, long den) const {
    long t = num * denom_;
    if (t % den != 0) {
        if (order_ < kExactOrder && t >= order_ * den)
            throw OrderExceeded("coeff_at_rational: beyond order");
        return 0;  // off the grid: known zero
    }
    return coeff_at(t / den);
}

LaurentSeries LaurentSeries::with_denom(long new_denom) const {
    if (new_denom == denom_) return *this;
    if (new_denom % denom_ != 0)
        throw std::invalid_argument("with_denom: new grid must refine the old one");
    long f = new_denom / denom_;
    LaurentSeries s;
    s.denom_ = new_denom;
    s.order_ = sat_scale(order_, f);
    if (coeffs_.empty()) {
        s.lo_ = s.order_;
        return s;
    }
    s.lo_ = lo_ * f;
    s.coeffs_.assign((coeffs_.size() - 1) * static_cast<size_t>(f) + 1, 0);
    for (size_t j = 0; j < coeffs_.size(); ++j) s.coeffs_[j * static_cast<size_t>(f)] = coeffs_[j];
    return s;
}

LaurentSeries LaurentSeries::truncated(long order) const {
    if (order >= order_) return *this;
    LaurentSeries s(*this);
    s.order_ = order;
    if (s.lo_ >= order) {
        s.coeffs_.clear();
        s.lo_ = order;
        return s;
    }
    if (s.lo_ + static_cast<long>(s.coeffs_.size()) > order)
        s.coeffs_.resize(static_cast<size_t>(order - s.lo_));
    s.normalize();
    return s;
}

LaurentSeries LaurentSeries::scaled(const BigInt& c, long e) const {
    if (c == 0) return zero(denom_, sat_add(order_, e));
    LaurentSeries s(*this);
    s.lo_ = sat_add(s.lo_, e);
    s.order_ = sat_add(s.order_, e);
    if (c != 1)
        for (auto& x : s.coeffs_) x *= c;
    return s;
}

static long lcm_long(long a, long b) { return a / std::gcd(a, b) * b; }

static void unify(LaurentSeries& a, LaurentSeries& b) {
    if (a.denom() == b.denom()) return;
    long d = lcm_long(a.denom(), b.denom());
    a = a.with_denom(d);
    b = b.with_denom(d);
}

LaurentSeries add(const LaurentSeries& a0, const LaurentSeries& b0) {
    LaurentSeries a = a0, b = b0;
    unify(a, b);
    long order = std::min(a.order_, b.order_);
    if (a.coeffs_.empty() && b.coeffs_.empty()) return LaurentSeries::zero(a.denom_, order);
    long lo = order;
    long hi = -kExactOrder;
    if (!a.coeffs_.empty()) {
        lo = std::min(lo, a.lo_);
        hi = std::max(hi, a.lo_ + static_cast<long>(a.coeffs_.size()));
    }
    if (!b.coeffs_.empty()) {
        lo = std::min(lo, b.lo_);
        hi = std::max(hi, b.lo_ + static_cast<long>(b.coeffs_.size()));
    }
    hi = std::min(hi, order);
    if (hi < lo) hi = lo;
    LaurentSeries s;
    s.denom_ = a.denom_;
    s.order_ = order;
    s.lo_ = lo;
    s.coeffs_.assign(static_cast<size_t>(hi - lo), 0);
    auto accumulate = [&](const LaurentSeries& x) {
        for (size_t j = 0; j < x.coeffs_.size(); ++j) {
            long e = x.lo_ + static_cast<long>(j);
            if (e >= order) break;
            s.coeffs_[static_cast<size_t>(e - lo)] += x.coeffs_[j];
        }
    };
    accumulate(a);
    accumulate(b);
    s.normalize();
    return s;
}

LaurentSeries sub(const LaurentSeries& a, const LaurentSeries& b) { return add(a, b.neg()); }

LaurentSeries mul(const LaurentSeries& a0, const LaurentSeries& b0) {
    LaurentSeries a = a0, b = b0;
    unify(a, b);
    /* The factor only known as O(q^order) multiplies the other one's lowest
     * term, so the product is sound below min(order_a + lo_b, order_b + lo_a).
     * The zero window has lo == order, which keeps this rule tight. */
    long order = std::min(sat_add(a.order_, b.lo_), sat_add(b.order_, a.lo_));
    if (a.coeffs_.empty() || b.coeffs_.empty()) return LaurentSeries::zero(a.denom_, order);
    long lo = a.lo_ + b.lo_;
    if (lo >= order) return LaurentSeries::zero(a.denom_, order);
    LaurentSeries s;
    s.denom_ = a.denom_;
    s.order_ = order;
    s.lo_ = lo;
    size_t len = static_cast<size_t>(std::min<long>(
        order - lo, static_cast<long>(a.coeffs_.size() + b.coeffs_.size()) - 1));
    s.coeffs_.assign(len, 0);
    for (size_t i = 0; i < a.coeffs_.size() && i < len; ++i) {
        if (a.coeffs_[i] == 0) continue;
        size_t jmax = std::min(b.coeffs_.size(), len - i);
        for (size_t j = 0; j < jmax; ++j) {
            if (b.coeffs_[j] == 0) continue;
            s.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
        }
    }
    s.normalize();
    return s;
}

LaurentSeries LaurentSeries::inverted(long order_cap) const {
    if (coeffs_.empty())
        throw NonUnitLeadingCoefficient("inverted: zero window is not invertible");
    const BigInt& lead = coeffs_.front();
    if (lead != 1 && lead != -1)
        throw NonUnitLeadingCoefficient("inverted: leading coefficient " + lead.get_str() +
                                        " is not a unit");
    long order = std::min(sat_sub(order_, 2 * lo_), order_cap);
    LaurentSeries s;
    s.denom_ = denom_;
    s.lo_ = -lo_;
    s.order_ = order;
    long len = order >= kExactOrder ? kExactOrder : order - s.lo_;
    if (len >= kExactOrder)
        throw std::invalid_argument("inverted: an exact series needs a finite order cap");
    if (len <= 0) return zero(denom_, order);
    // b_0 = 1/a_0; b_n = -(1/a_0) * sum_{k=1..n} a_k b_{n-k}
    s.coeffs_.assign(static_cast<size_t>(len), 0);
    s.coeffs_[0] = lead;
    for (long n = 1; n < len; ++n) {
        BigInt acc = 0;
        long kmax = std::min<long>(n, static_cast<long>(coeffs_.size()) - 1);
        for (long k = 1; k <= kmax; ++k) {
            if (coeffs_[static_cast<size_t>(k)] == 0) continue;
            acc += coeffs_[static_cast<size_t>(k)] * s.coeffs_[static_cast<size_t>(n - k)];
        }
        s.coeffs_[static_cast<size_t>(n)] = (lead == 1) ? BigInt(-acc) : acc;
    }
    s.normalize();
    return s;
}

LaurentSeries LaurentSeries::substituted_power(long s_num, long s_den) const {
    if (s_num <= 0 || s_den <= 0)
        throw std::invalid_argument("substituted_power: substitution must be positive");
    long g = std::gcd(s_num, s_den);
    long p = s_num / g, r = s_den / g;
    // e/D -> e*p/(D*r); the minimal grid for all of (1/D)Z is D*r/gcd(p, D*r).
    long dr = denom_ * r;
    long g2 = std::gcd(p, dr);
    long new_denom = dr / g2;
    long scale = p / g2;
    LaurentSeries s;
    s.denom_ = new_denom;
    s.order_ = sat_scale(order_, scale);
    if (coeffs_.empty()) {
        s.lo_ = s.order_;
        return s;
    }
    s.lo_ = lo_ * scale;
    s.coeffs_.assign((coeffs_.size() - 1) * static_cast<size_t>(scale) + 1, 0);
    for (size_t j = 0; j < coeffs_.size(); ++j)
        s.coeffs_[j * static_cast<size_t>(scale)] = coeffs_[j];
    return s;
}

LaurentSeries LaurentSeries::pow(long n, long order_cap) const {
    if (n < 0) return inverted(order_cap).pow(-n, order_cap);
    LaurentSeries acc = monomial(1, 0, denom_);
    if (order_cap < kExactOrder) acc = acc.truncated(order_cap);
    LaurentSeries base = *this;
    while (n > 0) {
        if (n & 1) acc = mul(acc, base);
        n >>= 1;
        if (n > 0) base = mul(base, base);
    }
    return acc;
}

CompareResult LaurentSeries::eq_up_to(const LaurentSeries& a0, const LaurentSeries& b0,
                                      long bound_num, long bound_den) {
    LaurentSeries a = a0, b = b0;
    unify(a, b);
    long d = a.denom();
    CompareResult res;
    res.denom = d;
    long bound;
    if (bound_num >= kExactOrder) {
        // full comparison of two exactly known series
        if (!a.exact() || !b.exact())
            throw OrderExceeded("eq_up_to: exact comparison of a truncated series");
        bound = std::min(a.order_, b.order_);
        long hi = std::max(a.coeffs_.empty() ? -kExactOrder
                                             : a.lo_ + static_cast<long>(a.coeffs_.size()),
                           b.coeffs_.empty() ? -kExactOrder
                                             : b.lo_ + static_cast<long>(b.coeffs_.size()));
        bound = std::min(bound, std::max(hi, 0L));
    } else {
        bound = bound_num * d / bound_den;
        if ((bound_num * d) % bound_den != 0) ++bound;  // never shrink the window
    }
    if (bound > a.order_ || bound > b.order_)
        throw OrderExceeded("eq_up_to: bound exceeds a known window");
    long lo = std::min(a.coeffs_.empty() ? bound : a.lo_, b.coeffs_.empty() ? bound : b.lo_);
    for (long e = lo; e < bound; ++e) {
        const BigInt& x = a.coeff_at(e);
        const BigInt& y = b.coeff_at(e);
        if (x != y) {
            res.equal = false;
            res.mismatch_num = e;
            res.lhs = x;
            res.rhs = y;
            return res;
        }
    }
    return res;
}

void LaurentSeries::mul_binomial_inplace(long e, int sign) {
    if (e <= 0) throw std::invalid_argument("mul_binomial_inplace: exponent must be positive");
    if (coeffs_.empty()) return;  // 0 * (1 +- q^e) = 0, window unchanged
    long len_old = static_cast<long>(coeffs_.size());
    long len = len_old + e;
    if (order_ < kExactOrder) len = std::min(len, order_ - lo_);
    if (len > len_old) coeffs_.resize(static_cast<size_t>(len), 0);
    for (long j = std::min(len - e, len_old) - 1; j >= 0; --j) {
        if (coeffs_[static_cast<size_t>(j)] == 0) continue;
        if (sign > 0)
            coeffs_[static_cast<size_t>(j + e)] += coeffs_[static_cast<size_t>(j)];
        else
            coeffs_[static_cast<size_t>(j + e)] -= coeffs_[static_cast<size_t>(j)];
    }
    normalize();
}

std::string LaurentSeries::to_string() const {
    if (coeffs_.empty()) return "0";
    std::ostringstream out;
    bool first = true;
    for (size_t j = 0; j < coeffs_.size(); ++j) {
        if (coeffs_[j] == 0) continue;
        if (!first) out << " + ";
        out << coeffs_[j].get_str() << "*q^(" << (lo_ + static_cast<long>(j)) << "/" << denom_
            << ")";
        first = false;
    }
    return out.str();
}

std::string LaurentSeries::to_json() const {
    std::ostringstream out;
    out << "{\"denom\": " << denom_ << ", \"order\": ";
    if (order_ >= kExactOrder)
        out << "\"exact\"";
    else
        out << order_;
    out << ", \"coeffs\": [";
    bool first = true;
    for (size_t j = 0; j < coeffs_.size(); ++j) {
        if (coeffs_[j] == 0) continue;
        if (!first) out << ", ";
        out << "[" << (lo_ + static_cast<long>(j)) << ", \"" << coeffs_[j].get_str() << "\"]";
        first = false;
    }
    out << "]}";
    return out.str();
}

}  // namespace qbailey
