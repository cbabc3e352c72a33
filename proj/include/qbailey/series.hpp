#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace qbailey {

using BigInt = mpz_class;

/* Exponents live on the grid (1/D)*Z and are handled as integer numerators
 * over D throughout. No exponent is ever rounded. */
struct SeriesContext {
    long denom = 1;   // D >= 1
    long order = 64;  // numerator of the default truncation bound

    long to_grid(long e_units) const { return e_units * denom; }
};

class OrderExceeded : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonUnitLeadingCoefficient : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonTerminatingProduct : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class NonTerminatingSum : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ModulusMismatch : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EnumerationBoundUnverified : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/* Order surrogate for series known exactly (finite Laurent polynomials).
 * Order arithmetic saturates at this value. */
inline constexpr long kExactOrder = (1L << 60);

inline long sat_add(long a, long b) {
    if (a >= kExactOrder || b >= kExactOrder) return kExactOrder;
    long s = a + b;
    return s >= kExactOrder ? kExactOrder : s;
}

inline long sat_sub(long a, long b) {
    if (a >= kExactOrder) return kExactOrder;
    return a - b;
}

struct CompareResult {
    bool equal = true;
    long mismatch_num = 0;  // exponent numerator of first difference
    long denom = 1;
    BigInt lhs;
    BigInt rhs;
};

/* Truncated Laurent series in t = q^{1/D} with exact integer coefficients.
 *
 * coeffs[j] is the coefficient of q^{(lo+j)/D}; exponents e/D with
 * e >= order are unknown. Values are immutable after construction in the
 * sense that all operations return fresh series. Stored windows are
 * trimmed so the first coefficient is nonzero; the zero series is the
 * canonical empty window with lo == order.
 */
class LaurentSeries {
public:
    LaurentSeries() : denom_(1), lo_(kExactOrder), order_(kExactOrder) {}

    static LaurentSeries zero(long denom, long order) {
        LaurentSeries s;
        s.denom_ = denom;
        s.lo_ = order;
        s.order_ = order;
        return s;
    }

    // c * q^{e/D}, known exactly.
    static LaurentSeries monomial(const BigInt& c, long e, long denom);

    // c * q^{e/D} truncated at ctx.order (on ctx.denom grid).
    static LaurentSeries monomial(const BigInt& c, long e, const SeriesContext& ctx);

    static LaurentSeries one() { return monomial(1, 0, 1); }

    static LaurentSeries from_coeffs(long denom, long lo, std::vector<BigInt> coeffs, long order);

    long denom() const { return denom_; }
    long lo() const { return lo_; }
    long order() const { return order_; }
    bool is_zero_window() const { return coeffs_.empty(); }
    bool exact() const { return order_ >= kExactOrder; }
    const std::vector<BigInt>& coeffs() const { return coeffs_; }

    // Coefficient of q^{e/D} on this series' own grid.
    // Throws OrderExceeded for e >= order.
    const BigInt& coeff_at(long e) const;

    // Coefficient of q^{num/den} for an arbitrary exact rational exponent.
    BigInt coeff_at_rational(long num, long den) const;

    LaurentSeries with_denom(long new_denom) const;
    LaurentSeries truncated(long order) const;

    // Marks the value as known exactly. Only for callers that can prove the
    // stored window is the complete support (e.g. a polynomial of known degree).
    LaurentSeries with_exact_order() const {
        LaurentSeries s(*this);
        if (s.coeffs_.empty()) s.lo_ = kExactOrder;
        s.order_ = kExactOrder;
        return s;
    }

    // Multiply by c * q^{e/D} (e on this series' grid).
    LaurentSeries scaled(const BigInt& c, long e = 0) const;

    LaurentSeries neg() const { return scaled(-1); }

    friend LaurentSeries add(const LaurentSeries& a, const LaurentSeries& b);
    friend LaurentSeries sub(const LaurentSeries& a, const LaurentSeries& b);
    friend LaurentSeries mul(const LaurentSeries& a, const LaurentSeries& b);

    /* Multiplicative inverse. Requires the lowest coefficient to be +-1;
     * anything else signals a modeling bug upstream and raises
     * NonUnitLeadingCoefficient. The result window is
     * [-lo, min(order - 2*lo, cap)). */
    LaurentSeries inverted(long order_cap = kExactOrder) const;

    // Formal substitution q -> q^{s_num/s_den}; exponents scale exactly and
    // the output grid is the minimal denominator that represents them all.
    LaurentSeries substituted_power(long s_num, long s_den) const;

    LaurentSeries pow(long n, long order_cap = kExactOrder) const;

    // Exact window comparison below the exponent bound_num/bound_den
    // (exclusive). The bound must not exceed either order.
    static CompareResult eq_up_to(const LaurentSeries& a, const LaurentSeries& b,
                                  long bound_num, long bound_den = 1);

    // Canonical textual form: "c0*q^(e0/D) + c1*q^(e1/D) + ...".
    std::string to_string() const;

    std::string to_json() const;

    LaurentSeries operator+(const LaurentSeries& o) const { return add(*this, o); }
    LaurentSeries operator-(const LaurentSeries& o) const { return sub(*this, o); }
    LaurentSeries operator*(const LaurentSeries& o) const { return mul(*this, o); }

    // In-place multiply by (1 + sign * q^{e/D}); the cheap kernel behind
    // Pochhammer products.
    void mul_binomial_inplace(long e, int sign);

private:
    void normalize();

    long denom_;
    long lo_;
    long order_;
    std::vector<BigInt> coeffs_;
};

LaurentSeries add(const LaurentSeries& a, const LaurentSeries& b);
LaurentSeries sub(const LaurentSeries& a, const LaurentSeries& b);
LaurentSeries mul(const LaurentSeries& a, const LaurentSeries& b);

}  // namespace qbailey
