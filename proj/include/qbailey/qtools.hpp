#pragma once

#include <optional>
#include <vector>

#include "qbailey/rat.hpp"
#include "qbailey/series.hpp"

namespace qbailey {

/* The shifted factorial (+-q^c; q^step)_length. An empty length means the
 * infinite product, which terminates under truncation only for c > 0.
 * Negative lengths follow (a)_n = (a)_infty / (a q^n)_infty, i.e. a finite
 * product of inverted factors. */
struct PochhammerSpec {
    Rat start;                   // exponent c of the argument q^c
    Rat step{1};                 // base q^step, step > 0
    std::optional<long> length;  // nullopt = infinite
    bool negated = false;        // argument -q^c

    static PochhammerSpec finite(Rat c, Rat step, long len, bool negated = false) {
        return {c, step, len, negated};
    }
    static PochhammerSpec infinite(Rat c, Rat step, bool negated = false) {
        return {c, step, std::nullopt, negated};
    }
};

LaurentSeries pochhammer(const PochhammerSpec& spec, const SeriesContext& ctx);

// (q^c; q)_len on the integer grid; len = nullopt for the infinite product.
LaurentSeries poch_qn(long c, std::optional<long> len, const SeriesContext& ctx);

// 1 / (q^c; q)_len
LaurentSeries inv_poch_qn(long c, std::optional<long> len, const SeriesContext& ctx);

/* Gaussian polynomial [top | bottom] = (q)_top / ((q)_bottom (q)_{top-bottom})
 * for bottom >= 0 and top-bottom >= 0, zero otherwise. Exact polynomial. */
LaurentSeries gauss_binom(long top, long bottom);

/* Primed Gaussian polynomial: with m = top-bottom, n = bottom it equals
 * (q^{n+1})_m / (q)_m for m >= 0 and zero otherwise. A Laurent polynomial,
 * with negative exponents and signs when n < 0. */
LaurentSeries gauss_binom_primed(long top, long bottom);

/* Lowest exponent of the primed Gaussian polynomial with parameters (n, m):
 * the negative-exponent mass sum_{s=1..m, n+s<0} (n+s). */
long negexp(long n, long m);

// Highest exponent of the same numerator product: sum_{s=1..m, n+s>0} (n+s).
long posexp(long n, long m);

/* q-multinomial (q)_k / ((q)_{v_1} ... (q)_{v_{N-1}} (q)_{k - sum v}); zero
 * unless all v_j >= 0 and k - sum v >= 0. base_inverse computes it at base
 * 1/q via the exact transformation (q^{-1};q^{-1})_n = (-1)^n q^{-n(n+1)/2} (q)_n,
 * which shifts the base-q polynomial by (sum_j i_j^2 - k^2)/2 with
 * i_N = k - sum v. */
LaurentSeries q_multinomial(long k, const std::vector<long>& v, bool base_inverse);

// Exponent of the leading (lowest) term of the 1/q multinomial.
long multinomial_inv_lowexp(long k, const std::vector<long>& v);

// lim_{a->infty} a^{-n} (a)_n = (-1)^n q^{n(n-1)/2}, as an exact monomial.
LaurentSeries limit_shifted_factorial(long n);

/* One congruence condition on the factor index j: residues are reduced
 * mod modulus and j is excluded when it matches any listed residue. */
struct ResidueCondition {
    long modulus;
    std::vector<long> excluded;

    bool allows(long j) const;
};

/* prod_{j>=1, j allowed by every condition} (1 - q^j)^{-1}, truncated.
 * Factors beyond the truncation order contribute nothing and are skipped. */
LaurentSeries residue_product(const std::vector<ResidueCondition>& conditions,
                              const SeriesContext& ctx);

}  // namespace qbailey
