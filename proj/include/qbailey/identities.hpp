#pragma once

#include "qbailey/bailey.hpp"
#include "qbailey/lattice.hpp"
#include "qbailey/qtools.hpp"
#include "qbailey/report.hpp"
#include "qbailey/series.hpp"

namespace qbailey {

/* One cell of the main identity family: rank N, delta in {0,1}, k >= 2,
 * 1 <= i <= k, a partition with parts <= N-1 and |lambda| + sigma N even. */
struct IdentityCell {
    long N;
    long delta;
    long k;
    long i;
    Partition lambda;
    int sigma;

    IdentityCell(long N_, long delta_, long k_, long i_, Partition lambda_, int sigma_);

    std::string key() const;
};

// The sigma-restricted eta-sum with plain (q)_eta denominators (the
// M -> infinity form); condition evaluated at index L, which may be negative.
LaurentSeries sigma_eta_sum(const SigmaContext& sc, long L, const SeriesContext& ctx);

// Both sides of the higher-level pairing of a Bailey pair relative to
// q^{ell} with the rank-N lattice sums (the M -> infinity route).
LaurentSeries hl_lemma_lhs(const BaileyPair& bp, long N, const Partition& lambda, int sigma,
                           const SeriesContext& ctx);
LaurentSeries hl_lemma_rhs(const BaileyPair& bp, long N, const Partition& lambda, int sigma,
                           const SeriesContext& ctx);

// Both sides of the main identity (bilateral j-sum against the (k-1)-fold
// restricted sum).
LaurentSeries thm44_lhs(const IdentityCell& cell, const SeriesContext& ctx);
LaurentSeries thm44_rhs(const IdentityCell& cell, const SeriesContext& ctx);

// The N=1 family: multi-sum side and congruence-product side.
LaurentSeries ag_bressoud_sum(long k, long i, long delta, const SeriesContext& ctx);
LaurentSeries ag_bressoud_product(long k, long i, long delta, const SeriesContext& ctx);

enum class GGVariant { N2a, N2b };

// The N=2 families with the (-q;q^2)_{N_1} factor.
LaurentSeries gg_sum(long k, long i, GGVariant variant, const SeriesContext& ctx);
LaurentSeries gg_product(long k, long i, GGVariant variant, const SeriesContext& ctx);

/* The two auxiliary summations used to collapse the N=2 identities
 * (q-binomial expansion against half-integral exponents, grid D = 2). */
VerificationReport corollary_proof_sum_checks(long lambda_weight, long r1,
                                              const SeriesContext& ctx);

/* Level-N string function index; normalized through
 * c_m^l = c_{-m}^l = c_{m+2N}^l = c_{N-m}^{N-l} into |m| <= l <= N-1. */
struct StringFunctionIndex {
    long N;
    long ell;
    long m;
};

LaurentSeries string_function(const StringFunctionIndex& idx, const SeriesContext& ctx);

// Exponent prefactor h_m^l = l(l+2)/(4(N+2)) - m^2/(4N).
Rat string_function_h(const StringFunctionIndex& idx);

/* The mod-N regrouping of the higher-level pairing's alpha side: classes of
 * L mod N against per-class eta-sums. Field-tested against hl_lemma_lhs.
 * lambda = (ell_prime), single part (empty for ell_prime = 0). */
LaurentSeries e55_lhs(const BaileyPair& bp, long N, long ell_prime, int sigma,
                      const SeriesContext& ctx);

// The same regrouping with the eta-sums replaced by level-N string
// functions; equals hl_lemma_lhs on the window where the indices normalize.
LaurentSeries e55_string_assembly(const BaileyPair& bp, long N, long ell_prime, int sigma,
                                  const SeriesContext& ctx);

// Bilateral theta sum sum_j (-1)^j z^j q^{j(j-1)/2} at z = q^c versus the
// product (q)_inf (z)_inf (q/z)_inf; needs 0 < c < 1 for truncation.
VerificationReport jacobi_triple_product_check(const Rat& c, const SeriesContext& ctx);

}  // namespace qbailey
