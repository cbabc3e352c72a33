#pragma once

#include <functional>
#include <optional>
#include <utility>

#include "qbailey/lattice.hpp"
#include "qbailey/qtools.hpp"
#include "qbailey/report.hpp"
#include "qbailey/series.hpp"

namespace qbailey {

/* A rho parameter of the classical kernels: either the monomial q^c or the
 * infinity limit, in which case every (rho)_n rho^{-n} collapses to
 * (-1)^n q^{n(n-1)/2} and every (x/rho)_n to 1. */
struct RhoParam {
    bool infinite = true;
    Rat exponent{0};

    static RhoParam inf() { return {true, Rat(0)}; }
    static RhoParam finite(Rat c) { return {false, c}; }

    std::string to_string() const { return infinite ? "inf" : "q^" + exponent.to_string(); }
};

using SeriesSeq = std::function<LaurentSeries(long)>;

// Wraps a sequence with a memo table safe for concurrent readers.
SeriesSeq memoized(SeriesSeq fn);

struct BaileyPair {
    long ell = 0;  // relative to a = q^ell
    SeriesSeq alpha;
    SeriesSeq beta;
    std::optional<long> alpha_support;  // alpha_L = 0 for L > bound
};

struct ConjugatePair {
    long ell = 0;
    SeriesSeq gamma;
    SeriesSeq delta;
    std::optional<long> delta_support;  // delta_r = 0 for r > bound
};

// 1/(q^{c})_n with the convention 1/(q)_n = 0 for n < 0.
LaurentSeries inv_poch_or_zero(long c, long n, const SeriesContext& ctx);

// The defining sum of Eq-(1)-type pairs: sum_{r=0..L} alpha_r /((q)_{L-r}(aq)_{L+r}).
LaurentSeries bailey_beta_sum(const BaileyPair& bp, long L, const SeriesContext& ctx);

// The defining sum of the conjugate relation: sum_{r>=L} delta_r /((q)_{r-L}(aq)_{r+L}).
LaurentSeries conjugate_gamma_sum(const ConjugatePair& cp, long L, const SeriesContext& ctx);

BaileyPair beta_from_alpha(long ell, SeriesSeq alpha, std::optional<long> alpha_support,
                           const SeriesContext& ctx);

ConjugatePair gamma_from_delta(long ell, SeriesSeq delta, std::optional<long> delta_support,
                               const SeriesContext& ctx);

struct PairingSides {
    LaurentSeries lhs;  // sum alpha_L gamma_L
    LaurentSeries rhs;  // sum beta_L delta_L
};

PairingSides pairing_sum(const BaileyPair& bp, const ConjugatePair& cp, const SeriesContext& ctx);

// The classical rho-parametrized conjugate pair; both-infinite reproduces
// gamma_L = a^L q^{L^2}/((q)_{M-L}(aq)_{M+L}), delta_L = a^L q^{L^2}/(q)_{M-L}.
ConjugatePair classical_conjugate(long ell, RhoParam rho1, RhoParam rho2, long M,
                                  const SeriesContext& ctx);

/* Parameters of the lattice-sum hierarchy: truncation level M on top of the
 * sigma-restricted cell (N, ell, lambda, sigma). */
struct HLParams {
    long M;
    SigmaContext sc;

    std::string key() const { return sc.key() + ",M=" + std::to_string(M); }
};

LaurentSeries hl_Delta(const HLParams& p, long L, long k, const SeriesContext& ctx);
LaurentSeries hl_Gamma(const HLParams& p, long L, long k, const SeriesContext& ctx);

// gamma^{(k)}_L = Gamma_{L,k}, delta^{(k)}_L = Delta_{L+k,k}/(aq)_k,
// a conjugate pair relative to q^{ell+k}.
ConjugatePair hl_conjugate(const HLParams& p, long k, const SeriesContext& ctx);

// The four Bailey-pair transformations.
BaileyPair transform_AB(const BaileyPair& bp, RhoParam r1, RhoParam r2, const SeriesContext& ctx);
BaileyPair transform_lattice(const BaileyPair& bp, RhoParam r1, RhoParam r2,
                             const SeriesContext& ctx);
BaileyPair transform_chain_q(const BaileyPair& bp, RhoParam r1, RhoParam r2,
                             const SeriesContext& ctx);
BaileyPair transform_lattice2(const BaileyPair& bp, RhoParam r1, RhoParam r2,
                              const SeriesContext& ctx);

enum class SeedPair { I, II, III };

// Seeds I and II are relative to q; III (with its delta in {0,1}) to 1.
BaileyPair seed_pair(SeedPair which, long delta, const SeriesContext& ctx);

/* The chain/lattice compositions used for the main identity: k >= 2,
 * 1 <= i <= k, delta in {0,1}. chained_pair composes the actual transforms;
 * the closed form is the target it is audited against. For (delta=0, i=k=2)
 * no composition route exists and chained_pair falls back to the closed
 * form (which still verifies as a Bailey pair). */
BaileyPair chained_pair(long k, long i, long delta, const SeriesContext& ctx);
BaileyPair chained_pair_closed_form(long k, long i, long delta, const SeriesContext& ctx);
bool chained_pair_has_transform_route(long k, long i, long delta);

struct LinearKernel {
    std::function<LaurentSeries(long, long)> at;  // entry (row, col)
};

/* Conjugate-side counterpart of a Bailey-pair transformation: given kernels
 * P, Q mapping pairs relative to a to pairs relative to a q^{b_exp},
 * gamma'_L = sum_{k>=L} P_{k,L} gamma_k and delta'_L = sum_{k>=L} Q_{k,L} delta_k
 * form a conjugate pair relative to a q^{-b_exp}. */
ConjugatePair conjugate_transform(const ConjugatePair& cp, const LinearKernel& P,
                                  const LinearKernel& Q, long b_exp, const SeriesContext& ctx);

// The rho -> infinity kernels of the chain transformation: diagonal
// P_{L,L} = a^L q^{L^2} and Q_{L,k} = a^k q^{k^2}/(q)_{L-k}; b_exp = 0.
std::pair<LinearKernel, LinearKernel> ab_infinity_kernels(long ell, const SeriesContext& ctx);

// Both sides of the polynomial identity behind the hierarchy (f1 = sum over
// (eta, i); f2 = finite r-sum against the unprimed lattice sums).
LaurentSeries f_one(const SigmaContext& sc, long M, long L, long k, const SeriesContext& ctx);
LaurentSeries f_two(const SigmaContext& sc, long M, long L, long k, const SeriesContext& ctx);

enum class FSide { F1, F2 };

// f(M,L,k) = f(M-1,L,k) + q^{M+L+ell}(f(M,L,k+1) - f(M-1,L,k)), 0 <= k < M-L.
VerificationReport check_recurrence_step(FSide side, const SigmaContext& sc, long M, long L,
                                         long k, const SeriesContext& ctx);

// f(M,L,M-L) = q^{-(2L+ell+1)(N-1)/N} f(M,L+1,M-L-1).
VerificationReport check_recurrence_boundary(FSide side, const SigmaContext& sc, long M, long L,
                                             const SeriesContext& ctx);

// f1(M,M,0) = f2(M,M,0).
VerificationReport check_initial_condition(const SigmaContext& sc, long M,
                                           const SeriesContext& ctx);

enum class TelescopicVariant { RTele, BTele };

/* The telescopic expansions of products of primed Gaussian polynomials,
 * checked as exact Laurent-polynomial identities. */
VerificationReport telescopic_check(long N, const IntVec& A, const IntVec& B,
                                    TelescopicVariant variant);

// Re-derives the defining sums and compares; the audit applied to every
// transform output and constructed pair.
VerificationReport verify_bailey_pair(const BaileyPair& bp, long L_max, long order_num,
                                      long order_den, const SeriesContext& ctx,
                                      const std::string& cell);
VerificationReport verify_conjugate_pair(const ConjugatePair& cp, long L_max, long order_num,
                                         long order_den, const SeriesContext& ctx,
                                         const std::string& cell);

// Finite-support Bailey pair with pseudorandom Laurent-polynomial alphas;
// used by the transform audits, reproducible from the seed.
BaileyPair random_bailey_pair(unsigned long seed, long ell, long support,
                              const SeriesContext& ctx);

}  // namespace qbailey
