#pragma once

#include <optional>
#include <string>
#include <vector>

#include "qbailey/rat.hpp"
#include "qbailey/series.hpp"

namespace qbailey {

using IntVec = std::vector<long>;

/* The A_{N-1} Cartan matrix C_{j,k} = 2 d_{j,k} - d_{j,k-1} - d_{j,k+1}
 * together with its exact rational inverse C^{-1}_{j,k} = j(N-k)/N for
 * j <= k. N = 1 degenerates to empty matrices; every operation accepts
 * rank zero. */
class CartanData {
public:
    explicit CartanData(long N);

    long N() const { return n_; }
    long rank() const { return n_ - 1; }

    long cartan(long j, long k) const;       // 1-based, 1..N-1
    Rat inv_cartan(long j, long k) const;    // 1-based, 1..N-1

    // (C^{-1} x)_j for all j, exact.
    std::vector<Rat> inv_apply(const IntVec& x) const;

    // x C^{-1} (x - w), exact.
    Rat quad_form(const IntVec& x, const IntVec& w) const;

    // C x for integer x.
    IntVec cartan_apply(const IntVec& x) const;

private:
    long n_;
};

/* A partition with parts bounded by N-1 in any rank-bound context.
 * e_vec(N) is e_lambda = sum_i e_{lambda_i} with e_0 = e_N = 0. */
struct Partition {
    std::vector<long> parts;  // weakly decreasing, positive

    Partition() = default;
    explicit Partition(std::vector<long> p);

    long weight() const;
    IntVec e_vec(long N) const;
    std::string to_string() const;

    static std::vector<Partition> all_with(long max_part, long max_weight);
};

/* Parameters of a sigma-restricted lattice sum: rank N, modulus exponent
 * ell (a = q^ell), partition lambda, parity sigma. Construction enforces
 * ell + |lambda| + sigma N even. */
struct SigmaContext {
    long N;
    long ell;
    Partition lambda;
    int sigma;

    SigmaContext(long N_, long ell_, Partition lambda_, int sigma_);

    std::string key() const;
};

// m = C^{-1}((2L + ell) e_{N-1} + e_lambda - 2n); integral iff the point is
// sigma-admissible.
struct MSystemResult {
    std::vector<Rat> m;
    bool integral;
    IntVec m_int;  // valid when integral
};

MSystemResult m_system(const CartanData& cd, long L, long ell, const Partition& lambda,
                       const IntVec& n);

// mu = C^{-1}((M-L-k) e_1 + (M+L+ell) e_{N-1} + e_lambda
//              - sum_j (i_j + i_{j+1}) e_j - 2 eta), with i_N = k - sum i_j.
std::vector<Rat> mu_system(const CartanData& cd, long M, long L, long k, long ell,
                           const Partition& lambda, const IntVec& i, const IntVec& eta);

/* (L + (ell - |lambda|)/2)/N - (C^{-1} total)_1 in Z + sigma/2, decided
 * exactly. For N = 1 the condition is vacuous given the parity invariant. */
bool sigma_admissible(const SigmaContext& ctx, long L, const IntVec& total);

/* All n >= 0 with every m_j >= 0 integral and the sigma restriction;
 * finite because m >= 0 bounds the C^{-1}-image of n. Deterministic
 * (lexicographic) order. */
std::vector<IntVec> enumerate_delta_support(const SigmaContext& ctx, long L);

/* One admissible point of the Gamma sum: summation vectors eta (entries of
 * any sign) and i >= 0 with sum <= k, the induced integral mu >= 0, and the
 * exact minimal exponent of the term in q-units. */
struct GammaPoint {
    IntVec eta;
    IntVec i;
    IntVec mu;
    Rat min_exp;
};

/* Enumerates the support of the Gamma sum at truncation bound order_q
 * (q-units): all (eta, i) whose term is nonzero with minimal exponent
 * <= order_q. Negative eta are admitted; the scan expands over L1 shells
 * in the mu lattice (mu >= 0 is forced for a nonzero term) and stops only
 * once trailing shells certify that the per-shell minimal exponent has
 * left the window for good. Throws EnumerationBoundUnverified when the
 * certificate cannot be established. */
std::vector<GammaPoint> enumerate_gamma_support(const SigmaContext& ctx, long M, long L, long k,
                                                const Rat& order_q);

}  // namespace qbailey
