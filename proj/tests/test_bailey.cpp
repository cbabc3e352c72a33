#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <functional>
#include <numeric>
#include <random>

#include "qbailey/bailey.hpp"

using namespace qbailey;

namespace {

const SeriesContext kCtx{2, 66};  // D=2, a hair beyond q^30

bool eq_units(const LaurentSeries& a, const LaurentSeries& b, long units) {
    long K = std::lcm(a.denom(), b.denom());
    return LaurentSeries::eq_up_to(a, b, units * K + 1, K).equal;
}

BaileyPair unit_pair(long ell, const SeriesContext& ctx) {
    SeriesSeq alpha = [](long L) {
        return L == 0 ? LaurentSeries::monomial(1, 0, 1L) : LaurentSeries();
    };
    return beta_from_alpha(ell, alpha, 0, ctx);
}

}  // namespace

TEST_CASE("unit pair beta is 1/((q)_L (aq)_L)") {
    for (long ell : {0L, 1L, 2L}) {
        BaileyPair bp = unit_pair(ell, kCtx);
        for (long L = 0; L <= 5; ++L) {
            LaurentSeries expect = mul(inv_poch_or_zero(1, L, kCtx),
                                       inv_poch_or_zero(ell + 1, L, kCtx));
            CHECK(eq_units(bp.beta(L), expect, 25));
        }
    }
}

TEST_CASE("seed pair I has beta = delta_{L,0}") {
    BaileyPair bp = seed_pair(SeedPair::I, 0, kCtx);
    CHECK(bp.ell == 1);
    // sum_{r<=L} alpha_r/((q)_{L-r}(q^2)_{L+r}) must vanish for 1 <= L <= 6
    for (long L = 1; L <= 6; ++L) {
        LaurentSeries s = bailey_beta_sum(bp, L, kCtx);
        CHECK(eq_units(s, LaurentSeries(), 30));
    }
    CHECK(eq_units(bailey_beta_sum(bp, 0, kCtx), LaurentSeries::monomial(1, 0, 1L), 30));
}

TEST_CASE("seed pairs II and III satisfy the defining relation") {
    VerificationReport r2 =
        verify_bailey_pair(seed_pair(SeedPair::II, 0, kCtx), 6, 30 * 2 + 1, 2, kCtx, "seed-II");
    CHECK(r2.passed());
    for (long delta : {0L, 1L}) {
        BaileyPair bp = seed_pair(SeedPair::III, delta, kCtx);
        VerificationReport r = verify_bailey_pair(bp, 6, 30 * 2 + 1, 2, kCtx, "seed-III");
        CHECK(r.passed());
    }
    // beta_1 = q/(q)_1 for delta = 1
    BaileyPair b3 = seed_pair(SeedPair::III, 1, kCtx);
    LaurentSeries expect = inv_poch_or_zero(1, 1, kCtx).scaled(1, 1 * kCtx.denom);
    CHECK(eq_units(b3.beta(1), expect, 25));
}

TEST_CASE("classical conjugate pair at the infinite limit reproduces a^L q^{L^2} forms") {
    for (long ell : {0L, 1L}) {
        for (long M : {0L, 2L, 4L}) {
            ConjugatePair cp =
                classical_conjugate(ell, RhoParam::inf(), RhoParam::inf(), M, kCtx);
            for (long L = 0; L <= M; ++L) {
                LaurentSeries gamma_expect =
                    mul(inv_poch_or_zero(1, M - L, kCtx), inv_poch_or_zero(ell + 1, M + L, kCtx))
                        .scaled(1, (ell * L + L * L) * kCtx.denom);
                LaurentSeries delta_expect =
                    inv_poch_or_zero(1, M - L, kCtx).scaled(1, (ell * L + L * L) * kCtx.denom);
                CHECK(eq_units(cp.gamma(L), gamma_expect, 25));
                CHECK(eq_units(cp.delta(L), delta_expect, 25));
            }
            CHECK(cp.delta(M + 1).is_zero_window());
        }
    }
}

TEST_CASE("classical conjugate pair verifies for finite rho") {
    for (long M = 0; M <= 4; ++M) {
        ConjugatePair cp = classical_conjugate(1, RhoParam::finite(Rat(1, 2)),
                                               RhoParam::finite(Rat(5, 2)), M, kCtx);
        VerificationReport r =
            verify_conjugate_pair(cp, M, 25 * kCtx.denom + 1, kCtx.denom, kCtx, "classical");
        CHECK(r.passed());
    }
    ConjugatePair cp = classical_conjugate(0, RhoParam::finite(Rat(3, 2)), RhoParam::inf(), 3,
                                           kCtx);
    CHECK(verify_conjugate_pair(cp, 3, 25 * kCtx.denom + 1, kCtx.denom, kCtx, "cc").passed());
}

TEST_CASE("gamma_from_delta rebuilds the classical gamma") {
    // delta_L = a^L q^{L^2}/(q)_{M-L} with a = q, M = 3
    long ell = 1, M = 3;
    SeriesSeq delta = [=](long L) {
        if (L < 0 || L > M) return LaurentSeries();
        return inv_poch_or_zero(1, M - L, kCtx).scaled(1, (ell * L + L * L) * kCtx.denom);
    };
    ConjugatePair cp = gamma_from_delta(ell, delta, M, kCtx);
    for (long L = 0; L <= M; ++L) {
        LaurentSeries expect =
            mul(inv_poch_or_zero(1, M - L, kCtx), inv_poch_or_zero(ell + 1, M + L, kCtx))
                .scaled(1, (ell * L + L * L) * kCtx.denom);
        CHECK(eq_units(cp.gamma(L), expect, 25));
    }
}

TEST_CASE("pairing identity") {
    // the unit pair against any conjugate pair: lhs = gamma_0 and
    // rhs = sum delta_L/((q)_L(aq)_L) agree by the defining relation
    BaileyPair bp = unit_pair(1, kCtx);
    ConjugatePair cp = classical_conjugate(1, RhoParam::inf(), RhoParam::inf(), 4, kCtx);
    PairingSides sides = pairing_sum(bp, cp, kCtx);
    CHECK(eq_units(sides.lhs, sides.rhs, 25));
    CHECK(eq_units(sides.lhs, cp.gamma(0), 25));

    // modulus mismatch is rejected
    ConjugatePair cp0 = classical_conjugate(0, RhoParam::inf(), RhoParam::inf(), 4, kCtx);
    CHECK_THROWS_AS(pairing_sum(bp, cp0, kCtx), ModulusMismatch);
}

TEST_CASE("pairing identity for random pairs against derived conjugates") {
    std::mt19937_64 rng(2024);
    for (int t = 0; t < 25; ++t) {
        long ell = static_cast<long>(rng() % 3);
        BaileyPair bp = random_bailey_pair(rng(), ell, 3, kCtx);
        long M = 4;
        SeriesSeq delta = [=](long L) {
            if (L < 0 || L > M) return LaurentSeries();
            return inv_poch_or_zero(1, M - L, kCtx).scaled(1, (ell * L + L * L) * kCtx.denom);
        };
        ConjugatePair cp = gamma_from_delta(ell, delta, M, kCtx);
        PairingSides sides = pairing_sum(bp, cp, kCtx);
        CHECK(eq_units(sides.lhs, sides.rhs, 20));
    }
}

TEST_CASE("hl_Delta reduces to the classical delta at N=1, k=0") {
    for (long ell : {0L, 2L}) {
        int sigma = 0;
        HLParams p{4, SigmaContext(1, ell, Partition{}, sigma)};
        SeriesContext ctx{2, 60};
        for (long L = 0; L <= 4; ++L) {
            LaurentSeries expect =
                inv_poch_or_zero(1, 4 - L, ctx).scaled(1, (ell * L + L * L) * ctx.denom);
            CHECK(eq_units(hl_Delta(p, L, 0, ctx), expect, 25));
        }
    }
}

TEST_CASE("hl_Delta N=2 cell against a hand expansion") {
    /* N=2, M=1, L=1, k=0, l=0, lam empty. The m-integral points with
     * m >= 0 at L=1 are n=(0) (m=1, sigma=1 class) and n=(1) (m=0, sigma=0
     * class). Both [1|0] and [1|1] equal 1 and the quadratic exponents are
     * 0 and 1/2, so with the q^{L^2/2} = q^{1/2} prefactor:
     *   sigma=1: Delta_{1,0} = q^{1/2},  sigma=0: Delta_{1,0} = q. */
    SeriesContext ctx{4, 100};
    HLParams p1{1, SigmaContext(2, 0, Partition{}, 1)};
    CHECK(eq_units(hl_Delta(p1, 1, 0, ctx), LaurentSeries::monomial(1, 1, 2L), 20));
    HLParams p0{1, SigmaContext(2, 0, Partition{}, 0)};
    CHECK(eq_units(hl_Delta(p0, 1, 0, ctx), LaurentSeries::monomial(1, 1, 1L), 20));
}

TEST_CASE("hl_Gamma at k=0 equals the unprimed corollary form") {
    // gamma_L of the corollary: prefactor / ((q)_{M-L}(aq)_{M+L}) times the
    // eta-sum with mu from the k=0 system and unprimed binomials
    for (long N : {2L, 3L}) {
        for (long ell : {0L, 1L}) {
            for (const Partition& lam : Partition::all_with(N - 1, 2)) {
                for (int sigma : {0, 1}) {
                    if ((ell + lam.weight() + sigma * N) % 2 != 0) continue;
                    SeriesContext ctx{2 * N, (20 + 4) * 2 * N};
                    long M = 3;
                    HLParams p{M, SigmaContext(N, ell, lam, sigma)};
                    CartanData cd(N);
                    IntVec e_lam = lam.e_vec(N);
                    for (long L = 0; L <= M; ++L) {
                        LaurentSeries acc = LaurentSeries::zero(2 * N, ctx.order);
                        IntVec eta(static_cast<size_t>(N - 1), 0);
                        std::function<void(long)> rec = [&](long pos) {
                            if (pos == N - 1) {
                                if (!sigma_admissible(p.sc, L, eta)) return;
                                std::vector<Rat> mu = mu_system(
                                    cd, M, L, 0, ell, lam, IntVec(eta.size(), 0), eta);
                                LaurentSeries t = LaurentSeries::monomial(
                                    1, cd.quad_form(eta, e_lam).on_grid(2 * N), 2 * N);
                                for (long j = 0; j < N - 1; ++j) {
                                    if (!mu[static_cast<size_t>(j)].is_integer()) return;
                                    long mj = mu[static_cast<size_t>(j)].num;
                                    long ej = eta[static_cast<size_t>(j)];
                                    t = mul(t, gauss_binom(mj + ej, ej));
                                }
                                acc = add(acc, t);
                                return;
                            }
                            for (long v = 0; v <= 8; ++v) {
                                eta[static_cast<size_t>(pos)] = v;
                                rec(pos + 1);
                            }
                            eta[static_cast<size_t>(pos)] = 0;
                        };
                        rec(0);
                        Rat pre = Rat(ell * L + L * L, N);
                        long grid = std::lcm(ctx.denom, pre.den);
                        acc = mul(acc, LaurentSeries::monomial(1, pre.on_grid(grid), grid));
                        acc = mul(acc, inv_poch_or_zero(1, M - L, ctx));
                        acc = mul(acc, inv_poch_or_zero(ell + 1, M + L, ctx));
                        CHECK(eq_units(hl_Gamma(p, L, 0, ctx), acc, 18));
                    }
                }
            }
        }
    }
}

TEST_CASE("hl_conjugate at N=1, k=0 is the classical infinite-rho pair") {
    SeriesContext ctx{2, 60};
    HLParams p{4, SigmaContext(1, 1, Partition{}, 1)};
    ConjugatePair hl = hl_conjugate(p, 0, ctx);
    ConjugatePair classical = classical_conjugate(1, RhoParam::inf(), RhoParam::inf(), 4, ctx);
    CHECK(hl.ell == classical.ell);
    for (long L = 0; L <= 4; ++L) {
        CHECK(eq_units(hl.gamma(L), classical.gamma(L), 25));
        CHECK(eq_units(hl.delta(L), classical.delta(L), 25));
    }
}

TEST_CASE("hl_conjugate modulus bookkeeping and verification sample") {
    SeriesContext ctx{4, (20 + 5) * 4};
    HLParams p{3, SigmaContext(2, 1, Partition{{1}}, 0)};
    for (long k = 0; k <= 2; ++k) {
        ConjugatePair cp = hl_conjugate(p, k, ctx);
        CHECK(cp.ell == 1 + k);
        VerificationReport r = verify_conjugate_pair(cp, 3 - k, 18 * ctx.denom + 1, ctx.denom,
                                                     ctx, "hl-conjugate");
        CAPTURE(k);
        CHECK(r.passed());
    }
}

TEST_CASE("negative control: corrupted delta fails with a first mismatch") {
    SeriesContext ctx{2, 60};
    ConjugatePair cp = classical_conjugate(1, RhoParam::inf(), RhoParam::inf(), 3, ctx);
    SeriesSeq delta0 = cp.delta;
    SeriesSeq corrupted = [delta0](long L) {
        LaurentSeries d = delta0(L);
        if (L == 1) d = add(d, LaurentSeries::monomial(1, 7, 1L));
        return d;
    };
    ConjugatePair rebuilt = gamma_from_delta(cp.ell, corrupted, cp.delta_support, ctx);
    bool found_fail = false;
    for (long L = 0; L <= 3 && !found_fail; ++L) {
        CompareResult cmp =
            LaurentSeries::eq_up_to(cp.gamma(L), rebuilt.gamma(L), 20 * 2 + 1, 2);
        if (!cmp.equal) {
            found_fail = true;
            CHECK(cmp.mismatch_num >= 0);
        }
    }
    CHECK(found_fail);
}

TEST_CASE("transform_AB infinite limit collapses a delta beta to 1/(q)_L") {
    // relative to 1 with beta_r = delta_{r,0}: the beta kernel survives at
    // r = 0 only, so beta'_L = 1/(q)_L
    BaileyPair bp;
    bp.ell = 0;
    bp.alpha = [](long L) {
        return L == 0 ? LaurentSeries::monomial(1, 0, 1L) : LaurentSeries();
    };
    bp.beta = [](long L) {
        return L == 0 ? LaurentSeries::monomial(1, 0, 1L) : LaurentSeries();
    };
    BaileyPair out = transform_AB(bp, RhoParam::inf(), RhoParam::inf(), kCtx);
    CHECK(out.ell == 0);
    for (long L = 0; L <= 5; ++L)
        CHECK(eq_units(out.beta(L), inv_poch_or_zero(1, L, kCtx), 25));
    // and the alpha route: alpha'_L = a^L q^{L^2} alpha_L keeps the unit alpha
    CHECK(eq_units(out.alpha(0), LaurentSeries::monomial(1, 0, 1L), 25));
    CHECK(out.alpha(3).is_zero_window());
}

TEST_CASE("transforms re-verify the defining relation (sampled)") {
    std::mt19937_64 rng(77);
    for (int t = 0; t < 10; ++t) {
        unsigned long seed = rng();
        /* finite-rho kernels carry negative Laurent exponents, which consume
         * window; the working order carries margin for that */
        SeriesContext ctx{2, (15 + 64) * 2};
        for (int which = 0; which < 4; ++which) {
            long ell = (which == 1 || which == 3) ? 1 + static_cast<long>(rng() % 2)
                                                  : static_cast<long>(rng() % 2);
            BaileyPair bp =
                random_bailey_pair(seed + static_cast<unsigned long>(which), ell, 3, ctx);
            RhoParam r1 = (t % 2 == 0) ? RhoParam::inf() : RhoParam::finite(Rat(1, 2));
            RhoParam r2 = (t % 3 == 0) ? RhoParam::inf() : RhoParam::finite(Rat(5, 2));
            BaileyPair out;
            long expected_ell = bp.ell;
            switch (which) {
                case 0: out = transform_AB(bp, r1, r2, ctx); break;
                case 1:
                    out = transform_lattice(bp, r1, r2, ctx);
                    expected_ell = bp.ell - 1;
                    break;
                case 2: out = transform_chain_q(bp, r1, r2, ctx); break;
                default:
                    out = transform_lattice2(bp, r1, r2, ctx);
                    expected_ell = bp.ell - 1;
                    break;
            }
            CHECK(out.ell == expected_ell);
            VerificationReport r =
                verify_bailey_pair(out, 5, 15 * ctx.denom + 1, ctx.denom, ctx, "transform");
            CAPTURE(which);
            CAPTURE(seed);
            CHECK(r.passed());
        }
    }
}

TEST_CASE("lattice transforms keep alpha_0") {
    SeriesContext ctx{2, 40};
    BaileyPair bp = random_bailey_pair(5150, 2, 3, ctx);
    BaileyPair l1 = transform_lattice(bp, RhoParam::inf(), RhoParam::inf(), ctx);
    BaileyPair l2 = transform_lattice2(bp, RhoParam::inf(), RhoParam::inf(), ctx);
    CHECK(eq_units(l1.alpha(0), bp.alpha(0), 15));
    CHECK(eq_units(l2.alpha(0), bp.alpha(0), 15));
    BaileyPair c = transform_chain_q(bp, RhoParam::inf(), RhoParam::inf(), ctx);
    CHECK(eq_units(c.alpha(0), bp.alpha(0), 15));
    CHECK(eq_units(c.beta(0), bp.beta(0), 15));
}

TEST_CASE("chained pairs match their closed forms") {
    SeriesContext ctx{1, 25 + 6};
    for (long delta : {0L, 1L})
        for (long k = 2; k <= 4; ++k)
            for (long i = 1; i <= k; ++i) {
                if (!chained_pair_has_transform_route(k, i, delta)) continue;
                BaileyPair composed = chained_pair(k, i, delta, ctx);
                BaileyPair closed = chained_pair_closed_form(k, i, delta, ctx);
                CHECK(composed.ell == 0);
                for (long L = 0; L <= 5; ++L) {
                    CAPTURE(delta);
                    CAPTURE(k);
                    CAPTURE(i);
                    CAPTURE(L);
                    CHECK(eq_units(composed.alpha(L), closed.alpha(L), 25));
                    CHECK(eq_units(composed.beta(L), closed.beta(L), 25));
                }
            }
}

TEST_CASE("closed forms are Bailey pairs even off the composition routes") {
    SeriesContext ctx{1, 30};
    // (delta, i, k) = (0, 2, 2) has no composition route
    BaileyPair bp = chained_pair(2, 2, 0, ctx);
    CHECK(verify_bailey_pair(bp, 6, 25 + 1, 1, ctx, "closed-form-0-2-2").passed());
}

TEST_CASE("conjugate transform with identity kernels is the identity") {
    SeriesContext ctx{2, 60};
    ConjugatePair cp = classical_conjugate(1, RhoParam::inf(), RhoParam::inf(), 3, ctx);
    LinearKernel ident;
    ident.at = [](long row, long col) {
        return row == col ? LaurentSeries::monomial(1, 0, 1L) : LaurentSeries();
    };
    ConjugatePair out = conjugate_transform(cp, ident, ident, 0, ctx);
    CHECK(out.ell == cp.ell);
    for (long L = 0; L <= 3; ++L) {
        CHECK(eq_units(out.gamma(L), cp.gamma(L), 25));
        CHECK(eq_units(out.delta(L), cp.delta(L), 25));
    }
}

TEST_CASE("conjugate transform with the shipped infinite kernels verifies") {
    SeriesContext ctx{2, (25 + 6) * 2};
    for (long ell : {0L, 1L}) {
        ConjugatePair cp = classical_conjugate(ell, RhoParam::inf(), RhoParam::inf(), 3, ctx);
        auto [P, Q] = ab_infinity_kernels(ell, ctx);
        ConjugatePair out = conjugate_transform(cp, P, Q, 0, ctx);
        CHECK(out.ell == ell);
        VerificationReport r =
            verify_conjugate_pair(out, 3, 25 * ctx.denom + 1, ctx.denom, ctx, "pq-transform");
        CHECK(r.passed());
    }
}

TEST_CASE("initial condition f1(M,M,0) = f2(M,M,0)") {
    for (long N : {1L, 2L, 3L})
        for (long ell : {0L, 1L})
            for (const Partition& lam : Partition::all_with(N - 1, 2))
                for (int sigma : {0, 1}) {
                    if ((ell + lam.weight() + sigma * N) % 2 != 0) continue;
                    SeriesContext ctx{2 * N, (18 + 4) * 2 * N};
                    for (long M = 0; M <= 3; ++M) {
                        VerificationReport r =
                            check_initial_condition(SigmaContext(N, ell, lam, sigma), M, ctx);
                        CAPTURE(r.cell);
                        CHECK(r.passed());
                    }
                }
}

TEST_CASE("f1 equals f2 on sampled cells") {
    SeriesContext ctx{4, (18 + 4) * 4};
    SigmaContext sc(2, 0, Partition{}, 0);
    for (long M = 0; M <= 3; ++M)
        for (long L = 0; L <= M; ++L)
            for (long k = 0; k <= M - L; ++k) {
                LaurentSeries lhs = f_one(sc, M, L, k, ctx);
                LaurentSeries rhs = f_two(sc, M, L, k, ctx);
                CAPTURE(M);
                CAPTURE(L);
                CAPTURE(k);
                CHECK(eq_units(lhs, rhs, 18));
            }
}

TEST_CASE("f recurrences on sampled cells") {
    SeriesContext ctx{6, (15 + 4) * 6};
    SigmaContext sc(3, 1, Partition{{1}}, 0);
    for (FSide side : {FSide::F1, FSide::F2}) {
        CHECK(check_recurrence_step(side, sc, 2, 0, 0, ctx).passed());
        CHECK(check_recurrence_step(side, sc, 3, 1, 0, ctx).passed());
        CHECK(check_recurrence_boundary(side, sc, 2, 0, ctx).passed());
        CHECK(check_recurrence_boundary(side, sc, 2, 1, ctx).passed());
    }
    // N=1 boundary: the exponent factor (N-1)/N vanishes
    SigmaContext sc1(1, 0, Partition{}, 0);
    CHECK(check_recurrence_boundary(FSide::F1, sc1, 2, 0, SeriesContext{2, 40}).passed());
}

TEST_CASE("telescopic expansions") {
    // N=2 reduces to the single-binomial recurrence
    for (long A = -3; A <= 3; ++A)
        for (long B = -3; B <= 3; ++B) {
            CHECK(telescopic_check(2, {A}, {B}, TelescopicVariant::RTele).passed());
            CHECK(telescopic_check(2, {A}, {B}, TelescopicVariant::BTele).passed());
        }
    // sampled N=3 cells, including negative entries
    for (long a1 : {-2L, 0L, 2L})
        for (long a2 : {-1L, 1L})
            for (long b1 : {-2L, 1L})
                for (long b2 : {-1L, 3L}) {
                    CHECK(telescopic_check(3, {a1, a2}, {b1, b2}, TelescopicVariant::RTele)
                              .passed());
                    CHECK(telescopic_check(3, {a1, a2}, {b1, b2}, TelescopicVariant::BTele)
                              .passed());
                }
}
