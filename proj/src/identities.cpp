#include "qbailey/identities.hpp"

#include <functional>
#include <numeric>
#include <sstream>

namespace qbailey {

namespace {

constexpr long kGrowthPatience = 8;
constexpr long kSumCap = 100000;

long inv_cap(const SeriesContext& ctx) { return 2 * ctx.order + 64 * ctx.denom; }

LaurentSeries shift_q(const LaurentSeries& s, const Rat& e) {
    if (e == Rat(0)) return s;
    long grid = std::lcm(s.denom(), e.den);
    return mul(s, LaurentSeries::monomial(1, e.on_grid(grid), grid));
}

Rat term_low(const LaurentSeries& t) {
    if (t.is_zero_window()) return Rat(1L << 40);
    return Rat(t.lo(), t.denom());
}

LaurentSeries sum_terms(const std::function<LaurentSeries(long)>& term, long start,
                        std::optional<long> support, const SeriesContext& ctx, const char* what) {
    LaurentSeries acc = LaurentSeries::zero(ctx.denom, ctx.order);
    if (support) {
        for (long r = start; r <= *support; ++r) acc = add(acc, term(r));
        return acc;
    }
    Rat target(ctx.order, ctx.denom);
    long clean_run = 0;
    std::optional<Rat> prev;
    for (long r = start; r < start + kSumCap; ++r) {
        LaurentSeries t = term(r);
        Rat low = term_low(t);
        acc = add(acc, t);
        bool beyond = low > target;
        bool monotone = !prev || low >= *prev;
        if (beyond && monotone)
            ++clean_run;
        else
            clean_run = 0;
        if (!t.is_zero_window()) prev = low;
        if (clean_run >= kGrowthPatience)
            return acc.truncated(ctx.order * (acc.denom() / ctx.denom));
    }
    throw NonTerminatingSum(std::string(what) +
                            ": no exponent-growth certificate within the term cap");
}

// Unprimed lattice sum sum_n q^{n C^{-1}(n - e_lam)} prod [m_j+n_j over n_j]
// at index L (the m-system and sigma condition both sit at L).
LaurentSeries lattice_binom_sum(const SigmaContext& sc, long L, const SeriesContext& ctx) {
    CartanData cd(sc.N);
    IntVec e_lam = sc.lambda.e_vec(sc.N);
    long grid = std::lcm(ctx.denom, 2 * sc.N);
    // finite support, exact terms: the sum is an exact Laurent polynomial
    LaurentSeries acc = LaurentSeries::zero(grid, kExactOrder);
    for (const IntVec& n : enumerate_delta_support(sc, L)) {
        MSystemResult ms = m_system(cd, L, sc.ell, sc.lambda, n);
        LaurentSeries t = LaurentSeries::monomial(1, cd.quad_form(n, e_lam).on_grid(grid), grid);
        for (long j = 0; j < cd.rank(); ++j) {
            long mj = ms.m_int[static_cast<size_t>(j)];
            long nj = n[static_cast<size_t>(j)];
            t = mul(t, gauss_binom(mj + nj, nj));
        }
        acc = add(acc, t);
    }
    return acc;
}

}  // namespace

IdentityCell::IdentityCell(long N_, long delta_, long k_, long i_, Partition lambda_, int sigma_)
    : N(N_), delta(delta_), k(k_), i(i_), lambda(std::move(lambda_)), sigma(sigma_) {
    if (N < 1) throw std::invalid_argument("IdentityCell: N >= 1");
    if (delta != 0 && delta != 1) throw std::invalid_argument("IdentityCell: delta in {0,1}");
    if (k < 2) throw std::invalid_argument("IdentityCell: k >= 2");
    if (i < 1 || i > k) throw std::invalid_argument("IdentityCell: 1 <= i <= k");
    if ((lambda.weight() + sigma * N) % 2 != 0)
        throw std::invalid_argument("IdentityCell: |lambda| + sigma N must be even");
    (void)lambda.e_vec(N);
}

std::string IdentityCell::key() const {
    std::ostringstream out;
    out << "N=" << N << ",delta=" << delta << ",k=" << k << ",i=" << i
        << ",lam=" << lambda.to_string() << ",sig=" << sigma;
    return out.str();
}

LaurentSeries sigma_eta_sum(const SigmaContext& sc, long L, const SeriesContext& ctx) {
    CartanData cd(sc.N);
    long rank = cd.rank();
    long grid = std::lcm(ctx.denom, 2 * sc.N);
    LaurentSeries acc = LaurentSeries::zero(grid, ctx.order * (grid / ctx.denom));
    if (rank == 0) {
        if (sigma_admissible(sc, L, {}))
            acc = add(acc, LaurentSeries::monomial(1, 0, 1L));
        return acc;
    }
    IntVec e_lam = sc.lambda.e_vec(sc.N);
    Rat target(ctx.order, ctx.denom);
    // per-coordinate box: the diagonal dominates once cross terms are >= 0
    long bound = 1;
    for (;;) {
        Rat worst(1L << 40);
        for (long j = 1; j <= rank; ++j) {
            Rat v = cd.inv_cartan(j, j) * Rat(bound * bound);
            Rat lam_pull(0);
            std::vector<Rat> img = cd.inv_apply(e_lam);
            lam_pull = img[static_cast<size_t>(j - 1)] * Rat(bound);
            if (v - lam_pull < worst) worst = v - lam_pull;
        }
        if (worst > target) break;
        ++bound;
        if (bound > 4096) throw NonTerminatingSum("sigma_eta_sum: box bound runaway");
    }
    IntVec eta(static_cast<size_t>(rank), 0);
    std::function<void(long)> rec = [&](long pos) {
        if (pos == rank) {
            if (!sigma_admissible(sc, L, eta)) return;
            Rat qexp = cd.quad_form(eta, e_lam);
            if (qexp > target) return;
            LaurentSeries t = LaurentSeries::monomial(1, qexp.on_grid(grid), grid);
            for (long j = 0; j < rank; ++j)
                t = mul(t, inv_poch_or_zero(1, eta[static_cast<size_t>(j)], ctx));
            acc = add(acc, t);
            return;
        }
        for (long v = 0; v <= bound; ++v) {
            eta[static_cast<size_t>(pos)] = v;
            rec(pos + 1);
        }
        eta[static_cast<size_t>(pos)] = 0;
    };
    rec(0);
    return acc;
}

LaurentSeries hl_lemma_lhs(const BaileyPair& bp, long N, const Partition& lambda, int sigma,
                           const SeriesContext& ctx) {
    SigmaContext sc(N, bp.ell, lambda, sigma);
    LaurentSeries inv_aq = poch_qn(bp.ell + 1, std::nullopt, ctx).inverted(inv_cap(ctx));
    auto term = [&](long L) {
        LaurentSeries t = mul(bp.alpha(L), sigma_eta_sum(sc, L, ctx));
        return shift_q(t, Rat(bp.ell * L + L * L, N));
    };
    LaurentSeries s = sum_terms(term, 0, bp.alpha_support, ctx, "hl_lemma_lhs");
    return mul(s, inv_aq);
}

LaurentSeries hl_lemma_rhs(const BaileyPair& bp, long N, const Partition& lambda, int sigma,
                           const SeriesContext& ctx) {
    SigmaContext sc(N, bp.ell, lambda, sigma);
    auto term = [&](long L) {
        LaurentSeries t = mul(bp.beta(L), lattice_binom_sum(sc, L, ctx));
        return shift_q(t, Rat(bp.ell * L + L * L, N));
    };
    return sum_terms(term, 0, std::nullopt, ctx, "hl_lemma_rhs");
}

LaurentSeries thm44_lhs(const IdentityCell& cell, const SeriesContext& ctx) {
    SigmaContext sc(cell.N, 0, cell.lambda, cell.sigma);
    LaurentSeries inv_q_inf = poch_qn(1, std::nullopt, ctx).inverted(inv_cap(ctx));
    auto exponent = [&](long j) {
        // ((2k + delta - 2 + 2/N) j + 2k - 2i + delta) j / 2
        return Rat((2 * cell.k + cell.delta - 2) * j * j + (2 * cell.k - 2 * cell.i + cell.delta) * j,
                   2) +
               Rat(j * j, cell.N);
    };
    auto term = [&](long j) {
        LaurentSeries t = sigma_eta_sum(sc, j, ctx);
        t = shift_q(t, exponent(j));
        return (j % 2 == 0) ? t : t.neg();
    };
    LaurentSeries plus = sum_terms([&](long j) { return term(j); }, 0, std::nullopt, ctx,
                                   "thm44_lhs j>=0");
    LaurentSeries minus = sum_terms([&](long r) { return term(-r); }, 1, std::nullopt, ctx,
                                    "thm44_lhs j<0");
    return mul(add(plus, minus), inv_q_inf);
}

LaurentSeries thm44_rhs(const IdentityCell& cell, const SeriesContext& ctx) {
    SigmaContext sc(cell.N, 0, cell.lambda, cell.sigma);
    long k = cell.k;
    Rat base(2 - cell.delta);
    Rat target(ctx.order, ctx.denom);
    LaurentSeries acc = LaurentSeries::zero(std::lcm(ctx.denom, 2 * cell.N),
                                            ctx.order * (std::lcm(ctx.denom, 2 * cell.N) / ctx.denom));
    // slack for the (bounded) negative part of the lattice-sum exponents
    long w = cell.lambda.weight();
    Rat slack(w * w + 8);
    std::vector<long> r(static_cast<size_t>(k), 0);  // r[0] = r_1, ..., r[k-2] = r_{k-1}
    std::function<void(long)> rec = [&](long t) {
        if (t == k - 1) {
            Rat expn(0);
            expn = Rat(r[0] * r[0], cell.N);
            for (long u = 2; u <= k - 1; ++u) {
                long ru = r[static_cast<size_t>(u - 1)];
                expn = expn + Rat(ru * ru);
            }
            for (long u = std::max<long>(cell.i, 2); u <= k - 1; ++u)
                expn = expn + Rat(r[static_cast<size_t>(u - 1)]);
            if (cell.i == 1) expn = expn + Rat(r[0]);
            if (expn > target + slack) return;
            LaurentSeries term = lattice_binom_sum(sc, r[0], ctx);
            term = shift_q(term, expn);
            for (long u = 1; u <= k - 2; ++u)
                term = mul(term, inv_poch_or_zero(1,
                                                  r[static_cast<size_t>(u - 1)] -
                                                      r[static_cast<size_t>(u)],
                                                  ctx));
            term = mul(term, pochhammer(PochhammerSpec::finite(base, base,
                                                               r[static_cast<size_t>(k - 2)]),
                                        ctx)
                                 .inverted(inv_cap(ctx)));
            acc = add(acc, term);
            return;
        }
        long cap = r[static_cast<size_t>(t - 1)];
        for (long v = 0; v <= cap; ++v) {
            r[static_cast<size_t>(t)] = v;
            rec(t + 1);
        }
        r[static_cast<size_t>(t)] = 0;
    };
    for (long r1 = 0;; ++r1) {
        if (Rat(r1 * r1, cell.N) > target + slack) break;
        r[0] = r1;
        rec(1);
    }
    return acc.truncated(ctx.order * (acc.denom() / ctx.denom));
}

LaurentSeries ag_bressoud_sum(long k, long i, long delta, const SeriesContext& ctx) {
    if (k < 2 || delta < 0 || delta > 1 || i < 1 || i > k + delta - 1)
        throw std::invalid_argument("ag_bressoud_sum: need k >= 2, 1 <= i <= k+delta-1");
    IdentityCell cell(1, delta, k, std::min(i, k), Partition{}, 0);
    // N = 1 collapses the lattice factor; reuse the multi-sum skeleton with
    // the exponent N_1^2 + ... and the stated i (which may reach k+delta-1).
    Rat base(2 - delta);
    Rat target(ctx.order, ctx.denom);
    LaurentSeries acc = LaurentSeries::zero(ctx.denom, ctx.order);
    std::vector<long> N(static_cast<size_t>(k - 1), 0);
    std::function<void(long)> rec = [&](long t) {
        if (t == k - 1) {
            long expn = 0;
            for (long u = 1; u <= k - 1; ++u) {
                long nu = N[static_cast<size_t>(u - 1)];
                expn += nu * nu;
                if (u >= i) expn += nu;
            }
            if (Rat(expn) > target) return;
            LaurentSeries term = LaurentSeries::monomial(1, expn, 1L);
            for (long u = 1; u <= k - 2; ++u)
                term = mul(term, inv_poch_or_zero(1,
                                                  N[static_cast<size_t>(u - 1)] -
                                                      N[static_cast<size_t>(u)],
                                                  ctx));
            term = mul(term, pochhammer(PochhammerSpec::finite(base, base,
                                                               N[static_cast<size_t>(k - 2)]),
                                        ctx)
                                 .inverted(inv_cap(ctx)));
            acc = add(acc, term);
            return;
        }
        long cap = (t == 0) ? 0 : N[static_cast<size_t>(t - 1)];
        long v0 = 0;
        (void)cap;
        long upper = (t == 0) ? (1L << 20) : N[static_cast<size_t>(t - 1)];
        for (long v = v0; v <= upper; ++v) {
            if (t == 0 && Rat(v * v) > target) break;
            N[static_cast<size_t>(t)] = v;
            rec(t + 1);
        }
        N[static_cast<size_t>(t)] = 0;
        return;
    };
    rec(0);
    (void)cell;
    return acc;
}

LaurentSeries ag_bressoud_product(long k, long i, long delta, const SeriesContext& ctx) {
    return residue_product({{2 * k + delta, {0, i, -i}}}, ctx);
}

LaurentSeries gg_sum(long k, long i, GGVariant variant, const SeriesContext& ctx) {
    if (k < 2) throw std::invalid_argument("gg_sum: k >= 2");
    if (variant == GGVariant::N2a && (i < 1 || i > k))
        throw std::invalid_argument("gg_sum N2a: 1 <= i <= k");
    if (variant == GGVariant::N2b && (i < 1 || i > k - 1))
        throw std::invalid_argument("gg_sum N2b: 1 <= i <= k-1");
    Rat target(ctx.order, ctx.denom);
    LaurentSeries acc = LaurentSeries::zero(ctx.denom, ctx.order);
    std::vector<long> N(static_cast<size_t>(k - 1), 0);
    std::function<void(long)> rec = [&](long t) {
        if (t == k - 1) {
            long expn = 0;
            for (long u = 1; u <= k - 1; ++u) {
                long nu = N[static_cast<size_t>(u - 1)];
                expn += (u == 1) ? nu * nu : 2 * nu * nu;
                if (u >= i) expn += 2 * nu;
            }
            if (Rat(expn) > target) return;
            LaurentSeries term = LaurentSeries::monomial(1, expn, 1L);
            term = mul(term, pochhammer(PochhammerSpec::finite(Rat(1), Rat(2),
                                                               N[0], true),
                                        ctx));  // (-q;q^2)_{N_1}
            for (long u = 1; u <= k - 1; ++u) {
                long nu = N[static_cast<size_t>(u - 1)] -
                          (u == k - 1 ? 0 : N[static_cast<size_t>(u)]);
                bool last = (u == k - 1);
                Rat b = (variant == GGVariant::N2b && last) ? Rat(4) : Rat(2);
                term = mul(term, pochhammer(PochhammerSpec::finite(b, b, nu), ctx)
                                     .inverted(inv_cap(ctx)));
            }
            acc = add(acc, term);
            return;
        }
        long upper = (t == 0) ? (1L << 20) : N[static_cast<size_t>(t - 1)];
        for (long v = 0; v <= upper; ++v) {
            if (t == 0 && Rat(v * v) > target) break;
            N[static_cast<size_t>(t)] = v;
            rec(t + 1);
        }
        N[static_cast<size_t>(t)] = 0;
    };
    rec(0);
    return acc;
}

LaurentSeries gg_product(long k, long i, GGVariant variant, const SeriesContext& ctx) {
    if (variant == GGVariant::N2a)
        return residue_product({{4, {2}}, {4 * k, {0, 2 * i - 1, -(2 * i - 1)}}}, ctx);
    LaurentSeries p = residue_product({{4, {2}},
                                       {8 * k - 4, {0}},
                                       {4 * k - 2, {2 * k - 1, 2 * i - 1, -(2 * i - 1)}}},
                                      ctx);
    LaurentSeries pre =
        pochhammer(PochhammerSpec::infinite(Rat(2 * k - 1), Rat(4 * k - 2), true), ctx);
    return mul(p, pre);
}

VerificationReport corollary_proof_sum_checks(long lambda_weight, long r1,
                                              const SeriesContext& ctx) {
    std::ostringstream cell;
    cell << "corollary-proof-sums,w=" << lambda_weight << ",r1=" << r1;
    if (lambda_weight < 0 || lambda_weight % 2 != 0) {
        VerificationReport r;
        r.cell = cell.str();
        r.status = "skipped";
        r.detail = "lambda weight must be even";
        return r;
    }
    long w = lambda_weight;
    // the (-q^{(1-w)/2})_{w/2} factor dips below q^0; pad the working order
    SeriesContext wide{ctx.denom, ctx.order + (w + 2) * ctx.denom};
    // finite q-binomial expansion
    LaurentSeries lhs_a = LaurentSeries::zero(2, kExactOrder);
    for (long n = 0; n <= r1 + w / 2; ++n) {
        LaurentSeries t = shift_q(gauss_binom(r1 + w / 2, n), Rat(n * (n - w), 2));
        lhs_a = add(lhs_a, t);
    }
    LaurentSeries rhs_a = mul(
        pochhammer(PochhammerSpec::finite(Rat(1 - w, 2), Rat(1), w / 2, true), wide),
        pochhammer(PochhammerSpec::finite(Rat(1, 2), Rat(1), r1, true), wide));
    CompareResult cmp_a = LaurentSeries::eq_up_to(lhs_a, rhs_a, kExactOrder, 1);
    if (!cmp_a.equal) {
        VerificationReport r = report_from_compare(cell.str(), cmp_a);
        r.detail += " (binomial expansion)";
        return r;
    }
    // infinite eta-analogue, truncated
    auto term = [&](long eta) {
        return shift_q(inv_poch_or_zero(1, eta, wide), Rat(eta * (eta - w), 2));
    };
    LaurentSeries lhs_b = sum_terms(term, 0, std::nullopt, wide, "corollary proof eta-sum");
    LaurentSeries rhs_b = mul(
        pochhammer(PochhammerSpec::finite(Rat(1 - w, 2), Rat(1), w / 2, true), wide),
        pochhammer(PochhammerSpec::infinite(Rat(1, 2), Rat(1), true), wide));
    CompareResult cmp_b = LaurentSeries::eq_up_to(lhs_b, rhs_b, ctx.order, ctx.denom);
    VerificationReport r = report_from_compare(cell.str(), cmp_b);
    if (!cmp_b.equal) r.detail += " (eta sum)";
    return r;
}

Rat string_function_h(const StringFunctionIndex& idx) {
    return Rat(idx.ell * (idx.ell + 2), 4 * (idx.N + 2)) - Rat(idx.m * idx.m, 4 * idx.N);
}

namespace {

StringFunctionIndex normalize_string_index(StringFunctionIndex idx) {
    long N = idx.N;
    if (N < 1) throw std::invalid_argument("string_function: N >= 1");
    if ((idx.ell - idx.m) % 2 != 0)
        throw std::invalid_argument("string_function: ell - m must be even");
    for (int step = 0; step < 4; ++step) {
        long m = idx.m % (2 * N);
        if (m < 0) m += 2 * N;
        if (m > N) m -= 2 * N;  // now in (-N, N]
        m = std::abs(m);
        idx.m = m;
        if (m <= idx.ell && idx.ell <= N - 1) return idx;
        idx = {N, N - idx.ell, N - m};
    }
    throw std::invalid_argument(
        "string_function: index does not normalize into |m| <= ell <= N-1");
}

}  // namespace

LaurentSeries string_function(const StringFunctionIndex& raw, const SeriesContext& ctx) {
    StringFunctionIndex idx = normalize_string_index(raw);
    long N = idx.N, ell = idx.ell, m = idx.m;
    long grid = std::lcm(ctx.denom, 4 * N * (N + 2));
    long order = ctx.order * (grid / ctx.denom);
    Rat target(ctx.order, ctx.denom);
    LaurentSeries bracket = LaurentSeries::zero(grid, order);

    // f(j, k) = j(j + ell +- m + 1)/2 + k((j+k)(N+2) + ell + 1)
    auto f = [&](long j, long k, long mm) {
        return Rat(j * (j + ell + mm + 1), 2) + Rat(k * ((j + k) * (N + 2) + ell + 1));
    };
    auto addterm = [&](long j, long k, long mm, int sign) {
        Rat e = f(j, k, mm);
        if (e > target) return false;
        int s = ((j % 2 == 0) ? 1 : -1) * sign;
        bracket = add(bracket, LaurentSeries::monomial(s, e.on_grid(grid), grid));
        return true;
    };
    // each region is scanned row by row; within a row the exponent is
    // strictly increasing in the k-direction, and row minima eventually
    // increase, so two exhausted rows in a row end the region
    auto scan_region = [&](long mm, int sign, bool jneg, bool kneg) {
        long empty_rows = 0;
        for (long uj = 0; empty_rows < 2; ++uj) {
            long j = jneg ? -uj - 1 : (kneg ? -uj : uj);        // j<0 / j<=0 / j>=0
            if (!jneg && !kneg && sign > 0 && mm < 0 && uj == 0)  // region j>0: skip j=0
                j = uj + 1;
            bool any = false;
            for (long uk = 0;; ++uk) {
                long k = kneg ? -uk - 1 : uk;
                if (!addterm(j, k, mm, sign)) {
                    if (uk == 0) break;
                    break;
                }
                any = true;
            }
            if (any)
                empty_rows = 0;
            else
                ++empty_rows;
        }
    };
    (void)scan_region;

    // first bracket: (sum_{j>=0,k>=0} - sum_{j<0,k<0}) with +m
    // second bracket: (sum_{j>0,k>=0} - sum_{j<=0,k<0}) with -m
    struct Region {
        long jstart;
        bool jneg;  // j runs jstart, jstart-1, ... when true
        bool kneg;
        long mm;
        int sign;
    };
    std::vector<Region> regions = {
        {0, false, false, m, +1},   // j >= 0, k >= 0
        {-1, true, true, m, -1},    // j < 0, k < 0
        {1, false, false, -m, +1},  // j > 0, k >= 0
        {0, true, true, -m, -1},    // j <= 0, k < 0
    };
    for (const Region& reg : regions) {
        long empty_rows = 0;
        for (long step = 0; empty_rows < 2; ++step) {
            long j = reg.jneg ? reg.jstart - step : reg.jstart + step;
            bool any = false;
            for (long uk = 0;; ++uk) {
                long k = reg.kneg ? -uk - 1 : uk;
                Rat e = f(j, k, reg.mm);
                if (e > target) break;
                int s = ((((j % 2) + 2) % 2) == 0 ? 1 : -1) * reg.sign;
                bracket = add(bracket, LaurentSeries::monomial(s, e.on_grid(grid), grid));
                any = true;
            }
            if (any)
                empty_rows = 0;
            else
                ++empty_rows;
            if (step > 4096) throw NonTerminatingSum("string_function: region scan runaway");
        }
    }
    LaurentSeries inv3 = poch_qn(1, std::nullopt, ctx).inverted(inv_cap(ctx)).pow(3);
    return shift_q(mul(bracket, inv3), string_function_h(idx)).truncated(order);
}

namespace {

// L-classes L + ell/2 == +-p (mod N), p running over the distinct classes
// p_ell, p_ell + 1, ..., <= N/2 with p_ell in {0, 1/2} by the parity of ell.
std::vector<Rat> e55_class_reps(long N, long ell) {
    std::vector<Rat> ps;
    Rat p = (ell % 2 == 0) ? Rat(0) : Rat(1, 2);
    while (p <= Rat(N, 2)) {
        ps.push_back(p);
        p = p + Rat(1);
    }
    return ps;
}

bool in_class(long L, long ell, const Rat& p, long N) {
    // (L + ell/2 -+ p)/N integral for either sign
    Rat base = Rat(L) + Rat(ell, 2);
    Rat t1 = (base - p) / Rat(N);
    Rat t2 = (base + p) / Rat(N);
    return t1.is_integer() || t2.is_integer();
}

// eta-sum of the regrouped form: eta >= 0 with
// (2p - |lam| + sigma N)/(2N) - (C^{-1} eta)_1 integral.
LaurentSeries e55_eta_sum(long N, const Partition& lam, int sigma, const Rat& p,
                          const SeriesContext& ctx) {
    CartanData cd(N);
    long rank = cd.rank();
    long grid = std::lcm(ctx.denom, 2 * N);
    LaurentSeries acc = LaurentSeries::zero(grid, ctx.order * (grid / ctx.denom));
    Rat target(ctx.order, ctx.denom);
    Rat cond_base = (Rat(2) * p - Rat(lam.weight()) + Rat(sigma * N)) / Rat(2 * N);
    if (rank == 0) {
        if (cond_base.is_integer()) acc = add(acc, LaurentSeries::monomial(1, 0, 1L));
        return acc;
    }
    IntVec e_lam = lam.e_vec(N);
    long bound = 1;
    std::vector<Rat> img = cd.inv_apply(e_lam);
    for (;;) {
        Rat worst(1L << 40);
        for (long j = 1; j <= rank; ++j) {
            Rat v = cd.inv_cartan(j, j) * Rat(bound * bound) -
                    img[static_cast<size_t>(j - 1)] * Rat(bound);
            if (v < worst) worst = v;
        }
        if (worst > target) break;
        ++bound;
        if (bound > 4096) throw NonTerminatingSum("e55_eta_sum: box bound runaway");
    }
    IntVec eta(static_cast<size_t>(rank), 0);
    std::function<void(long)> rec = [&](long pos) {
        if (pos == rank) {
            Rat c1 = cond_base - cd.inv_apply(eta)[0];
            if (!c1.is_integer()) return;
            Rat qexp = cd.quad_form(eta, e_lam);
            if (qexp > target) return;
            LaurentSeries t = LaurentSeries::monomial(1, qexp.on_grid(grid), grid);
            for (long j = 0; j < rank; ++j)
                t = mul(t, inv_poch_or_zero(1, eta[static_cast<size_t>(j)], ctx));
            acc = add(acc, t);
            return;
        }
        for (long v = 0; v <= bound; ++v) {
            eta[static_cast<size_t>(pos)] = v;
            rec(pos + 1);
        }
        eta[static_cast<size_t>(pos)] = 0;
    };
    rec(0);
    return acc;
}

LaurentSeries e55_alpha_class_sum(const BaileyPair& bp, long N, const Rat& p,
                                  const SeriesContext& ctx) {
    auto term = [&](long L) {
        if (!in_class(L, bp.ell, p, N)) return LaurentSeries();
        return shift_q(bp.alpha(L), Rat(bp.ell * L + L * L, N));
    };
    return sum_terms(term, 0, bp.alpha_support, ctx, "e55 class alpha sum");
}

Partition single_part(long ell_prime) {
    if (ell_prime == 0) return Partition{};
    return Partition{{ell_prime}};
}

}  // namespace

LaurentSeries e55_lhs(const BaileyPair& bp, long N, long ell_prime, int sigma,
                      const SeriesContext& ctx) {
    Partition lam = single_part(ell_prime);
    if ((bp.ell + ell_prime + sigma * N) % 2 != 0)
        throw std::invalid_argument("e55_lhs: ell + ell' + sigma N must be even");
    LaurentSeries inv_aq = poch_qn(bp.ell + 1, std::nullopt, ctx).inverted(inv_cap(ctx));
    LaurentSeries acc = LaurentSeries::zero(ctx.denom, ctx.order);
    for (const Rat& p : e55_class_reps(N, bp.ell)) {
        LaurentSeries cls = mul(e55_eta_sum(N, lam, sigma, p, ctx),
                                e55_alpha_class_sum(bp, N, p, ctx));
        acc = add(acc, cls);
    }
    return mul(acc, inv_aq);
}

LaurentSeries e55_string_assembly(const BaileyPair& bp, long N, long ell_prime, int sigma,
                                  const SeriesContext& ctx) {
    if ((bp.ell + ell_prime + sigma * N) % 2 != 0)
        throw std::invalid_argument("e55_string_assembly: ell + ell' + sigma N must be even");
    LaurentSeries acc = LaurentSeries::zero(ctx.denom, ctx.order);
    for (const Rat& p : e55_class_reps(N, bp.ell)) {
        Rat m2 = Rat(2) * p + Rat(sigma * N);
        StringFunctionIndex idx{N, ell_prime, m2.on_grid(1)};
        LaurentSeries cls = mul(string_function(idx, ctx),
                                e55_alpha_class_sum(bp, N, p, ctx));
        acc = add(acc, cls);
    }
    LaurentSeries pre = poch_qn(1, bp.ell, ctx);
    acc = mul(acc, pre);
    LaurentSeries out = shift_q(acc, -Rat(ell_prime * (N - ell_prime), 2 * N * (N + 2)));
    return out.truncated(ctx.order * (out.denom() / ctx.denom));
}

VerificationReport jacobi_triple_product_check(const Rat& c, const SeriesContext& ctx) {
    std::ostringstream cell;
    cell << "jacobi-triple-product,z=q^" << c.to_string();
    if (!(Rat(0) < c && c < Rat(1))) {
        VerificationReport r;
        r.cell = cell.str();
        r.status = "skipped";
        r.detail = "needs 0 < c < 1";
        return r;
    }
    auto term = [&](long j) {
        Rat e = c * Rat(j) + Rat(j * (j - 1), 2);
        long grid = std::lcm(ctx.denom, e.den);
        return LaurentSeries::monomial((((j % 2) + 2) % 2) == 0 ? 1 : -1, e.on_grid(grid), grid);
    };
    LaurentSeries lhs = add(
        sum_terms(term, 0, std::nullopt, ctx, "jtp j>=0"),
        sum_terms([&](long r) { return term(-r); }, 1, std::nullopt, ctx, "jtp j<0"));
    LaurentSeries rhs = poch_qn(1, std::nullopt, ctx);
    rhs = mul(rhs, pochhammer(PochhammerSpec::infinite(c, Rat(1)), ctx));
    rhs = mul(rhs, pochhammer(PochhammerSpec::infinite(Rat(1) - c, Rat(1)), ctx));
    return report_from_compare(cell.str(),
                               LaurentSeries::eq_up_to(lhs, rhs, ctx.order, ctx.denom));
}

}  // namespace qbailey
