#include "qbailey/lattice.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "qbailey/qtools.hpp"

namespace qbailey {

CartanData::CartanData(long N) : n_(N) {
    if (N < 1) throw std::invalid_argument("CartanData: N must be >= 1");
}

long CartanData::cartan(long j, long k) const {
    if (j < 1 || j > rank() || k < 1 || k > rank())
        throw std::out_of_range("CartanData::cartan: index");
    if (j == k) return 2;
    if (j == k - 1 || j == k + 1) return -1;
    return 0;
}

Rat CartanData::inv_cartan(long j, long k) const {
    if (j < 1 || j > rank() || k < 1 || k > rank())
        throw std::out_of_range("CartanData::inv_cartan: index");
    if (j > k) std::swap(j, k);
    return Rat(j * (n_ - k), n_);
}

std::vector<Rat> CartanData::inv_apply(const IntVec& x) const {
    if (static_cast<long>(x.size()) != rank())
        throw std::invalid_argument("CartanData::inv_apply: length mismatch");
    std::vector<Rat> r(x.size(), Rat(0));
    for (long j = 1; j <= rank(); ++j) {
        Rat acc(0);
        for (long k = 1; k <= rank(); ++k)
            acc = acc + inv_cartan(j, k) * Rat(x[static_cast<size_t>(k - 1)]);
        r[static_cast<size_t>(j - 1)] = acc;
    }
    return r;
}

Rat CartanData::quad_form(const IntVec& x, const IntVec& w) const {
    if (static_cast<long>(x.size()) != rank() || static_cast<long>(w.size()) != rank())
        throw std::invalid_argument("CartanData::quad_form: length mismatch");
    Rat acc(0);
    for (long j = 1; j <= rank(); ++j)
        for (long k = 1; k <= rank(); ++k)
            acc = acc + Rat(x[static_cast<size_t>(j - 1)]) * inv_cartan(j, k) *
                            Rat(x[static_cast<size_t>(k - 1)] - w[static_cast<size_t>(k - 1)]);
    return acc;
}

IntVec CartanData::cartan_apply(const IntVec& x) const {
    if (static_cast<long>(x.size()) != rank())
        throw std::invalid_argument("CartanData::cartan_apply: length mismatch");
    IntVec r(x.size(), 0);
    for (long j = 0; j < rank(); ++j) {
        long acc = 2 * x[static_cast<size_t>(j)];
        if (j > 0) acc -= x[static_cast<size_t>(j - 1)];
        if (j + 1 < rank()) acc -= x[static_cast<size_t>(j + 1)];
        r[static_cast<size_t>(j)] = acc;
    }
    return r;
}

Partition::Partition(std::vector<long> p) : parts(std::move(p)) {
    for (size_t i = 0; i < parts.size(); ++i) {
        if (parts[i] <= 0) throw std::invalid_argument("Partition: parts must be positive");
        if (i > 0 && parts[i] > parts[i - 1])
            throw std::invalid_argument("Partition: parts must be weakly decreasing");
    }
}

long Partition::weight() const {
    long w = 0;
    for (long p : parts) w += p;
    return w;
}

IntVec Partition::e_vec(long N) const {
    IntVec e(static_cast<size_t>(N - 1), 0);
    for (long p : parts) {
        if (p > N - 1)
            throw std::invalid_argument("Partition: part " + std::to_string(p) +
                                        " exceeds N-1 = " + std::to_string(N - 1));
        e[static_cast<size_t>(p - 1)] += 1;
    }
    return e;
}

std::string Partition::to_string() const {
    std::ostringstream out;
    out << "(";
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out << ",";
        out << parts[i];
    }
    out << ")";
    return out.str();
}

std::vector<Partition> Partition::all_with(long max_part, long max_weight) {
    std::vector<Partition> out;
    std::vector<long> cur;
    std::function<void(long, long)> rec = [&](long largest, long budget) {
        out.push_back(Partition(cur));
        for (long p = std::min(largest, budget); p >= 1; --p) {
            cur.push_back(p);
            rec(p, budget - p);
            cur.pop_back();
        }
    };
    if (max_part >= 1) {
        rec(max_part, max_weight);
    } else {
        out.push_back(Partition{});
    }
    std::sort(out.begin(), out.end(), [](const Partition& a, const Partition& b) {
        if (a.weight() != b.weight()) return a.weight() < b.weight();
        return a.parts < b.parts;
    });
    return out;
}

SigmaContext::SigmaContext(long N_, long ell_, Partition lambda_, int sigma_)
    : N(N_), ell(ell_), lambda(std::move(lambda_)), sigma(sigma_) {
    if (N < 1) throw std::invalid_argument("SigmaContext: N must be >= 1");
    if (sigma != 0 && sigma != 1) throw std::invalid_argument("SigmaContext: sigma in {0,1}");
    if ((ell + lambda.weight() + sigma * N) % 2 != 0)
        throw std::invalid_argument("SigmaContext: ell + |lambda| + sigma N must be even");
    (void)lambda.e_vec(N);  // validates part bound
}

std::string SigmaContext::key() const {
    std::ostringstream out;
    out << "N=" << N << ",l=" << ell << ",lam=" << lambda.to_string() << ",sig=" << sigma;
    return out.str();
}

MSystemResult m_system(const CartanData& cd, long L, long ell, const Partition& lambda,
                       const IntVec& n) {
    IntVec b = lambda.e_vec(cd.N());
    if (cd.rank() > 0) b[static_cast<size_t>(cd.rank() - 1)] += 2 * L + ell;
    for (long j = 0; j < cd.rank(); ++j) b[static_cast<size_t>(j)] -= 2 * n[static_cast<size_t>(j)];
    MSystemResult res;
    res.m = cd.inv_apply(b);
    res.integral = true;
    for (const Rat& x : res.m) {
        if (!x.is_integer()) {
            res.integral = false;
            break;
        }
    }
    if (res.integral)
        for (const Rat& x : res.m) res.m_int.push_back(x.num);
    return res;
}

std::vector<Rat> mu_system(const CartanData& cd, long M, long L, long k, long ell,
                           const Partition& lambda, const IntVec& i, const IntVec& eta) {
    long rank = cd.rank();
    IntVec b = lambda.e_vec(cd.N());
    if (rank > 0) {
        b[0] += M - L - k;
        b[static_cast<size_t>(rank - 1)] += M + L + ell;
        long isum = 0;
        for (long x : i) isum += x;
        long iN = k - isum;
        for (long j = 0; j < rank; ++j) {
            long ij = i[static_cast<size_t>(j)];
            long ij1 = (j + 1 < rank) ? i[static_cast<size_t>(j + 1)] : iN;
            b[static_cast<size_t>(j)] -= ij + ij1;
            b[static_cast<size_t>(j)] -= 2 * eta[static_cast<size_t>(j)];
        }
    }
    return cd.inv_apply(b);
}

bool sigma_admissible(const SigmaContext& ctx, long L, const IntVec& total) {
    CartanData cd(ctx.N);
    Rat value = Rat(2 * L + ctx.ell - ctx.lambda.weight(), 2 * ctx.N);
    if (ctx.N > 1) {
        std::vector<Rat> img = cd.inv_apply(total);
        value = value - img[0];
    }
    Rat rem = value - Rat(ctx.sigma, 2);
    return rem.is_integer();
}

std::vector<IntVec> enumerate_delta_support(const SigmaContext& ctx, long L) {
    CartanData cd(ctx.N);
    long rank = cd.rank();
    std::vector<IntVec> out;
    if (rank == 0) {
        if (sigma_admissible(ctx, L, {})) out.push_back({});
        return out;
    }
    // m >= 0 needs (C^{-1} b)_j >= 2 (C^{-1} n)_j >= 2 C^{-1}_{jj} n_j, so the
    // box bound below is exhaustive for n >= 0.
    IntVec b = ctx.lambda.e_vec(ctx.N);
    b[static_cast<size_t>(rank - 1)] += 2 * L + ctx.ell;
    std::vector<Rat> cb = cd.inv_apply(b);
    long bound = 0;
    for (long j = 1; j <= rank; ++j) {
        Rat lim = cb[static_cast<size_t>(j - 1)] / (Rat(2) * cd.inv_cartan(j, j));
        long ceil = lim.num >= 0 ? (lim.num + lim.den - 1) / lim.den : 0;
        bound = std::max(bound, ceil);
    }
    IntVec n(static_cast<size_t>(rank), 0);
    std::function<void(long)> rec = [&](long pos) {
        if (pos == rank) {
            MSystemResult ms = m_system(cd, L, ctx.ell, ctx.lambda, n);
            if (!ms.integral) return;
            for (long v : ms.m_int)
                if (v < 0) return;
            if (!sigma_admissible(ctx, L, n)) return;
            out.push_back(n);
            return;
        }
        for (long v = 0; v <= bound; ++v) {
            n[static_cast<size_t>(pos)] = v;
            rec(pos + 1);
        }
        n[static_cast<size_t>(pos)] = 0;
    };
    rec(0);
    return out;
}

namespace {

// Full-ramp minorant of the negative-exponent mass: for eta < 0 the partial
// sums sum_{s=1..mu, eta+s<0}(eta+s) are bounded below by -eta(eta+1)/2.
long ramp_minorant(long eta) { return eta < 0 ? (-eta * (eta + 1)) / 2 : 0; }

void for_each_simplex(long rank, long k, const std::function<void(const IntVec&)>& fn) {
    IntVec i(static_cast<size_t>(rank), 0);
    std::function<void(long, long)> rec = [&](long pos, long left) {
        if (pos == rank) {
            fn(i);
            return;
        }
        for (long v = 0; v <= left; ++v) {
            i[static_cast<size_t>(pos)] = v;
            rec(pos + 1, left - v);
        }
        i[static_cast<size_t>(pos)] = 0;
    };
    rec(0, k);
}

}  // namespace

std::vector<GammaPoint> enumerate_gamma_support(const SigmaContext& ctx, long M, long L, long k,
                                                const Rat& order_q) {
    CartanData cd(ctx.N);
    long rank = cd.rank();
    std::vector<GammaPoint> out;
    IntVec e_lam = ctx.lambda.e_vec(ctx.N);

    for_each_simplex(rank, k, [&](const IntVec& ivec) {
        long isum = 0;
        for (long x : ivec) isum += x;
        long iN = k - isum;

        // -i C^{-1}(i + (2L+ell) e_1) plus the lowest exponent of the
        // 1/q multinomial; both fixed for this i.
        Rat qi(0);
        if (rank > 0) {
            IntVec w(static_cast<size_t>(rank), 0);
            w[0] = -(2 * L + ctx.ell);
            qi = -cd.quad_form(ivec, w);
        }
        std::vector<long> iv(ivec.begin(), ivec.end());
        Rat i_base = qi + Rat(multinomial_inv_lowexp(k, iv));

        if (rank == 0) {
            if (sigma_admissible(ctx, L, {}) && i_base <= order_q && iN >= 0)
                out.push_back({{}, ivec, {}, i_base});
            return;
        }

        IntVec c(e_lam);
        c[0] += M - L - k;
        c[static_cast<size_t>(rank - 1)] += M + L + ctx.ell;
        for (long j = 0; j < rank; ++j) {
            long ij = ivec[static_cast<size_t>(j)];
            long ij1 = (j + 1 < rank) ? ivec[static_cast<size_t>(j + 1)] : iN;
            c[static_cast<size_t>(j)] -= ij + ij1;
        }

        /* Scan mu >= 0 over expanding L1 shells; eta = (c - C mu)/2. Any
         * nonzero term has integral mu >= 0, so this covers the support.
         * Clean shells are judged with the full-ramp minorant, which lower
         * bounds the true minimal exponent of every (would-be) term on the
         * shell. The stop needs three consecutive clean shells with a
         * non-decreasing shell minimum; hitting the hard cap without that
         * certificate raises EnumerationBoundUnverified. */
        long clean_run = 0;
        std::optional<Rat> prev_min;
        long c_norm = 0;
        for (long x : c) c_norm += (x < 0 ? -x : x);
        long order_ceil = order_q.num >= 0 ? (order_q.num + order_q.den - 1) / order_q.den : 0;
        long cap = 64 + 8 * (order_ceil + c_norm + k * k + ctx.N);

        for (long R = 0;; ++R) {
            if (R > cap)
                throw EnumerationBoundUnverified(
                    "enumerate_gamma_support: no termination certificate within shell cap " +
                    std::to_string(cap) + " at " + ctx.key() + ",M=" + std::to_string(M) +
                    ",L=" + std::to_string(L) + ",k=" + std::to_string(k));
            std::optional<Rat> shell_min;
            IntVec mu(static_cast<size_t>(rank), 0);
            std::function<void(long, long)> scan = [&](long pos, long left) {
                if (pos == rank - 1) {
                    mu[static_cast<size_t>(pos)] = left;
                } else if (pos < rank) {
                    for (long v = 0; v <= left; ++v) {
                        mu[static_cast<size_t>(pos)] = v;
                        scan(pos + 1, left - v);
                    }
                    mu[static_cast<size_t>(pos)] = 0;
                    return;
                }
                // leaf: mu fixed with |mu|_1 == R
                IntVec cmu = cd.cartan_apply(mu);
                IntVec eta(static_cast<size_t>(rank), 0);
                for (long j = 0; j < rank; ++j) {
                    long t = c[static_cast<size_t>(j)] - cmu[static_cast<size_t>(j)];
                    if (t % 2 != 0) return;  // eta off-lattice
                    eta[static_cast<size_t>(j)] = t / 2;
                }
                Rat q_eta = cd.quad_form(eta, e_lam);
                long ramp = 0;
                for (long j = 0; j < rank; ++j) ramp += ramp_minorant(eta[static_cast<size_t>(j)]);
                Rat lb = i_base + q_eta + Rat(ramp);
                if (!shell_min || lb < *shell_min) shell_min = lb;

                bool zero = false;
                long true_negexp = 0;
                for (long j = 0; j < rank; ++j) {
                    long e = eta[static_cast<size_t>(j)];
                    long m = mu[static_cast<size_t>(j)];
                    if (e < 0 && m + e >= 0) {
                        zero = true;
                        break;
                    }
                    true_negexp += negexp(e, m);
                }
                if (zero) return;
                /* Integral mu splits across the two sigma classes when N is
                 * even; only points in the requested class belong to the sum. */
                IntVec total(eta);
                for (long j = 0; j < rank; ++j)
                    total[static_cast<size_t>(j)] += ivec[static_cast<size_t>(j)];
                if (!sigma_admissible(ctx, L, total)) return;
                Rat min_exp = i_base + q_eta + Rat(true_negexp);
                if (min_exp <= order_q) out.push_back({eta, ivec, mu, min_exp});
            };
            if (rank == 1) {
                mu[0] = R;
                scan(1, 0);
            } else {
                scan(0, R);
            }

            bool clean = !shell_min || *shell_min > order_q;
            bool monotone = !shell_min || !prev_min || *shell_min >= *prev_min;
            if (clean && monotone)
                ++clean_run;
            else
                clean_run = 0;
            if (shell_min) prev_min = shell_min;
            if (clean_run >= 3) break;
        }
    });
    return out;
}

}  // namespace qbailey
