#pragma once

// Executable appendix: Gauss norms at radius r, the psi_plus-pulled-back
// norm, the radius-of-convergence lower bound, and finite-truncation checks
// of the perturbation inequality. Everything here runs in exact rational
// arithmetic (GMP mpq) — the inequalities are statements about exact
// objects and fixed-point rounding would contaminate them. Radii are powers
// of two (log2 r is an exact rational), so norm comparisons are exact.

#include <optional>
#include <vector>

#include <gmpxx.h>

#include "twoadic/errors.hpp"
#include "twoadic/ode.hpp"

namespace twoadic {

using QSeries = std::vector<mpq_class>; // exact coefficients, index = t-power

// log2 |x| = -val2(x) as an exact rational (numerator/denominator 2-valuations)
inline long val2_q(const mpq_class& x) {
    if (x == 0) throw DegenerateInstance("val2 of zero");
    long vn = long(mpz_scan1(x.get_num().get_mpz_t(), 0));
    long vd = long(mpz_scan1(x.get_den().get_mpz_t(), 0));
    return vn - vd;
}

// value in log2 scale, exact; -infinity for the zero function
struct LogNorm {
    bool neg_inf = true;
    mpq_class v = 0;

    static LogNorm ninf() { return LogNorm{}; }
    static LogNorm of(const mpq_class& x) { return LogNorm{false, x}; }

    friend bool operator<(const LogNorm& a, const LogNorm& b) {
        if (a.neg_inf) return !b.neg_inf;
        if (b.neg_inf) return false;
        return a.v < b.v;
    }
    friend bool operator<=(const LogNorm& a, const LogNorm& b) { return !(b < a); }
    friend bool operator==(const LogNorm& a, const LogNorm& b) {
        return a.neg_inf == b.neg_inf && (a.neg_inf || a.v == b.v);
    }
    LogNorm operator+(const LogNorm& o) const {
        if (neg_inf || o.neg_inf) return ninf();
        return of(v + o.v);
    }
};

// ||f||_r = sup |a_i| r^i in log2 scale: max over i of (-val2(a_i) + i log2r)
inline LogNorm gauss_log_norm(const QSeries& f, const mpq_class& log2_r) {
    LogNorm best = LogNorm::ninf();
    for (size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0) continue;
        mpq_class term = mpq_class(-val2_q(f[i])) + mpq_class(long(i)) * log2_r;
        if (best.neg_inf || term > best.v) best = LogNorm::of(term);
    }
    return best;
}

// ---------------------------------------------------------------------------
// exact psi_plus / psi_minus (same recurrences as the fixed-point solver)

inline QSeries psi_plus_exact(const mpq_class& a, const QSeries& f, int n) {
    QSeries y(size_t(n), 0);
    mpq_class two_a = 2 * a;
    y[0] = -(f.empty() ? mpq_class(0) : f[0]) / two_a;
    for (int i = 1; i < n; ++i) {
        mpq_class fi = size_t(i) < f.size() ? f[size_t(i)] : mpq_class(0);
        y[size_t(i)] = (mpq_class(i) * y[size_t(i) - 1] - fi) / (two_a * (2 * i + 1));
    }
    return y;
}

// ||f||_{r,+} = ||psi_plus(f)||_r on the n-truncation
inline LogNorm psi_plus_log_norm(const QSeries& f, const mpq_class& a, const mpq_class& log2_r,
                                 int n) {
    return gauss_log_norm(psi_plus_exact(a, f, n), log2_r);
}

// ---------------------------------------------------------------------------
// RoC lower bound: log2 min( r s^2 |U'(0)|^2 / (||U||_r ||V||_s),
//                            r^2 |U'(0)| / ||U||_r ).
inline LogNorm roc_lower_bound(const QSeries& U, const QSeries& V, const mpq_class& log2_r,
                               const mpq_class& log2_s) {
    if (U.size() < 2 || U[1] == 0) throw DegenerateInstance("U'(0) = 0");
    mpq_class logu1 = -val2_q(U[1]);
    LogNorm nu = gauss_log_norm(U, log2_r);
    LogNorm nv = gauss_log_norm(V, log2_s);
    if (nu.neg_inf || nv.neg_inf) throw DegenerateInstance("zero U or V");
    mpq_class first = log2_r + 2 * log2_s + 2 * logu1 - nu.v - nv.v;
    mpq_class second = 2 * log2_r + logu1 - nu.v;
    return LogNorm::of(first < second ? first : second);
}

// ---------------------------------------------------------------------------
// Perturbation inequality on truncations: for the instance
// t(t-4a) z'^2 = g^2 h(z) (h polynomial of valuation 1), and perturbations
// gamma1, gamma2 with ||gamma_i||_{r,+} < min(||z'_g||_r, ||g||_r^2/(4 ||z'_g||_r)),
// checks || (z_{g+gamma1} - z_{g+gamma2}) / (t(t-4a)) ||_r <= ||gamma1 - gamma2||_{r,+}.
// Preconditions are verified; HypothesisViolated reports a failure of the
// hypotheses, not of the inequality.

inline QSeries q_add(const QSeries& a, const QSeries& b) {
    QSeries r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        if (i < a.size()) r[i] += a[i];
        if (i < b.size()) r[i] += b[i];
    }
    return r;
}

inline QSeries q_sub(const QSeries& a, const QSeries& b) {
    QSeries r(std::max(a.size(), b.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) {
        if (i < a.size()) r[i] += a[i];
        if (i < b.size()) r[i] -= b[i];
    }
    return r;
}

inline QSeries q_mul(const QSeries& a, const QSeries& b, int nout) {
    QSeries r(size_t(nout), 0);
    for (size_t i = 0; i < a.size() && int(i) < nout; ++i) {
        if (a[i] == 0) continue;
        for (size_t j = 0; j < b.size() && i + j < size_t(nout); ++j)
            r[i + j] += a[i] * b[j];
    }
    return r;
}

inline QSeries q_invert(const QSeries& f, int nout) {
    if (f.empty() || f[0] == 0) throw NotInvertible("exact series inverse needs f(0) != 0");
    QSeries r(size_t(nout), 0);
    r[0] = 1 / f[0];
    for (int k = 1; k < nout; ++k) {
        mpq_class acc = 0;
        for (int j = 1; j <= k; ++j)
            if (size_t(j) < f.size()) acc += f[size_t(j)] * r[size_t(k - j)];
        r[size_t(k)] = -acc / f[0];
    }
    return r;
}

inline QSeries q_derivative(const QSeries& f) {
    if (f.empty()) return {};
    QSeries r(f.size() - 1);
    for (size_t i = 0; i + 1 < f.size(); ++i) r[i] = mpq_class(long(i + 1)) * f[i + 1];
    return r;
}

struct PerturbInstance {
    mpq_class a;  // unit
    QSeries h;    // polynomial, valuation 1 (the V-side shape)
};

// z_g: solve t(t-4a) z'^2 = g^2 h(z) exactly, i.e. U z'^2 = h(z) with
// U = t(t-4a) / g^2, truncated to n.
inline QSeries solve_perturbed(const PerturbInstance& inst, const QSeries& g, int n) {
    QSeries t_t4a(3, 0);
    t_t4a[1] = -4 * inst.a;
    t_t4a[2] = 1;
    QSeries U = q_mul(t_t4a, q_invert(q_mul(g, g, n), n), n);
    return naive_solve_exact(U, inst.h, n);
}

// log2 of the admissible perturbation size min(||z'_g||_r, ||g||_r^2/(4 ||z'_g||_r))
inline mpq_class perturb_bound(const PerturbInstance& inst, const QSeries& g,
                               const mpq_class& log2_r, int n) {
    QSeries zg = solve_perturbed(inst, g, n);
    LogNorm zpn = gauss_log_norm(q_derivative(zg), log2_r);
    LogNorm gn = gauss_log_norm(g, log2_r);
    if (zpn.neg_inf || gn.neg_inf) throw HypothesisViolated("degenerate instance");
    mpq_class b1 = zpn.v;
    mpq_class b2 = 2 * gn.v - 2 - zpn.v;
    return b1 < b2 ? b1 : b2;
}

inline bool perturb_check(const PerturbInstance& inst, const QSeries& g, const QSeries& gamma1,
                          const QSeries& gamma2, const mpq_class& log2_r, int n) {
    if (g.empty() || g[0] == 0) throw HypothesisViolated("g(0) = 0");
    // Weierstrass criterion: the max of g on the disc is attained at 0
    LogNorm gn = gauss_log_norm(g, log2_r);
    if (!(gn == LogNorm::of(mpq_class(-val2_q(g[0])))))
        throw HypothesisViolated("||g||_r > |g(0)|: g vanishes inside the disc");
    QSeries zg = solve_perturbed(inst, g, n);
    LogNorm zpn = gauss_log_norm(q_derivative(zg), log2_r);
    if (zpn.neg_inf) throw HypothesisViolated("z'_g vanishes identically");
    // bound = min(||z'_g||_r, ||g||_r^2 / (4 ||z'_g||_r)) in log2 scale
    mpq_class b1 = zpn.v;
    mpq_class b2 = 2 * gn.v - 2 - zpn.v;
    mpq_class bound = b1 < b2 ? b1 : b2;
    for (const QSeries* gam : {&gamma1, &gamma2}) {
        LogNorm gnorm = psi_plus_log_norm(*gam, inst.a, log2_r, n);
        if (!gnorm.neg_inf && !(gnorm.v < bound))
            throw HypothesisViolated("||gamma||_{r,+} not below the perturbation bound");
    }
    QSeries z1 = solve_perturbed(inst, q_add(g, gamma1), n);
    QSeries z2 = solve_perturbed(inst, q_add(g, gamma2), n);
    QSeries diff = q_sub(z1, z2);
    // divide by t(t-4a): strip t, then exact series division by (t - 4a)
    if (!diff.empty() && diff[0] != 0) throw HypothesisViolated("difference not divisible by t");
    QSeries w(diff.begin() + (diff.empty() ? 0 : 1), diff.end());
    QSeries lin(2);
    lin[0] = -4 * inst.a;
    lin[1] = 1;
    QSeries quot = q_mul(w, q_invert(lin, int(w.size())), int(w.size()));
    LogNorm lhs = gauss_log_norm(quot, log2_r);
    LogNorm rhs = psi_plus_log_norm(q_sub(gamma1, gamma2), inst.a, log2_r, n);
    return lhs <= rhs;
}

} // namespace twoadic
