#pragma once

// The solvers: the linearized-equation solver (psi_plus / psi_minus), the
// coefficient-recurrence oracle, the Newton scheme over the q-coordinates of
// z = lambda t + t(t-4a) q, and the wrapper that prepares a, b, u, u^2, u^-3,
// v^2 from (U, V) satisfying (H_U), (H_V).
//
// Conventions pinned by the worked example (see the project notes):
//   * recursion window m = ceil(n/2);
//   * correction sign s_n = W(t, q_m) - u^2 w_n (the Newton corollary's);
//   * base case q_0 = lambda (u0^2 - v0^2) / (4a u0^2), r_0 = (z'(0))^-2;
//   * the optional constant c multiplies the target side: U z'^2 = c V(z),
//     realized as v^2 = c V_0.

#include <cmath>
#include <optional>
#include <vector>

#include "twoadic/series.hpp"

namespace twoadic {

enum class PrecisionKind { nonlinear, linear };

// Working precision needed so the output of the solver (nonlinear) or of
// LinDiffSolve (linear) is correct at O(2^N) for truncation t^n.
inline int required_precision(int N, int n, PrecisionKind kind = PrecisionKind::nonlinear) {
    if (N < 1 || n < 1) throw SchemaError("required_precision needs N >= 1, n >= 1");
    auto floor_log2 = [](int x) {
        int b = 0;
        while ((1 << (b + 1)) <= x) ++b;
        return b;
    };
    if (kind == PrecisionKind::linear) return N + floor_log2(n + 1) + 1;
    return std::max(N, 3) + floor_log2(n) + 2;
}

// ---------------------------------------------------------------------------
// Algorithm "LinDiffSolve": unique solution of t(t-4a) y' + (t-2a) y = f
// mod t^n:  y_0 = -f_0/(2a),  y_i = (i y_{i-1} - f_i) / (2a (2i+1)).
template <class W>
inline SeriesT<W> psi_plus(const ZqT<W>& a, const SeriesT<W>& f, int n) {
    const PrecisionContext* ctx = f.ctx();
    ZqT<W> two_a = ZqT<W>::from_int(ctx, 2) * a;
    SeriesT<W> y(ctx, n);
    y.set(0, div(-f.get(0), two_a));
    for (int i = 1; i < n; ++i) {
        ZqT<W> num = ZqT<W>::from_int(ctx, i) * y.get(i - 1) - f.get(i);
        ZqT<W> den = two_a * ZqT<W>::from_int(ctx, 2 * i + 1);
        y.set(i, div(num, den));
    }
    return y;
}

// unique solution of t(t-4a) y' - (t-2a) y = f mod t^n:
// y_0 = f_0/(2a),  y_i = ((i-2) y_{i-1} - f_i) / (2a (2i-1)).
template <class W>
inline SeriesT<W> psi_minus(const ZqT<W>& a, const SeriesT<W>& f, int n) {
    const PrecisionContext* ctx = f.ctx();
    ZqT<W> two_a = ZqT<W>::from_int(ctx, 2) * a;
    SeriesT<W> y(ctx, n);
    y.set(0, div(f.get(0), two_a));
    for (int i = 1; i < n; ++i) {
        ZqT<W> num = ZqT<W>::from_int(ctx, i - 2) * y.get(i - 1) - f.get(i);
        ZqT<W> den = two_a * ZqT<W>::from_int(ctx, 2 * i - 1);
        y.set(i, div(num, den));
    }
    return y;
}

// ---------------------------------------------------------------------------

struct LevelDiagnostics {
    int n = 0;
    int m = 0;
    int defect_val = 0; // min val2 of the first m coefficients of s_n (should be M)
    int front_val = 0;  // min val2 of the first m coefficients of y_n (should be M)
};

struct SolveReport {
    int n = 0;
    int N = 0;
    int M = 0;
    int depth = 0;
    std::vector<LevelDiagnostics> levels;
};

template <class W>
struct NonlinearODET {
    const PrecisionContext* ctx = nullptr;
    ZqT<W> a, b, four_a, four_b, lambda;
    SeriesT<W> u, u2, u_inv3, v2;
    std::vector<SeriesT<W>> Wc; // W(t,x) = sum Wc[i](t) x^i, degree <= 4
    int n = 0;
};

using NonlinearODE = NonlinearODET<uint64_t>;

// Valuation-2 root of P(x) = sum P_i x^i (the coefficients of U/t), found by
// the contraction x <- -(P_0 + sum_{i>=2} P_i x^i)/P_1 from x = -4.
// Requires val2(P_0) = 2 and P_1 a unit (the (H_U) Newton-polygon shape).
template <class W>
inline ZqT<W> hensel_4a(const std::vector<ZqT<W>>& P) {
    if (P.size() < 2) throw HenselFailure("U/t has fewer than two coefficients");
    const PrecisionContext* ctx = P[0].ctx();
    if (P[0].val2() != 2 || P[1].val2() != 0)
        throw HenselFailure("U/t does not have the t(t-4a)-shape (no slope -2 segment)");
    ZqT<W> inv_p1 = inv_unit(P[1]);
    ZqT<W> x = ZqT<W>::from_int(ctx, -4);
    for (int it = 0; it < 2 * ctx->M + 4; ++it) {
        ZqT<W> acc = P[0];
        ZqT<W> xp = x * x;
        for (size_t i = 2; i < P.size(); ++i) {
            acc = acc + P[i] * xp;
            xp = xp * x;
        }
        ZqT<W> nx = -(acc * inv_p1);
        if (nx == x) break;
        x = nx;
    }
    // residual check
    ZqT<W> acc = P[0];
    ZqT<W> xp = x;
    for (size_t i = 1; i < P.size(); ++i) {
        acc = acc + P[i] * xp;
        xp = xp * x;
    }
    if (!acc.is_zero()) throw HenselFailure("fixed-point iteration for the valuation-2 root failed");
    if (x.val2() != 2) throw HenselFailure("root does not have valuation 2");
    return x;
}

namespace detail {

// quotient of the polynomial P (coefficients of U/t) by the monic (t - 4a);
// exact synthetic division, remainder asserted zero.
template <class W>
inline std::vector<ZqT<W>> synth_divide(const std::vector<ZqT<W>>& P, const ZqT<W>& root) {
    const PrecisionContext* ctx = P[0].ctx();
    size_t n = P.size();
    std::vector<ZqT<W>> q(n - 1, ZqT<W>::zero(ctx));
    ZqT<W> carry = ZqT<W>::zero(ctx);
    for (size_t i = n - 1; i >= 1; --i) {
        q[i - 1] = P[i] + carry;
        carry = q[i - 1] * root;
    }
    ZqT<W> rem = P[0] + carry;
    if (!rem.is_zero()) throw HenselFailure("nonzero remainder dividing by (t - 4a)");
    return q;
}

} // namespace detail

// Precompute the solver instance from U, V of valuation 1 satisfying (H_U)
// and (H_V), solving U z'^2 = c V(z) (c defaults to 1). n is the truncation
// DiffSolve will be run at.
template <class W>
inline NonlinearODET<W> make_ode(const SeriesT<W>& U, const SeriesT<W>& V, int n,
                                 std::optional<ZqT<W>> c = std::nullopt) {
    const PrecisionContext* ctx = U.ctx();
    NonlinearODET<W> ode;
    ode.ctx = ctx;
    ode.n = n;
    if (U.length() < 2 || V.length() < 2 || !U.coeff_is_zero(0) || !V.coeff_is_zero(0))
        throw DegenerateInstance("U and V must have t-adic valuation 1");

    std::vector<ZqT<W>> PU, PV;
    for (int i = 1; i < U.length(); ++i) PU.push_back(U.get(i));
    for (int i = 1; i < V.length(); ++i) PV.push_back(V.get(i));
    while (PU.size() > 1 && PU.back().is_zero()) PU.pop_back();
    while (PV.size() > 1 && PV.back().is_zero()) PV.pop_back();
    if (PU.size() < 3 || PV.size() < 3)
        throw HenselFailure("degenerate input: not of the ordinary-curve quartic shape");

    ode.four_a = hensel_4a(PU);
    ode.four_b = hensel_4a(PV);
    ZqT<W> four = ZqT<W>::from_int(ctx, 4);
    ode.a = div(ode.four_a, four);
    ode.b = div(ode.four_b, four);
    ode.lambda = div(ode.b, ode.a);

    std::vector<ZqT<W>> U0 = detail::synth_divide(PU, ode.four_a);
    std::vector<ZqT<W>> V0 = detail::synth_divide(PV, ode.four_b);
    if (V0.size() > 3)
        throw DegenerateInstance("v^2 of degree > 2 is outside the quartic-W shape");

    ode.u2 = SeriesT<W>(ctx, U0, n);
    SeriesT<W> v2(ctx, V0, std::max<int>(3, int(V0.size())));
    if (c) v2 = v2.scale(*c);
    ode.v2 = v2.trunc(n);

    int nhalf = (n + 1) / 2;
    SeriesT<W> rinv = sqrt_inverse(ode.u2, n); // u^-1, accurate to O(2^(M-1))
    ode.u = ode.u2.mul(rinv, nhalf);
    ode.u_inv3 = rinv.mul(rinv, nhalf).mul(rinv, nhalf);

    // W(t,x) = (lambda + (t-4a)x)(lambda + t x) v^2(lambda t + t(t-4a) x)
    //        = (AB)(x) * C(x) with AB = lambda^2 + lambda(2t-4a) x + t(t-4a) x^2
    // and C(x) = v2_0 + v2_1 y + v2_2 y^2 at y = lambda t + t(t-4a) x.
    ZqT<W> zero = ZqT<W>::zero(ctx), one = ZqT<W>::one(ctx);
    SeriesT<W> t_t4a(ctx, 3); // t(t - 4a)
    t_t4a.set(1, -ode.four_a);
    t_t4a.set(2, one);
    SeriesT<W> lam_t(ctx, 2);
    lam_t.set(1, ode.lambda);
    SeriesT<W> c0(ctx, 1), c1(ctx, 1), c2(ctx, 1);
    c0.set(0, v2.get(0));
    c1.set(0, v2.get(1));
    c2.set(0, v2.get(2));
    SeriesT<W> C0 = c0 + c1.mul(lam_t, 3) + c2.mul(lam_t, 3).mul(lam_t, 3);
    SeriesT<W> C1 = c1.mul(t_t4a, 4) +
                    c2.mul(lam_t, 5).mul(t_t4a, 5).scale(ZqT<W>::from_int(ctx, 2));
    SeriesT<W> C2 = c2.mul(t_t4a, 5).mul(t_t4a, 5);
    SeriesT<W> lam2(ctx, 1);
    lam2.set(0, ode.lambda * ode.lambda);
    SeriesT<W> lam_2t4a(ctx, 2); // lambda (2t - 4a)
    lam_2t4a.set(0, -(ode.lambda * ode.four_a));
    lam_2t4a.set(1, ZqT<W>::from_int(ctx, 2) * ode.lambda);
    int wn = std::min(n, 8);
    ode.Wc = {lam2.mul(C0, wn),
              lam2.mul(C1, wn) + lam_2t4a.mul(C0, wn),
              lam2.mul(C2, wn) + lam_2t4a.mul(C1, wn) + t_t4a.mul(C0, wn),
              lam_2t4a.mul(C2, wn) + t_t4a.mul(C1, wn),
              t_t4a.mul(C2, wn)};
    (void)zero;
    return ode;
}

// z_m = lambda t + t(t-4a) q, truncated to t^len
template <class W>
inline SeriesT<W> z_from_q(const NonlinearODET<W>& ode, const SeriesT<W>& q, int len) {
    SeriesT<W> z(ode.ctx, len);
    if (len > 1) z.set(1, ode.lambda);
    for (int i = 0; i < q.length(); ++i) {
        ZqT<W> qi = q.get(i);
        if (i + 1 < len) z.set(i + 1, z.get(i + 1) - ode.four_a * qi);
        if (i + 2 < len) z.set(i + 2, z.get(i + 2) + qi);
    }
    return z;
}

// Algorithm "DiffSolve": returns (q_n mod t^n, r_n = (z'_n)^-2 mod t^ceil(n/2)).
template <class W>
inline std::pair<SeriesT<W>, SeriesT<W>> diff_solve(const NonlinearODET<W>& ode, int n,
                                                    SolveReport* report = nullptr) {
    const PrecisionContext* ctx = ode.ctx;
    if (n <= 1) {
        // t^0 coefficient of the tilde equation: W(0, q_0) = u_0^2 z'(0)^2
        ZqT<W> num = ode.lambda * (ode.u2.get(0) - ode.v2.get(0));
        ZqT<W> den = ode.four_a * ode.u2.get(0);
        ZqT<W> q0 = div(num, den);
        ZqT<W> zp0 = ode.lambda - ode.four_a * q0;
        SeriesT<W> q(ctx, 1), r(ctx, 1);
        q.set(0, q0);
        r.set(0, inv_unit(zp0 * zp0));
        if (report) report->depth++;
        return {q, r};
    }
    int m = (n + 1) / 2;
    auto [qm, rm] = diff_solve(ode, m, report);
    if (report) report->depth++;

    SeriesT<W> zm = z_from_q(ode, qm, n + 1);
    SeriesT<W> zp = zm.derivative().trunc(n); // one coefficient lost
    SeriesT<W> w = zp.mul(zp, n);
    SeriesT<W> Wq = compose_quartic(ode.Wc, qm, n);
    SeriesT<W> s = Wq - ode.u2.trunc(n).mul(w, n); // s mod t^m = 0

    int defect_val = ctx->M;
    for (int i = 0; i < m; ++i) defect_val = std::min(defect_val, s.coeff_val2(i));
    if (defect_val != ctx->M)
        throw IntegralityViolation("defect s_n mod t^m != 0 at level n = " + std::to_string(n));

    int nh = (n + 1) / 2;
    SeriesT<W> two_minus(ctx, nh);
    {
        SeriesT<W> rw = rm.mul(w.trunc(nh), nh);
        two_minus.set(0, ZqT<W>::from_int(ctx, 2) - rw.get(0));
        for (int i = 1; i < nh; ++i) two_minus.set(i, -rw.get(i));
    }
    SeriesT<W> r = rm.mul(two_minus, nh); // (z'_n)^-2, Newton iteration

    SeriesT<W> f = div2_series(s.mul(r, n).mul(ode.u_inv3.trunc(n), n));
    SeriesT<W> y = psi_plus(ode.a, f, n); // y mod t^m = 0

    int front_val = ctx->M;
    for (int i = 0; i < m; ++i) front_val = std::min(front_val, y.coeff_val2(i));
    if (report) report->levels.push_back({n, m, defect_val, front_val});

    SeriesT<W> q = qm.trunc(n) + zp.mul(ode.u.trunc(n), n).mul(y, n);
    return {q, r};
}

// Algorithm "IsoSolve": z_n mod (t^n, 2^N) from U, V mod t^n, run at working
// precision M = required_precision(N, n).
template <class W>
inline SeriesT<W> iso_solve(const SeriesT<W>& U, const SeriesT<W>& V, int n,
                            std::optional<ZqT<W>> c = std::nullopt,
                            SolveReport* report = nullptr) {
    NonlinearODET<W> ode = make_ode(U.trunc(n), V.trunc(n), n - 1, c);
    auto [q, r] = diff_solve(ode, n - 1, report);
    if (report) {
        report->n = n;
        report->M = U.ctx()->M;
    }
    return z_from_q(ode, q, n);
}

// ---------------------------------------------------------------------------
// Coefficient-recurrence oracle. Exact mode works over arbitrary-precision
// rationals (d = 1); inflated mode runs the same recurrence in fixed point at
// a caller-supplied working precision M_big >= N + 2n + 4 (two bits lost per
// step to the valuation-2 division by (2k-1) v_1).

// [t^k] of (U z'^2 - V(z)) for the partial z (z_k treated as 0), V polynomial.
namespace detail {

template <class T, class MulFn, class AddFn>
inline std::vector<T> poly_mul_trunc(const std::vector<T>& a, const std::vector<T>& b, int nout,
                                     const T& zero, MulFn mul, AddFn add) {
    std::vector<T> r(size_t(nout), zero);
    for (size_t i = 0; i < a.size() && int(i) < nout; ++i)
        for (size_t j = 0; j < b.size() && i + j < size_t(nout); ++j)
            r[i + j] = add(r[i + j], mul(a[i], b[j]));
    return r;
}

} // namespace detail

// exact-rational oracle (d = 1); U, V given exactly, V a polynomial
inline std::vector<mpq_class> naive_solve_exact(const std::vector<mpq_class>& U,
                                                const std::vector<mpq_class>& V, int n) {
    if (U.size() < 2 || V.size() < 2 || U[0] != 0 || V[0] != 0 || U[1] == 0 || V[1] == 0)
        throw DegenerateInstance("oracle requires valuation-1 U, V");
    mpq_class u1 = U[1], v1 = V[1];
    std::vector<mpq_class> z{mpq_class(0), v1 / u1};
    auto mul = [](const mpq_class& a, const mpq_class& b) { return mpq_class(a * b); };
    auto add = [](const mpq_class& a, const mpq_class& b) { return mpq_class(a + b); };
    for (int k = 2; k < n; ++k) {
        std::vector<mpq_class> zp(z.size() - 1);
        for (size_t i = 0; i + 1 < z.size(); ++i) zp[i] = mpq_class(long(i + 1)) * z[i + 1];
        std::vector<mpq_class> w =
            detail::poly_mul_trunc(zp, zp, k + 1, mpq_class(0), mul, add);
        mpq_class lhs(0);
        for (size_t i = 1; i < U.size() && int(i) <= k; ++i) lhs += U[i] * w[size_t(k) - i];
        // V o z at t^k
        mpq_class rhs(0);
        std::vector<mpq_class> pw(size_t(k) + 1, mpq_class(0));
        pw[0] = 1;
        for (size_t e = 1; e < V.size(); ++e) {
            pw = detail::poly_mul_trunc(pw, z, k + 1, mpq_class(0), mul, add);
            if (V[e] != 0) rhs += V[e] * pw[size_t(k)];
        }
        mpq_class resid = lhs - rhs;
        z.push_back(-resid / (mpq_class(2 * k - 1) * v1));
    }
    return z;
}

// residue of an odd-denominator rational mod 2^N
inline uint64_t mpq_mod_pow2(const mpq_class& x, int N) {
    mpz_class num = x.get_num(), den = x.get_den();
    mpz_class mod = mpz_class(1) << N;
    mpz_class dinv;
    if (mpz_invert(dinv.get_mpz_t(), den.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw PrecisionError("rational is not 2-integral");
    mpz_class r = ((num % mod) * dinv) % mod;
    if (r < 0) r += mod;
    return r.get_ui();
}

// inflated fixed-point oracle: the same recurrence with the model's division
// semantics, any d; caller builds U, V in a context with M >= N + 2n + 4.
template <class W>
inline SeriesT<W> naive_solve_inflated(const SeriesT<W>& U, const SeriesT<W>& V, int n) {
    const PrecisionContext* ctx = U.ctx();
    if (U.length() < 2 || V.length() < 2 || !U.coeff_is_zero(0) || !V.coeff_is_zero(0) ||
        U.coeff_is_zero(1) || V.coeff_is_zero(1))
        throw DegenerateInstance("oracle requires valuation-1 U, V");
    ZqT<W> v1 = V.get(1);
    SeriesT<W> z(ctx, n);
    z.set(1, div(v1, U.get(1)));
    for (int k = 2; k < n; ++k) {
        SeriesT<W> zp = z.trunc(k).derivative();
        SeriesT<W> w = zp.mul(zp, k + 1);
        ZqT<W> lhs = ZqT<W>::zero(ctx);
        for (int i = 1; i < U.length() && i <= k; ++i) lhs = lhs + U.get(i) * w.get(k - i);
        ZqT<W> rhs = ZqT<W>::zero(ctx);
        SeriesT<W> pw(ctx, k + 1);
        pw.set(0, ZqT<W>::one(ctx));
        for (int e = 1; e < V.length(); ++e) {
            pw = pw.mul(z, k + 1);
            if (!V.coeff_is_zero(e)) rhs = rhs + V.get(e) * pw.get(k);
        }
        ZqT<W> resid = lhs - rhs;
        ZqT<W> den = ZqT<W>::from_int(ctx, 2 * k - 1) * v1;
        z.set(k, div(-resid, den));
    }
    return z;
}

} // namespace twoadic
