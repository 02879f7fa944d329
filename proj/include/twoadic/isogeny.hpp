#pragma once

// End-to-end computation of the x-map of an ell-isogeny between ordinary
// curves y^2 + xy = x^3 + a2 x^2 + a6 over F_{2^d}, from the lifted curve
// pair and the equation constant: solve the differential equation to
// t^(2 ell + 2), reduce mod 2, take the square root of z/t, reconstruct the
// rational function by Pade approximation, and reassemble
// eta = x rev(B)^2 / rev(A)^2. The kernel polynomial is psi = rev(A) (monic).

#include <chrono>
#include <random>

#include "twoadic/ode.hpp"

namespace twoadic {

struct OrdinaryCurve {
    GFContext F;
    gf a2 = 0;
    gf a6 = 1; // must be nonzero (ordinary, nonsingular)
};

// Lifted input data for the pipeline. `c` is the equation constant: the
// solved equation is U z'^2 = c V(z) with U, V the bare quartics
// 4t + (4*A2+1) t^2 + 4*A6 t^4 built from each side. For an isogeny whose
// invariant differentials satisfy dx/y = c0 d(x~)/(y~), c = 1/c0^2; the
// worked examples report this constant directly.
struct LiftedPair {
    std::shared_ptr<const PrecisionContext> ctx;
    Zq A2, A6, At2, At6, c;
    int ell = 0;
};

struct IsogenyResult {
    GFPoly num;    // numerator of eta, degree ell
    GFPoly den;    // denominator = psi^2, degree ell - 1
    GFPoly psi;    // kernel polynomial, monic, degree (ell-1)/2
    GFPoly hpoly;  // the cofactor with num = x * hpoly^2
    int ell = 0;
};

inline Series build_U_side(const PrecisionContext* ctx, const Zq& A2, const Zq& A6, int n) {
    Series U(ctx, n);
    Zq four = Zq::from_int(ctx, 4);
    U.set(1, four);
    U.set(2, four * A2 + Zq::one(ctx));
    if (n > 4) U.set(4, four * A6);
    return U;
}

// U from the source lift, V from the target lift, both length n = 2 ell + 2
// (at least 6 so the quartic is always present).
inline int series_length_for(int ell) { return std::max(2 * ell + 2, 6); }

inline std::pair<Series, Series> build_UV(const LiftedPair& pair) {
    int n = series_length_for(pair.ell);
    return {build_U_side(pair.ctx.get(), pair.A2, pair.A6, n),
            build_U_side(pair.ctx.get(), pair.At2, pair.At6, n)};
}

// The square-root seed needs U_0(0) = 1 + 4 a2 = 1 (mod 8), i.e. even A2.
// When a2 = s^2 + s is solvable in the residue field (trace 0) the curve is
// the twist of y^2 + xy = x^3 + a6 by an x-preserving isomorphism, so A2 may
// be replaced by 0 without changing the x-map; when the trace is 1 the
// quadratic unramified extension is taken first (where every base-field
// element has absolute trace 0) and everything is embedded.
inline LiftedPair normalize_pair(const LiftedPair& pair) {
    GFContext F = pair.ctx->residue_field();
    gf a2 = pair.A2.reduce_mod2(), at2 = pair.At2.reduce_mod2();
    LiftedPair out = pair;
    if (gf_trace(F, a2) != 0 || gf_trace(F, at2) != 0) {
        auto ext = extend_context<uint64_t>(pair.ctx, pair.A2);
        if (!ext.extended) ext = extend_context<uint64_t>(pair.ctx, pair.At2);
        out.ctx = ext.ctx;
        out.A2 = ext.embed(pair.A2);
        out.A6 = ext.embed(pair.A6);
        out.At2 = ext.embed(pair.At2);
        out.At6 = ext.embed(pair.At6);
        out.c = ext.embed(pair.c);
    }
    if (!out.A2.is_zero() || !out.At2.is_zero()) {
        // twist both sides to a2 = 0 (x-preserving)
        out.A2 = Zq::zero(out.ctx.get());
        out.At2 = Zq::zero(out.ctx.get());
    }
    return out;
}

// Solve to z mod (t^(2 ell + 2), 2^N), N >= 3, certifying the mod-2 image.
inline Series solve_to_series(const LiftedPair& pair_in, SolveReport* report = nullptr) {
    LiftedPair pair = normalize_pair(pair_in);
    auto [U, V] = build_UV(pair);
    int n = series_length_for(pair.ell);
    if (pair.ctx->M < required_precision(3, n))
        throw SchemaError("context precision below required_precision(3, n)");
    Series z = iso_solve(U, V, n, std::optional<Zq>(pair.c), report);
    if (report) report->N = pair.ctx->M - (required_precision(3, n) - 3);
    return z;
}

// S over F_{2^d} with S^2 = z/t mod 2 (coefficient square roots are the
// inverse Frobenius; indices halve). Throws if an odd-degree term survives.
inline GFPoly reduce_and_sqrt(const GFContext& F, const Series& z) {
    int nz = z.length();
    std::vector<gf> zt;
    for (int i = 1; i < nz; ++i) zt.push_back(z.get(i).reduce_mod2());
    for (size_t i = 1; i < zt.size(); i += 2)
        if (zt[i])
            throw NotASquareChar2("odd-degree term t^" + std::to_string(i) +
                                  " survives in z/t mod 2");
    std::vector<gf> S((zt.size() + 1) / 2, 0);
    for (size_t i = 0; i < S.size(); ++i) S[i] = gf_sqrt(F, zt[2 * i]);
    GFPoly out(F, std::move(S));
    out.c.resize((zt.size() + 1) / 2, 0); // keep nominal length even if top zero
    return out;
}

// Pade [k/k] of S, then eta = x rev(B)^2 / rev(A)^2 with k = (ell-1)/2;
// the result is normalized so psi = rev(A) is monic.
inline IsogenyResult reconstruct(const GFContext& F, const GFPoly& S, int ell) {
    int k = (ell - 1) / 2;
    if ((int)S.c.size() < 2 * k + 1)
        throw ReconstructionFailure("series too short for the [k/k] Pade step");
    GFPoly A, B;
    try {
        half_gcd_pade(S, k, A, B);
    } catch (const NoApproximant& e) {
        throw ReconstructionFailure(std::string("no Pade approximant: ") + e.what());
    }
    if (A.deg() != k)
        throw ReconstructionFailure("kernel degree bound violated (expected " +
                                    std::to_string(k) + ", got " + std::to_string(A.deg()) + ")");
    GFPoly psi = gfp_reverse(A, k);
    GFPoly H = gfp_reverse(B, k);
    if (psi.deg() != k)
        throw ReconstructionFailure("kernel polynomial has a root at x = 0");
    // normalize so psi is monic; eta is invariant under joint scaling
    gf s = gf_inv(F, psi.lead());
    psi = gfp_scale(psi, s);
    H = gfp_scale(H, s);
    IsogenyResult res;
    res.ell = ell;
    res.psi = psi;
    res.hpoly = H;
    res.num = gfp_mul(gfp_x(F), gfp_mul(H, H));
    res.den = gfp_mul(psi, psi);
    if (res.num.deg() != ell || res.den.deg() != ell - 1)
        throw ReconstructionFailure("map degree check failed");
    if (gfp_gcd(res.num, res.den).deg() != 0)
        throw ReconstructionFailure("numerator and denominator share a factor");
    return res;
}

// the full pipeline
inline IsogenyResult compute_isogeny(const LiftedPair& pair_in, SolveReport* report = nullptr) {
    LiftedPair pair = normalize_pair(pair_in);
    GFContext F = pair.ctx->residue_field();
    Series z = solve_to_series(pair, report);
    GFPoly S = reduce_and_sqrt(F, z);
    return reconstruct(F, S, pair.ell);
}

// Multiplication-by-ell instance over an arbitrary 0/1 lift of E; the map
// has degree ell^2 and the equation constant is ell^2 (the Eq.-(2)
// differential of [ell] is 1/ell; see the project notes).
inline LiftedPair multiplication_instance(const OrdinaryCurve& E, int ell_odd,
                                          int N = 3) {
    if (ell_odd < 1 || ell_odd % 2 == 0) throw SchemaError("ell must be odd");
    int deg = ell_odd * ell_odd;
    int n = series_length_for(deg);
    auto ctx = make_context(E.F.d, required_precision(std::max(N, 3), n),
                            modulus_lift_from_bits(E.F.d, E.F.modulus));
    LiftedPair pair;
    pair.ctx = ctx;
    pair.A2 = lift_from_gf<uint64_t>(ctx.get(), E.a2);
    pair.A6 = lift_from_gf<uint64_t>(ctx.get(), E.a6);
    pair.At2 = pair.A2;
    pair.At6 = pair.A6;
    pair.c = Zq::from_int(ctx.get(), (long long)ell_odd * ell_odd);
    pair.ell = deg;
    return pair;
}

// ---------------------------------------------------------------------------
// Verification: for random x on the source curve over F_{2^(d k)}, k <= 8,
// the image X = eta(x) must satisfy the solvability criterion of
// Y^2 + XY = X^3 + a2~ X^2 + a6~, i.e. Tr(X + a2~ + a6~ X^-2) = 0 (X != 0;
// X = 0 is the 2-torsion abscissa and lies on every such curve).

struct VerifyReport {
    int tried = 0;
    int passed = 0;
    bool degrees_ok = false;
    bool coprime_ok = false;
    bool ok() const { return degrees_ok && coprime_ok && tried > 0 && passed == tried; }
};

inline VerifyReport verify_isogeny(const IsogenyResult& res, const OrdinaryCurve& source,
                                   const OrdinaryCurve& target, int trials,
                                   uint64_t seed = 0x5eed) {
    VerifyReport rep;
    rep.degrees_ok = res.num.deg() == res.ell && res.den.deg() == res.ell - 1 &&
                     res.psi.deg() == (res.ell - 1) / 2;
    rep.coprime_ok = gfp_gcd(res.num, res.den).deg() == 0;
    std::mt19937_64 rng(seed);
    const GFContext& F = source.F;
    long guard = 64L * trials + 4096;
    for (int k = 1; rep.tried < trials && guard > 0; k = k % 8 + 1) {
        GFPoly g = (k == 1) ? GFPoly(F, {gf(1), gf(1)}) // y + 1: the base field itself
                            : gfp_random_irreducible(F, k, rng);
        GFTower T{F, g};
        for (int t = 0; t < 4 && rep.tried < trials && guard > 0; ++t, --guard) {
            GFTower::elt x = T.zero();
            for (auto& coef : x) coef = rng() & ((gf(1) << F.d) - 1);
            if (T.is_zero(x)) continue;
            // on source curve? Tr(x + a2 + a6/x^2) == 0
            GFTower::elt crit = T.add(
                T.add(x, T.from_base(source.a2)),
                T.mul(T.from_base(source.a6), T.inv(T.sq(x))));
            if (T.abs_trace(crit) != 0) continue;
            // evaluate eta
            auto eval = [&](const GFPoly& p) {
                GFTower::elt acc = T.zero();
                for (int i = p.deg(); i >= 0; --i)
                    acc = T.add(T.mul(acc, x), T.from_base(p.coeff(i)));
                return acc;
            };
            GFTower::elt nv = eval(res.num), dv = eval(res.den);
            if (T.is_zero(dv)) continue; // x in the kernel: image is infinity
            GFTower::elt X = T.mul(nv, T.inv(dv));
            ++rep.tried;
            if (T.is_zero(X)) {
                ++rep.passed; // image abscissa 0: the 2-torsion point, always on the curve
                continue;
            }
            GFTower::elt crit2 = T.add(
                T.add(X, T.from_base(target.a2)),
                T.mul(T.from_base(target.a6), T.inv(T.sq(X))));
            if (T.abs_trace(crit2) == 0) ++rep.passed;
        }
    }
    return rep;
}

} // namespace twoadic
