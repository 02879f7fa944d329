#pragma once

// Fixed-point arithmetic in O_K/2^M for K the unramified extension of Q_2 of
// degree d, with the exact division semantics of the computation model:
// add/sub/mul are exact in the quotient ring; div(x, y) raises PrecisionError
// when val2(y) > val2(x), returns 0 for x = 0, and otherwise the canonical
// representative obtained by shifting both operands by val2(y) and inverting
// the resulting unit mod 2^(M - val2(y)), high bits zero.
//
// Precision is a property of the context (no per-element tracking). Elements
// of Z_{2^d}/2^M are degree-< d polynomials over Z/2^M modulo a fixed 0/1
// lift of an irreducible polynomial over F_2 (same table as gf2.hpp).
//
// The coefficient word is a template parameter: uint64_t for the working
// solver (M <= 62) and mpz_class for the inflated-precision oracle.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <memory>
#include <type_traits>
#include <vector>

#include <gmpxx.h>

#include "twoadic/errors.hpp"
#include "twoadic/gf2.hpp"

namespace twoadic {

// ---- word-level helpers -----------------------------------------------------

inline void word_reduce(uint64_t& x, int M) { x &= (M >= 64) ? ~uint64_t(0) : ((uint64_t(1) << M) - 1); }
inline void word_reduce(mpz_class& x, int M) {
    mpz_fdiv_r_2exp(x.get_mpz_t(), x.get_mpz_t(), mp_bitcnt_t(M));
}
inline int word_val2(uint64_t x, int cap) {
    if (x == 0) return cap;
    int v = __builtin_ctzll(x);
    return v < cap ? v : cap;
}
inline int word_val2(const mpz_class& x, int cap) {
    if (x == 0) return cap;
    int v = int(mpz_scan1(x.get_mpz_t(), 0));
    return v < cap ? v : cap;
}
inline uint64_t word_shr(uint64_t x, int k) { return k >= 64 ? 0 : (x >> k); }
inline mpz_class word_shr(const mpz_class& x, int k) {
    mpz_class r;
    mpz_fdiv_q_2exp(r.get_mpz_t(), x.get_mpz_t(), mp_bitcnt_t(k));
    return r;
}
// inverse of an odd word modulo 2^M
inline uint64_t word_inv_odd(uint64_t a, int M) {
    uint64_t x = 1; // Newton: x <- x(2 - a x)
    for (int bits = 1; bits < M; bits *= 2) {
        x = x * (2 - a * x);
        word_reduce(x, M);
    }
    word_reduce(x, M);
    return x;
}
inline mpz_class word_inv_odd(const mpz_class& a, int M) {
    mpz_class mod = mpz_class(1) << M, r;
    if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), mod.get_mpz_t()) == 0)
        throw NotInvertible("even element has no inverse mod 2^M");
    return r;
}
inline bool word_is_zero(uint64_t x) { return x == 0; }
inline bool word_is_zero(const mpz_class& x) { return x == 0; }
inline uint64_t word_low_u64(uint64_t x) { return x; }
inline uint64_t word_low_u64(const mpz_class& x) { return mpz_get_ui(x.get_mpz_t()); }

// ---- context ----------------------------------------------------------------

struct PrecisionContext {
    int d = 1;
    int M = 1;
    std::vector<int> modulus; // 0/1 lift, little endian, length d+1, monic

    bool same_as(const PrecisionContext& o) const {
        return d == o.d && M == o.M && modulus == o.modulus;
    }
    GFContext residue_field() const {
        uint64_t bits = 0;
        for (int i = 0; i <= d; ++i)
            if (modulus[i] & 1) bits |= uint64_t(1) << i;
        return GFContext{d, bits};
    }
};

inline std::vector<int> modulus_lift_from_bits(int d, uint64_t bits) {
    std::vector<int> m(d + 1, 0);
    for (int i = 0; i <= d; ++i) m[i] = int((bits >> i) & 1);
    return m;
}

// Context with the table modulus for degree d (d = 4 gives v^4 + v + 1,
// matching the F_16 representation used throughout).
inline std::shared_ptr<const PrecisionContext> make_context(int d, int M) {
    if (d < 1) throw SchemaError("context degree must be >= 1");
    if (M < 1) throw SchemaError("context precision must be >= 1");
    auto ctx = std::make_shared<PrecisionContext>();
    ctx->d = d;
    ctx->M = M;
    ctx->modulus = modulus_lift_from_bits(d, gf2_modulus_bits(d));
    return ctx;
}

inline std::shared_ptr<const PrecisionContext>
make_context(int d, int M, std::vector<int> modulus) {
    if ((int)modulus.size() != d + 1 || modulus[d] != 1)
        throw SchemaError("modulus must be monic of degree d");
    auto ctx = std::make_shared<PrecisionContext>();
    ctx->d = d;
    ctx->M = M;
    ctx->modulus = std::move(modulus);
    GFContext F = ctx->residue_field();
    std::vector<gf> bits(size_t(d) + 1);
    for (int i = 0; i <= d; ++i) bits[i] = gf(ctx->modulus[i] & 1);
    GFContext f2{1, 0b10};
    if (!irreducible_test(GFPoly(f2, bits)))
        throw SchemaError("modulus is not irreducible mod 2");
    (void)F;
    return ctx;
}

// ---- elements ---------------------------------------------------------------

template <class W>
constexpr int word_capacity_bits() {
    return std::is_same_v<W, uint64_t> ? 62 : 1 << 24;
}

template <class W>
class ZqT {
  public:
    ZqT() = default;
    ZqT(const PrecisionContext* ctx, std::vector<W> coeffs) : ctx_(ctx), a_(std::move(coeffs)) {
        if (ctx_->M > word_capacity_bits<W>())
            throw SchemaError("precision exceeds the word backend capacity");
        a_.resize(size_t(ctx_->d));
        for (auto& x : a_) word_reduce(x, ctx_->M);
    }
    static ZqT from_int(const PrecisionContext* ctx, long long v) {
        std::vector<W> c(size_t(ctx->d), W(0));
        c[0] = W(static_cast<unsigned long>(v < 0 ? -v : v));
        ZqT r(ctx, std::move(c));
        return v < 0 ? zero(ctx) - r : r;
    }
    static ZqT zero(const PrecisionContext* ctx) { return from_int(ctx, 0); }
    static ZqT one(const PrecisionContext* ctx) { return from_int(ctx, 1); }

    const PrecisionContext* ctx() const { return ctx_; }
    const std::vector<W>& coeffs() const { return a_; }
    std::vector<W>& coeffs() { return a_; }

    bool is_zero() const {
        for (const auto& x : a_)
            if (!word_is_zero(x)) return false;
        return true;
    }
    int val2() const {
        if (is_zero()) return ctx_->M;
        int v = ctx_->M;
        for (const auto& x : a_) v = std::min(v, word_val2(x, ctx_->M));
        return v;
    }

    friend ZqT operator+(const ZqT& x, const ZqT& y) {
        x.check(y);
        std::vector<W> r(x.a_);
        for (size_t i = 0; i < r.size(); ++i) {
            r[i] += y.a_[i];
            word_reduce(r[i], x.ctx_->M);
        }
        return ZqT(x.ctx_, std::move(r), nocheck{});
    }
    friend ZqT operator-(const ZqT& x, const ZqT& y) {
        x.check(y);
        std::vector<W> r(x.a_);
        for (size_t i = 0; i < r.size(); ++i) {
            r[i] += (W(1) << x.ctx_->M) - y.a_[i];
            word_reduce(r[i], x.ctx_->M);
        }
        return ZqT(x.ctx_, std::move(r), nocheck{});
    }
    ZqT operator-() const { return zero(ctx_) - *this; }
    friend ZqT operator*(const ZqT& x, const ZqT& y) {
        x.check(y);
        std::vector<W> r(size_t(x.ctx_->d), W(0));
        zq_mul_raw(*x.ctx_, x.a_.data(), y.a_.data(), r.data());
        return ZqT(x.ctx_, std::move(r), nocheck{});
    }
    friend bool operator==(const ZqT& x, const ZqT& y) { return x.a_ == y.a_; }
    friend bool operator!=(const ZqT& x, const ZqT& y) { return !(x == y); }

    // raw kernel: out (length d) = x * y mod (modulus, 2^M); out distinct from inputs
    static void zq_mul_raw(const PrecisionContext& ctx, const W* x, const W* y, W* out) {
        int d = ctx.d;
        if (d == 1) {
            out[0] = x[0] * y[0];
            word_reduce(out[0], ctx.M);
            return;
        }
        std::vector<W> prod(size_t(2 * d - 1), W(0));
        for (int i = 0; i < d; ++i) {
            if (word_is_zero(x[i])) continue;
            for (int j = 0; j < d; ++j) {
                prod[size_t(i + j)] += x[i] * y[j];
                word_reduce(prod[size_t(i + j)], ctx.M);
            }
        }
        reduce_poly_raw(ctx, prod.data(), 2 * d - 1);
        for (int i = 0; i < d; ++i) out[i] = prod[size_t(i)];
    }

    // reduce a length-len coefficient vector in place modulo (modulus, 2^M)
    static void reduce_poly_raw(const PrecisionContext& ctx, W* p, int len) {
        int d = ctx.d;
        for (int i = len - 1; i >= d; --i) {
            if (word_is_zero(p[i])) continue;
            W c = p[i];
            p[i] = W(0);
            for (int j = 0; j < d; ++j) { // modulus is 0/1 and monic
                if (ctx.modulus[j]) {
                    p[i - d + j] += (W(1) << ctx.M) - c;
                    word_reduce(p[i - d + j], ctx.M);
                }
            }
        }
    }

    // mod-2 reduction into the residue field (bitmask)
    gf reduce_mod2() const {
        gf r = 0;
        for (int i = 0; i < ctx_->d; ++i)
            if (word_low_u64(a_[i]) & 1) r |= gf(1) << i;
        return r;
    }

    struct nocheck {};
    ZqT(const PrecisionContext* ctx, std::vector<W> coeffs, nocheck) : ctx_(ctx), a_(std::move(coeffs)) {}

  private:
    void check(const ZqT& y) const {
        if (ctx_ != y.ctx_ && !(ctx_ && y.ctx_ && ctx_->same_as(*y.ctx_)))
            throw ContextMismatch("operands from different precision contexts");
    }
    const PrecisionContext* ctx_ = nullptr;
    std::vector<W> a_;
};

using Zq = ZqT<uint64_t>;
using ZqBig = ZqT<mpz_class>;

// lift of an F_{2^d} element with 0/1 coefficients
template <class W>
inline ZqT<W> lift_from_gf(const PrecisionContext* ctx, gf x) {
    std::vector<W> c(size_t(ctx->d), W(0));
    for (int i = 0; i < ctx->d; ++i)
        if ((x >> i) & 1) c[size_t(i)] = W(1);
    return ZqT<W>(ctx, std::move(c));
}

// ---- inversion / division ----------------------------------------------------

// inverse of a unit (val2 = 0) via Hensel lifting from the mod-2 inverse
template <class W>
inline ZqT<W> inv_unit(const ZqT<W>& x) {
    const PrecisionContext* ctx = x.ctx();
    if (x.val2() != 0) throw NotInvertible("not a unit in O_K/2^M");
    if (ctx->d == 1) {
        return ZqT<W>(ctx, {word_inv_odd(x.coeffs()[0], ctx->M)});
    }
    GFContext F = ctx->residue_field();
    gf r2 = gf_inv(F, x.reduce_mod2());
    ZqT<W> r = lift_from_gf<W>(ctx, r2);
    ZqT<W> two = ZqT<W>::from_int(ctx, 2);
    for (int bits = 1; bits < ctx->M; bits *= 2) r = r * (two - x * r);
    return r;
}

// fixed-point division semantics, canonical representative, zero-padded high bits
template <class W>
inline ZqT<W> div(const ZqT<W>& x, const ZqT<W>& y) {
    const PrecisionContext* ctx = x.ctx();
    if (x.is_zero()) return ZqT<W>::zero(ctx);
    int vy = y.val2();
    int vx = x.val2();
    if (vy > vx)
        throw PrecisionError("division with val2(y) = " + std::to_string(vy) +
                             " > val2(x) = " + std::to_string(vx));
    if (vy == 0 && ctx->d == 1) {
        W q = x.coeffs()[0] * word_inv_odd(y.coeffs()[0], ctx->M);
        word_reduce(q, ctx->M);
        return ZqT<W>(ctx, {q});
    }
    PrecisionContext sub = *ctx;
    sub.M = ctx->M - vy;
    std::vector<W> xs(size_t(ctx->d)), ys(size_t(ctx->d));
    for (int i = 0; i < ctx->d; ++i) {
        xs[size_t(i)] = word_shr(x.coeffs()[size_t(i)], vy);
        ys[size_t(i)] = word_shr(y.coeffs()[size_t(i)], vy);
    }
    ZqT<W> xq(&sub, std::move(xs));
    ZqT<W> yq(&sub, std::move(ys));
    ZqT<W> z = xq * inv_unit(yq);
    std::vector<W> out = z.coeffs(); // values < 2^(M-vy): canonical zero-padded lift
    return ZqT<W>(ctx, std::move(out));
}

// ---- unit square root ---------------------------------------------------------

// r with r^2 = x mod 2^(M-1) and r = 1 mod 4 (one bit lost, representative in
// [0, 2^(M-1))). Requires x = 1 mod 8. Solves s + 2 s^2 = (x-1)/8 by the
// contraction s <- c - 2 s^2 in precision M-3, then r = 1 + 4s.
template <class W>
inline ZqT<W> unit_sqrt(const ZqT<W>& x) {
    const PrecisionContext* ctx = x.ctx();
    {
        bool ok = (word_low_u64(x.coeffs()[0]) & 7) == 1;
        for (int i = 1; ok && i < ctx->d; ++i)
            if (word_low_u64(x.coeffs()[size_t(i)]) & 7) ok = false;
        if (!ok) throw NotASquare("unit_sqrt requires x = 1 (mod 8)");
    }
    if (ctx->M <= 3) return ZqT<W>::one(ctx);
    PrecisionContext sub = *ctx;
    sub.M = ctx->M - 3;
    ZqT<W> xm1 = x - ZqT<W>::one(ctx);
    std::vector<W> cc(size_t(ctx->d));
    for (int i = 0; i < ctx->d; ++i) cc[size_t(i)] = word_shr(xm1.coeffs()[size_t(i)], 3);
    ZqT<W> c(&sub, std::move(cc));
    ZqT<W> s = c;
    ZqT<W> two = ZqT<W>::from_int(&sub, 2);
    for (int it = 0; it < sub.M + 2; ++it) {
        ZqT<W> s2 = c - two * (s * s);
        if (s2 == s) break;
        s = s2;
    }
    std::vector<W> r(size_t(ctx->d));
    for (int i = 0; i < ctx->d; ++i) {
        r[size_t(i)] = s.coeffs()[size_t(i)] * W(4);
        word_reduce(r[size_t(i)], ctx->M - 1);
    }
    r[0] += W(1);
    word_reduce(r[0], ctx->M - 1);
    return ZqT<W>(ctx, std::move(r));
}

// ---- unramified quadratic extension -------------------------------------------

template <class W>
struct ExtensionResult {
    std::shared_ptr<const PrecisionContext> ctx; // same d or degree 2d
    bool extended = false;
    ZqT<W> mu;                                      // root of X^2 - X - a2 in ctx
    std::function<ZqT<W>(const ZqT<W>&)> embed;     // coefficient embedding
};

namespace detail {

// Hensel-lift a root of X^2 - X - a2 from its mod-2 value (derivative 2X-1 is
// a unit, so the Newton step converges quadratically).
template <class W>
inline ZqT<W> lift_artin_schreier_root(const PrecisionContext* ctx, const ZqT<W>& a2, gf root2) {
    ZqT<W> x = lift_from_gf<W>(ctx, root2);
    ZqT<W> one = ZqT<W>::one(ctx), two = ZqT<W>::from_int(ctx, 2);
    for (int bits = 1; bits < ctx->M; bits *= 2) {
        ZqT<W> f = x * x - x - a2;
        ZqT<W> fp = two * x - one;
        x = x - f * inv_unit(fp);
    }
    return x;
}

} // namespace detail

// If X^2 - X - a2 has a root mod 2 (absolute trace of a2 mod 2 is 0), return
// the same context with the Hensel-lifted root; otherwise realize the
// unramified quadratic extension of degree 2d with the table modulus and the
// embedding that evaluates elements at a lifted root of the old modulus.
template <class W>
inline ExtensionResult<W> extend_context(std::shared_ptr<const PrecisionContext> ctx,
                                         const ZqT<W>& a2) {
    ExtensionResult<W> res;
    GFContext F = ctx->residue_field();
    gf a2bar = a2.reduce_mod2();
    gf w;
    if (gf_solve_artin_schreier(F, a2bar, w)) {
        res.ctx = ctx;
        res.extended = false;
        res.mu = detail::lift_artin_schreier_root(ctx.get(), a2, w);
        res.embed = [](const ZqT<W>& x) { return x; };
        return res;
    }
    // build degree-2d context
    auto ctx2 = make_context(2 * ctx->d, ctx->M);
    GFContext F2 = ctx2->residue_field();
    // find a root of the old modulus in F_{2^(2d)} by exhaustion (d <= 8)
    gf rho2 = 0;
    bool found = false;
    for (gf cand = 0; cand < (gf(1) << F2.d); ++cand) {
        gf acc = 0;
        for (int i = ctx->d; i >= 0; --i) acc = gf_mul(F2, acc, cand) ^ gf(ctx->modulus[size_t(i)] & 1);
        if (acc == 0) {
            rho2 = cand;
            found = true;
            break;
        }
    }
    if (!found) throw MathError("no root of modulus in the quadratic extension");
    // Hensel-lift rho: modulus'(rho) is a unit (separable mod 2)
    const PrecisionContext* c2 = ctx2.get();
    ZqT<W> rho = lift_from_gf<W>(c2, rho2);
    for (int bits = 1; bits < c2->M; bits *= 2) {
        ZqT<W> f = ZqT<W>::zero(c2), fp = ZqT<W>::zero(c2);
        ZqT<W> p = ZqT<W>::one(c2), pprev = ZqT<W>::zero(c2);
        for (int i = 0; i <= ctx->d; ++i) {
            if (ctx->modulus[size_t(i)]) {
                f = f + p;
                if (i >= 1) fp = fp + ZqT<W>::from_int(c2, i) * pprev;
            }
            pprev = p;
            p = p * rho;
        }
        rho = rho - f * inv_unit(fp);
    }
    // embedding: x = sum x_i v^i  ->  sum x_i rho^i
    std::vector<ZqT<W>> rho_pows;
    rho_pows.push_back(ZqT<W>::one(c2));
    for (int i = 1; i < ctx->d; ++i) rho_pows.push_back(rho_pows.back() * rho);
    auto ctx_keep = ctx2;
    auto embed = [c2, rho_pows, dd = ctx->d](const ZqT<W>& x) {
        ZqT<W> acc = ZqT<W>::zero(c2);
        for (int i = 0; i < dd; ++i) {
            std::vector<W> scal(size_t(c2->d), W(0));
            scal[0] = x.coeffs()[size_t(i)];
            acc = acc + ZqT<W>(c2, std::move(scal)) * rho_pows[size_t(i)];
        }
        return acc;
    };
    res.ctx = ctx2;
    res.extended = true;
    res.embed = embed;
    ZqT<W> a2e = embed(a2);
    gf a2bar2 = a2e.reduce_mod2();
    gf w2;
    if (!gf_solve_artin_schreier(F2, a2bar2, w2))
        throw MathError("Artin-Schreier equation still unsolvable after extension");
    res.mu = detail::lift_artin_schreier_root(c2, a2e, w2);
    return res;
}

} // namespace twoadic
