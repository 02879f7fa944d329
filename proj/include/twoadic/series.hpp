#pragma once

// Truncated power series over Z_{2^d}/2^M. Multiplication is subquadratic:
// both variables are packed into a single big integer (Kronecker
// substitution) and multiplied with GMP, so M(n) inherits GMP's quasi-linear
// bit complexity and is superadditive. A schoolbook path serves as the
// correctness oracle and the big-word backend.
//
// Truncation orders are explicit everywhere; no operation resizes silently.

#include <cstring>
#include <vector>

#include "twoadic/zq.hpp"

namespace twoadic {

template <class W>
class SeriesT {
  public:
    SeriesT() = default;
    SeriesT(const PrecisionContext* ctx, int n) : ctx_(ctx), n_(n), a_(size_t(n) * ctx->d, W(0)) {}
    SeriesT(const PrecisionContext* ctx, std::vector<ZqT<W>> coeffs, int n)
        : ctx_(ctx), n_(n), a_(size_t(n) * ctx->d, W(0)) {
        for (int i = 0; i < std::min<int>(n, int(coeffs.size())); ++i) set(i, coeffs[size_t(i)]);
    }
    static SeriesT from_ints(const PrecisionContext* ctx, const std::vector<long long>& v, int n) {
        SeriesT s(ctx, n);
        for (int i = 0; i < std::min<int>(n, int(v.size())); ++i)
            s.set(i, ZqT<W>::from_int(ctx, v[size_t(i)]));
        return s;
    }

    const PrecisionContext* ctx() const { return ctx_; }
    int length() const { return n_; }

    ZqT<W> get(int i) const {
        if (i < 0 || i >= n_) return ZqT<W>::zero(ctx_);
        std::vector<W> c(a_.begin() + size_t(i) * ctx_->d, a_.begin() + size_t(i + 1) * ctx_->d);
        return ZqT<W>(ctx_, std::move(c), typename ZqT<W>::nocheck{});
    }
    void set(int i, const ZqT<W>& x) {
        for (int j = 0; j < ctx_->d; ++j) a_[size_t(i) * ctx_->d + size_t(j)] = x.coeffs()[size_t(j)];
    }
    bool coeff_is_zero(int i) const {
        for (int j = 0; j < ctx_->d; ++j)
            if (!word_is_zero(a_[size_t(i) * ctx_->d + size_t(j)])) return false;
        return true;
    }
    int coeff_val2(int i) const {
        int v = ctx_->M;
        for (int j = 0; j < ctx_->d; ++j)
            v = std::min(v, word_val2(a_[size_t(i) * ctx_->d + size_t(j)], ctx_->M));
        return v;
    }

    SeriesT trunc(int n) const {
        SeriesT r(ctx_, n);
        int m = std::min(n, n_);
        std::copy(a_.begin(), a_.begin() + size_t(m) * ctx_->d, r.a_.begin());
        return r;
    }

    friend SeriesT operator+(const SeriesT& f, const SeriesT& g) {
        f.check(g);
        int n = std::max(f.n_, g.n_);
        SeriesT r = f.trunc(n);
        for (size_t i = 0; i < g.a_.size(); ++i) {
            r.a_[i] += g.a_[i];
            word_reduce(r.a_[i], f.ctx_->M);
        }
        return r;
    }
    friend SeriesT operator-(const SeriesT& f, const SeriesT& g) {
        f.check(g);
        int n = std::max(f.n_, g.n_);
        SeriesT r = f.trunc(n);
        const W top = W(1) << f.ctx_->M;
        for (size_t i = 0; i < g.a_.size(); ++i) {
            r.a_[i] += top - g.a_[i];
            word_reduce(r.a_[i], f.ctx_->M);
        }
        return r;
    }
    friend bool operator==(const SeriesT& f, const SeriesT& g) { return f.n_ == g.n_ && f.a_ == g.a_; }

    SeriesT scale(const ZqT<W>& s) const {
        SeriesT r(ctx_, n_);
        std::vector<W> tmp(size_t(ctx_->d));
        for (int i = 0; i < n_; ++i) {
            ZqT<W>::zq_mul_raw(*ctx_, &a_[size_t(i) * ctx_->d], s.coeffs().data(),
                               tmp.data());
            for (int j = 0; j < ctx_->d; ++j) r.a_[size_t(i) * ctx_->d + size_t(j)] = tmp[size_t(j)];
        }
        return r;
    }

    // coefficient i of f' is (i+1) f_{i+1}; length drops by one
    SeriesT derivative() const {
        SeriesT r(ctx_, std::max(0, n_ - 1));
        for (int i = 0; i + 1 < n_; ++i) {
            ZqT<W> c = get(i + 1);
            r.set(i, ZqT<W>::from_int(ctx_, i + 1) * c);
        }
        return r;
    }

    // product truncated to n_out
    SeriesT mul(const SeriesT& g, int n_out) const;

    const std::vector<W>& raw() const { return a_; }

  private:
    void check(const SeriesT& g) const {
        if (ctx_ != g.ctx_ && !(ctx_ && g.ctx_ && ctx_->same_as(*g.ctx_)))
            throw ContextMismatch("series from different precision contexts");
    }
    const PrecisionContext* ctx_ = nullptr;
    int n_ = 0;
    std::vector<W> a_;
};

using Series = SeriesT<uint64_t>;
using SeriesBig = SeriesT<mpz_class>;

// ---------------------------------------------------------------------------
// multiplication

namespace detail {

inline int ceil_log2(uint64_t x) {
    int b = 0;
    while ((uint64_t(1) << b) < x) ++b;
    return b;
}

inline void put_bits(std::vector<uint64_t>& buf, size_t bitpos, uint64_t val) {
    size_t w = bitpos >> 6;
    int o = int(bitpos & 63);
    buf[w] |= val << o;
    if (o) buf[w + 1] |= val >> (64 - o);
}

inline uint64_t get_bits(const std::vector<uint64_t>& buf, size_t bitpos, int nbits) {
    size_t w = bitpos >> 6;
    int o = int(bitpos & 63);
    uint64_t lo = w < buf.size() ? buf[w] : 0;
    uint64_t hi = (w + 1) < buf.size() ? buf[w + 1] : 0;
    uint64_t v = lo >> o;
    if (o) v |= hi << (64 - o);
    if (nbits < 64) v &= (uint64_t(1) << nbits) - 1;
    return v;
}

} // namespace detail

template <class W>
inline void schoolbook_mul(const PrecisionContext& ctx, const SeriesT<W>& f, const SeriesT<W>& g,
                           SeriesT<W>& out, int n_out) {
    int d = ctx.d;
    std::vector<W> acc(size_t(n_out) * size_t(2 * d - 1), W(0));
    int nf = f.length(), ng = g.length();
    for (int i = 0; i < std::min(nf, n_out); ++i) {
        if (f.coeff_is_zero(i)) continue;
        const W* fc = &f.raw()[size_t(i) * d];
        int jmax = std::min(ng, n_out - i);
        for (int j = 0; j < jmax; ++j) {
            const W* gc = &g.raw()[size_t(j) * d];
            W* o = &acc[size_t(i + j) * size_t(2 * d - 1)];
            for (int u = 0; u < d; ++u) {
                if (word_is_zero(fc[u])) continue;
                for (int v = 0; v < d; ++v) {
                    o[u + v] += fc[u] * gc[v];
                    word_reduce(o[u + v], ctx.M);
                }
            }
        }
    }
    for (int i = 0; i < n_out; ++i) {
        W* o = &acc[size_t(i) * size_t(2 * d - 1)];
        ZqT<W>::reduce_poly_raw(ctx, o, 2 * d - 1);
        std::vector<W> c(o, o + d);
        out.set(i, ZqT<W>(&ctx, std::move(c), typename ZqT<W>::nocheck{}));
    }
}

// Kronecker substitution: v -> 2^B, t -> 2^(B*(2d-1)); one GMP product, then
// slotwise extraction (only the low M bits of each slot are needed) and
// modulus reduction per t-coefficient.
inline void kronecker_mul(const PrecisionContext& ctx, const Series& f, const Series& g,
                          Series& out, int n_out) {
    int d = ctx.d;
    int nf = std::min(f.length(), n_out), ng = std::min(g.length(), n_out);
    int D = 2 * d - 1;
    int B = 2 * ctx.M + detail::ceil_log2(uint64_t(std::max(nf, ng)) * uint64_t(d)) + 1;
    auto pack = [&](const Series& s, int n) {
        size_t slots = size_t(n) * size_t(D);
        std::vector<uint64_t> buf((slots * size_t(B)) / 64 + 2, 0);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < d; ++j) {
                uint64_t v = s.raw()[size_t(i) * d + size_t(j)];
                if (v) detail::put_bits(buf, (size_t(i) * D + size_t(j)) * size_t(B), v);
            }
        return buf;
    };
    std::vector<uint64_t> bf = pack(f, nf), bg = pack(g, ng);
    mpz_class zf, zg;
    mpz_import(zf.get_mpz_t(), bf.size(), -1, 8, 0, 0, bf.data());
    mpz_import(zg.get_mpz_t(), bg.size(), -1, 8, 0, 0, bg.data());
    mpz_class zp = zf * zg;
    size_t words = (mpz_sizeinbase(zp.get_mpz_t(), 2) + 63) / 64 + 2;
    std::vector<uint64_t> bp(words, 0);
    size_t count = 0;
    mpz_export(bp.data(), &count, -1, 8, 0, 0, zp.get_mpz_t());
    std::vector<uint64_t> slot(size_t(2 * d - 1), 0);
    for (int i = 0; i < n_out; ++i) {
        for (int j = 0; j < D; ++j)
            slot[size_t(j)] = (i < nf + ng - 1)
                                  ? detail::get_bits(bp, (size_t(i) * D + size_t(j)) * size_t(B),
                                                     std::min(B, 64)) &
                                        ((ctx.M >= 64) ? ~uint64_t(0) : ((uint64_t(1) << ctx.M) - 1))
                                  : 0;
        Zq::reduce_poly_raw(ctx, slot.data(), 2 * d - 1);
        std::vector<uint64_t> c(slot.begin(), slot.begin() + d);
        out.set(i, Zq(&ctx, std::move(c), Zq::nocheck{}));
    }
}

template <class W>
inline SeriesT<W> SeriesT<W>::mul(const SeriesT<W>& g, int n_out) const {
    check(g);
    SeriesT<W> out(ctx_, n_out);
    if constexpr (std::is_same_v<W, uint64_t>) {
        if (size_t(std::min(n_, n_out)) * size_t(std::min(g.n_, n_out)) * size_t(ctx_->d) *
                size_t(ctx_->d) >
            4096)
            kronecker_mul(*ctx_, *this, g, out, n_out);
        else
            schoolbook_mul(*ctx_, *this, g, out, n_out);
    } else {
        schoolbook_mul(*ctx_, *this, g, out, n_out);
    }
    return out;
}

// ---------------------------------------------------------------------------
// kernels

// divide every coefficient by 2 under the fixed-point division semantics
template <class W>
inline SeriesT<W> div2_series(const SeriesT<W>& f) {
    const PrecisionContext* ctx = f.ctx();
    SeriesT<W> r(ctx, f.length());
    ZqT<W> two = ZqT<W>::from_int(ctx, 2);
    for (int i = 0; i < f.length(); ++i) r.set(i, div(f.get(i), two));
    return r;
}

// inverse of a unit series by the Newton iteration r <- r(2 - f r)
template <class W>
inline SeriesT<W> series_invert(const SeriesT<W>& f, int n_out) {
    const PrecisionContext* ctx = f.ctx();
    if (f.length() < 1 || f.get(0).val2() != 0)
        throw NotInvertible("series constant term is not a unit");
    SeriesT<W> r(ctx, 1);
    r.set(0, inv_unit(f.get(0)));
    int k = 1;
    ZqT<W> two = ZqT<W>::from_int(ctx, 2);
    while (k < n_out) {
        k = std::min(2 * k, n_out);
        SeriesT<W> w = f.trunc(k).mul(r, k);
        SeriesT<W> t(ctx, k);
        t.set(0, two - w.get(0));
        for (int i = 1; i < k; ++i) t.set(i, -w.get(i));
        r = r.mul(t, k);
    }
    return r;
}

// f^(-1/2) by the Newton iteration r <- r (3 - f r^2)/2, seeded by
// unit_sqrt(1/f(0)). Requires f(0) = 1 (mod 8). Result is accurate to
// O(2^(M-1)) (the seed's documented one-bit loss); the sign is the seed's
// (= 1 mod 4) convention.
template <class W>
inline SeriesT<W> sqrt_inverse(const SeriesT<W>& f, int n_out) {
    const PrecisionContext* ctx = f.ctx();
    ZqT<W> seed = unit_sqrt(inv_unit(f.get(0)));
    SeriesT<W> r(ctx, 1);
    r.set(0, seed);
    ZqT<W> three = ZqT<W>::from_int(ctx, 3);
    int k = 1;
    while (k < n_out) {
        k = std::min(2 * k, n_out);
        SeriesT<W> w = f.trunc(k).mul(r.mul(r, k), k);
        SeriesT<W> t(ctx, k);
        t.set(0, three - w.get(0));
        for (int i = 1; i < k; ++i) t.set(i, -w.get(i));
        r = div2_series(r.mul(t, k));
    }
    return r;
}

// Exact quotient of f by t(t-4a) where f is treated as a polynomial of degree
// < f.length(): strip t, then synthetic (top-down) division by the monic
// (t - 4a). Division-free; the constant-coefficient residual must vanish to
// 2^(M-2) (two bits of documented slack) or PrecisionError is raised.
// The result has length f.length() - 2.
template <class W>
inline SeriesT<W> divide_by_t_t_minus_4a(const SeriesT<W>& f, const ZqT<W>& four_a) {
    const PrecisionContext* ctx = f.ctx();
    if (f.length() < 2) throw PrecisionError("series too short to divide by t(t-4a)");
    if (!f.coeff_is_zero(0))
        throw PrecisionError("series not divisible by t");
    int n = f.length() - 1; // w = f/t has n coefficients
    SeriesT<W> q(ctx, n - 1);
    ZqT<W> carry = ZqT<W>::zero(ctx);
    for (int i = n - 1; i >= 1; --i) {
        ZqT<W> qi = f.get(i + 1) + carry;
        q.set(i - 1, qi);
        carry = qi * four_a;
    }
    ZqT<W> resid = f.get(1) + carry; // w_0 - (-4a) q_0 must be ~0
    if (resid.val2() < std::max(0, ctx->M - 2))
        throw PrecisionError("not divisible by (t - 4a) to working precision");
    return q;
}

// Horner evaluation of W(t, x) = sum W_i(t) x^i (degree <= 4 in x) at a series
// x, truncated to n_out; costs at most 5 series multiplications.
template <class W>
inline SeriesT<W> compose_quartic(const std::vector<SeriesT<W>>& Wc, const SeriesT<W>& x, int n_out) {
    SeriesT<W> acc = Wc.back().trunc(n_out);
    for (int i = int(Wc.size()) - 2; i >= 0; --i)
        acc = acc.mul(x, n_out) + Wc[size_t(i)].trunc(n_out);
    return acc;
}

} // namespace twoadic
