#pragma once

// Arithmetic over F_{2^d} (d <= 16) and its polynomial ring, including the
// half-gcd Pade kernel and Rabin irreducibility testing.

#include <cassert>
#include <cstdint>
#include <random>
#include <vector>

#include "twoadic/errors.hpp"

namespace twoadic {

struct GFContext {
    int d = 1;
    uint64_t modulus = 0b10; // bitmask incl. top bit; e.g. x^4+x+1 = 0b10011

    bool operator==(const GFContext& o) const { return d == o.d && modulus == o.modulus; }
};

// Low-weight irreducible polynomials over F_2, one per degree. The d = 4
// entry is v^4+v+1, the representation used for F_16 throughout.
inline uint64_t gf2_modulus_bits(int d) {
    static const uint64_t table[] = {
        0,
        0b10,                // d=1: x
        0b111,               // x^2+x+1
        0b1011,              // x^3+x+1
        0b10011,             // x^4+x+1
        0b100101,            // x^5+x^2+1
        0b1000011,           // x^6+x+1
        0b10000011,          // x^7+x+1
        0b100011011,         // x^8+x^4+x^3+x+1
        0b1000010001,        // x^9+x^4+1
        0b10000001001,       // x^10+x^3+1
        0b100000000101,      // x^11+x^2+1
        0b1000001010011,     // x^12+x^6+x^4+x+1
        0b10000000011011,    // x^13+x^4+x^3+x+1
        0b100000000101011,   // x^14+x^5+x^3+x+1
        0b1000000000000011,  // x^15+x+1
        0b10001000000001011, // x^16+x^12+x^3+x+1
    };
    if (d < 1 || d > 16) throw SchemaError("no modulus table entry for degree " + std::to_string(d));
    return table[d];
}

inline GFContext make_gf(int d) { return GFContext{d, gf2_modulus_bits(d)}; }

using gf = uint64_t; // element of F_{2^d} as a d-bit mask

inline gf gf_mul(const GFContext& F, gf a, gf b) {
    gf r = 0;
    while (b) {
        if (b & 1) r ^= a;
        b >>= 1;
        a <<= 1;
        if ((a >> F.d) & 1) a ^= F.modulus;
    }
    return r;
}

inline gf gf_sq(const GFContext& F, gf a) { return gf_mul(F, a, a); }

inline gf gf_pow(const GFContext& F, gf a, uint64_t e) {
    gf r = 1;
    while (e) {
        if (e & 1) r = gf_mul(F, r, a);
        a = gf_mul(F, a, a);
        e >>= 1;
    }
    return r;
}

inline gf gf_inv(const GFContext& F, gf a) {
    if (a == 0) throw NotInvertible("division by zero in F_{2^d}");
    return gf_pow(F, a, (uint64_t(1) << F.d) - 2);
}

// Inverse Frobenius: sqrt(x) = x^(2^(d-1)); sqrt(x)^2 = x on the whole field.
inline gf gf_sqrt(const GFContext& F, gf a) { return gf_pow(F, a, uint64_t(1) << (F.d - 1)); }

// Absolute trace F_{2^d} -> F_2, returned as 0 or 1.
inline int gf_trace(const GFContext& F, gf a) {
    gf t = 0, x = a;
    for (int i = 0; i < F.d; ++i) {
        t ^= x;
        x = gf_mul(F, x, x);
    }
    return int(t & 1);
}

// Solves w^2 + w = a for odd d (half trace). Caller checks trace(a) = 0.
inline gf gf_half_trace(const GFContext& F, gf a) {
    gf h = 0, x = a;
    for (int i = 0; i <= (F.d - 1) / 2; ++i) {
        h ^= x;
        x = gf_sq(F, gf_sq(F, x));
    }
    return h;
}

// Solve w^2 + w = a over any d (trace(a) must be 0): for odd d use half trace,
// otherwise a linear solve by exhaustive basis reduction (d <= 16).
inline bool gf_solve_artin_schreier(const GFContext& F, gf a, gf& w_out) {
    if (gf_trace(F, a) != 0) return false;
    if (F.d % 2 == 1) {
        w_out = gf_half_trace(F, a);
        return true;
    }
    for (gf w = 0; w < (gf(1) << F.d); ++w) {
        if ((gf_sq(F, w) ^ w) == a) {
            w_out = w;
            return true;
        }
    }
    return false;
}

// ---------------------------------------------------------------------------
// Polynomials over F_{2^d}, little-endian coefficient vectors.

struct GFPoly {
    GFContext F;
    std::vector<gf> c;

    GFPoly() = default;
    GFPoly(GFContext f, std::vector<gf> cc) : F(f), c(std::move(cc)) { normalize(); }

    void normalize() {
        while (!c.empty() && c.back() == 0) c.pop_back();
    }
    // trailing zero padding is tolerated (series-like use); deg scans
    int deg() const {
        for (int i = int(c.size()) - 1; i >= 0; --i)
            if (c[size_t(i)]) return i;
        return -1;
    }
    bool is_zero() const { return deg() < 0; }
    gf lead() const {
        int d_ = deg();
        return d_ < 0 ? 0 : c[size_t(d_)];
    }
    gf coeff(int i) const { return (i >= 0 && i < (int)c.size()) ? c[i] : 0; }
};

inline GFPoly gfp_zero(const GFContext& F) { return GFPoly(F, {}); }
inline GFPoly gfp_const(const GFContext& F, gf a) { return GFPoly(F, {a}); }
inline GFPoly gfp_x(const GFContext& F) { return GFPoly(F, {0, 1}); }

inline GFPoly gfp_add(const GFPoly& a, const GFPoly& b) {
    std::vector<gf> r(std::max(a.c.size(), b.c.size()), 0);
    for (size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(int(i)) ^ b.coeff(int(i));
    return GFPoly(a.F, std::move(r));
}

// Bit-packed carryless multiplication for d = 1 (the performance-critical
// path: reconstruction over F_2 dominates at large degrees).
inline std::vector<gf> gfp_mul_bits(const std::vector<gf>& a, const std::vector<gf>& b) {
    size_t na = a.size(), nb = b.size();
    size_t wa = (na + 63) / 64, wb = (nb + 63) / 64;
    std::vector<uint64_t> pa(wa, 0), pb(wb, 0), pr(wa + wb, 0);
    for (size_t i = 0; i < na; ++i)
        if (a[i] & 1) pa[i >> 6] |= uint64_t(1) << (i & 63);
    for (size_t i = 0; i < nb; ++i)
        if (b[i] & 1) pb[i >> 6] |= uint64_t(1) << (i & 63);
    for (size_t i = 0; i < wa; ++i) {
        uint64_t x = pa[i];
        while (x) {
            int bit = __builtin_ctzll(x);
            x &= x - 1;
            // shift pb left by (i*64 + bit) and xor into pr
            size_t off = i * 64 + size_t(bit);
            size_t w = off >> 6;
            int s = int(off & 63);
            for (size_t j = 0; j < wb; ++j) {
                pr[w + j] ^= pb[j] << s;
                if (s) pr[w + j + 1] ^= pb[j] >> (64 - s);
            }
        }
    }
    std::vector<gf> out(na + nb - 1, 0);
    for (size_t i = 0; i < out.size(); ++i) out[i] = (pr[i >> 6] >> (i & 63)) & 1;
    return out;
}

inline GFPoly gfp_mul(const GFPoly& a, const GFPoly& b) {
    if (a.is_zero() || b.is_zero()) return gfp_zero(a.F);
    if (a.F.d == 1 && (a.c.size() + b.c.size()) > 64)
        return GFPoly(a.F, gfp_mul_bits(a.c, b.c));
    std::vector<gf> r(a.c.size() + b.c.size() - 1, 0);
    for (size_t i = 0; i < a.c.size(); ++i) {
        if (!a.c[i]) continue;
        for (size_t j = 0; j < b.c.size(); ++j)
            if (b.c[j]) r[i + j] ^= gf_mul(a.F, a.c[i], b.c[j]);
    }
    return GFPoly(a.F, std::move(r));
}

inline GFPoly gfp_scale(const GFPoly& a, gf s) {
    std::vector<gf> r(a.c.size());
    for (size_t i = 0; i < a.c.size(); ++i) r[i] = gf_mul(a.F, a.c[i], s);
    return GFPoly(a.F, std::move(r));
}

inline void gfp_divmod(const GFPoly& a, const GFPoly& b, GFPoly& q, GFPoly& r) {
    if (b.is_zero()) throw NotInvertible("polynomial division by zero");
    std::vector<gf> rem = a.c;
    int db = b.deg();
    gf ilb = gf_inv(a.F, b.lead());
    std::vector<gf> qq(a.deg() >= db ? a.deg() - db + 1 : 0, 0);
    for (int i = int(rem.size()) - 1; i >= db; --i) {
        if (!rem[i]) continue;
        gf f = gf_mul(a.F, rem[i], ilb);
        qq[i - db] = f;
        for (int j = 0; j <= db; ++j)
            rem[i - db + j] ^= gf_mul(a.F, b.c[j], f);
    }
    q = GFPoly(a.F, std::move(qq));
    r = GFPoly(a.F, std::move(rem));
}

inline GFPoly gfp_mod(const GFPoly& a, const GFPoly& b) {
    GFPoly q, r;
    gfp_divmod(a, b, q, r);
    return r;
}

inline GFPoly gfp_gcd(GFPoly a, GFPoly b) {
    while (!b.is_zero()) {
        GFPoly r = gfp_mod(a, b);
        a = b;
        b = r;
    }
    if (!a.is_zero()) a = gfp_scale(a, gf_inv(a.F, a.lead())); // monic
    return a;
}

inline gf gfp_eval(const GFPoly& p, gf x) {
    gf acc = 0;
    for (int i = p.deg(); i >= 0; --i) acc = gf_mul(p.F, acc, x) ^ p.c[i];
    return acc;
}

// p(x) reversed at nominal degree k: returns x^k p(1/x).
inline GFPoly gfp_reverse(const GFPoly& p, int k) {
    std::vector<gf> r(k + 1, 0);
    for (int i = 0; i <= p.deg(); ++i) {
        if (p.c[i]) {
            if (i > k) throw ReconstructionFailure("reversal degree bound violated");
            r[k - i] = p.c[i];
        }
    }
    return GFPoly(p.F, std::move(r));
}

// ---------------------------------------------------------------------------
// Rabin irreducibility test over F_{2^d}.

inline GFPoly gfp_sq_mod(const GFPoly& a, const GFPoly& f) { return gfp_mod(gfp_mul(a, a), f); }

// x^(q^e) mod f, q = 2^d: e*d repeated squarings.
inline GFPoly gfp_frob_pow(const GFContext& F, const GFPoly& f, uint64_t e) {
    GFPoly x = gfp_mod(gfp_x(F), f);
    GFPoly acc = x;
    uint64_t steps = e * uint64_t(F.d);
    for (uint64_t i = 0; i < steps; ++i) acc = gfp_sq_mod(acc, f);
    return acc;
}

inline bool irreducible_test(const GFPoly& f) {
    int n = f.deg();
    if (n < 1) return false;
    if (n == 1) return true;
    const GFContext& F = f.F;
    GFPoly fm = gfp_scale(f, gf_inv(F, f.lead()));
    GFPoly x = gfp_mod(gfp_x(F), fm);
    // x^(q^n) == x mod f
    GFPoly top = gfp_frob_pow(F, fm, uint64_t(n));
    if (!(gfp_add(top, x).is_zero())) return false;
    // for each prime p | n: gcd(x^(q^(n/p)) - x, f) = 1
    int m = n;
    for (int p = 2; p * p <= m; ++p) {
        if (m % p) continue;
        while (m % p == 0) m /= p;
        GFPoly t = gfp_frob_pow(F, fm, uint64_t(n / p));
        if (gfp_gcd(gfp_add(t, x), fm).deg() != 0) return false;
    }
    if (m > 1) {
        GFPoly t = gfp_frob_pow(F, fm, uint64_t(n / m));
        if (gfp_gcd(gfp_add(t, x), fm).deg() != 0) return false;
    }
    return true;
}

// Random monic irreducible of degree k over F_{2^d} (for tower fields).
inline GFPoly gfp_random_irreducible(const GFContext& F, int k, std::mt19937_64& rng) {
    for (int tries = 0; tries < 4096; ++tries) {
        std::vector<gf> c(k + 1, 0);
        c[k] = 1;
        for (int i = 0; i < k; ++i) c[i] = rng() & ((gf(1) << F.d) - 1);
        GFPoly f(F, std::move(c));
        if (f.deg() == k && irreducible_test(f)) return f;
    }
    throw MathError("failed to sample an irreducible polynomial");
}

// ---------------------------------------------------------------------------
// Half-gcd and Pade approximation.
//
// pade(S, k): coprime (A, B), deg <= k, B*S = A mod t^(2k+1), B(0) != 0,
// B monic. A quadratic extended-Euclid reference and a subquadratic
// half-gcd path produce identical normalized output.

struct GFMat2 { // 2x2 polynomial matrix
    GFPoly m00, m01, m10, m11;
};

inline GFMat2 gfm_identity(const GFContext& F) {
    return {gfp_const(F, 1), gfp_zero(F), gfp_zero(F), gfp_const(F, 1)};
}

inline GFMat2 gfm_mul(const GFMat2& a, const GFMat2& b) {
    return {gfp_add(gfp_mul(a.m00, b.m00), gfp_mul(a.m01, b.m10)),
            gfp_add(gfp_mul(a.m00, b.m01), gfp_mul(a.m01, b.m11)),
            gfp_add(gfp_mul(a.m10, b.m00), gfp_mul(a.m11, b.m10)),
            gfp_add(gfp_mul(a.m10, b.m01), gfp_mul(a.m11, b.m11))};
}

inline void gfm_apply(const GFMat2& m, const GFPoly& a, const GFPoly& b, GFPoly& oa, GFPoly& ob) {
    oa = gfp_add(gfp_mul(m.m00, a), gfp_mul(m.m01, b));
    ob = gfp_add(gfp_mul(m.m10, a), gfp_mul(m.m11, b));
}

inline GFPoly gfp_shift_down(const GFPoly& p, int k) { // p div x^k
    if (p.deg() < k) return gfp_zero(p.F);
    return GFPoly(p.F, std::vector<gf>(p.c.begin() + k, p.c.end()));
}

// Half-gcd: for deg a > deg b, returns a product of Euclidean step matrices M
// with (a', b') = M (a, b)^T, deg a' >= ceil(deg a / 2) > deg b'.
inline GFMat2 gfp_hgcd(const GFPoly& a, const GFPoly& b) {
    const GFContext& F = a.F;
    int m = (a.deg() + 1) / 2;
    if (b.deg() < m) return gfm_identity(F);
    if (a.deg() < 32) { // base case: plain steps
        GFMat2 M = gfm_identity(F);
        GFPoly r0 = a, r1 = b;
        while (r1.deg() >= m) {
            GFPoly q, r;
            gfp_divmod(r0, r1, q, r);
            GFMat2 step{gfp_zero(F), gfp_const(F, 1), gfp_const(F, 1), q}; // char 2: -q = q
            M = gfm_mul(step, M);
            r0 = r1;
            r1 = r;
        }
        return M;
    }
    GFMat2 R = gfp_hgcd(gfp_shift_down(a, m), gfp_shift_down(b, m));
    GFPoly t, s;
    gfm_apply(R, a, b, t, s);
    if (s.deg() < m) return R;
    GFPoly q, r;
    gfp_divmod(t, s, q, r);
    GFMat2 step{gfp_zero(F), gfp_const(F, 1), gfp_const(F, 1), q};
    GFMat2 M = gfm_mul(step, R);
    if (r.deg() < m) return M;
    int l = 2 * m - s.deg();
    if (l < 0) l = 0;
    GFMat2 R2 = gfp_hgcd(gfp_shift_down(s, l), gfp_shift_down(r, l));
    return gfm_mul(R2, M);
}

namespace detail {

inline void pade_verify(const GFPoly& S, int k, GFPoly& A, GFPoly& B) {
    const GFContext& F = S.F;
    if (B.is_zero() || B.coeff(0) == 0) throw NoApproximant("Pade: B(0) = 0");
    if (A.deg() > k || B.deg() > k) throw NoApproximant("Pade: degree bound violated");
    GFPoly prod = gfp_mul(B, S);
    for (int i = 0; i <= 2 * k; ++i)
        if (prod.coeff(i) != A.coeff(i)) throw NoApproximant("Pade: residual check failed");
    GFPoly g = gfp_gcd(A, B);
    if (g.deg() > 0) { // reduce to lowest terms
        GFPoly q, r;
        gfp_divmod(A, g, q, r);
        A = q;
        gfp_divmod(B, g, q, r);
        B = q;
    }
    gf s = gf_inv(F, B.lead()); // B monic (deterministic normalization)
    A = gfp_scale(A, s);
    B = gfp_scale(B, s);
}

} // namespace detail

// Quadratic reference implementation (extended Euclid with cofactors).
inline void pade_quadratic(const GFPoly& S_in, int k, GFPoly& A, GFPoly& B) {
    const GFContext& F = S_in.F;
    int n = 2 * k + 1;
    std::vector<gf> xn(n + 1, 0);
    xn[n] = 1;
    GFPoly r0(F, std::move(xn));
    GFPoly r1 = S_in;
    if (r1.deg() >= n) r1 = GFPoly(F, std::vector<gf>(S_in.c.begin(), S_in.c.begin() + n));
    GFPoly b0 = gfp_zero(F), b1 = gfp_const(F, 1);
    while (r1.deg() > k) {
        GFPoly q, r;
        gfp_divmod(r0, r1, q, r);
        GFPoly b2 = gfp_add(b0, gfp_mul(q, b1));
        r0 = r1;
        r1 = r;
        b0 = b1;
        b1 = b2;
    }
    A = r1;
    B = b1;
    detail::pade_verify(S_in, k, A, B);
}

// Half-gcd accelerated Pade approximant.
inline void half_gcd_pade(const GFPoly& S_in, int k, GFPoly& A, GFPoly& B) {
    const GFContext& F = S_in.F;
    int n = 2 * k + 1;
    std::vector<gf> xn(n + 1, 0);
    xn[n] = 1;
    GFPoly r0(F, std::move(xn));
    GFPoly r1 = S_in;
    if (r1.deg() >= n) r1 = GFPoly(F, std::vector<gf>(S_in.c.begin(), S_in.c.begin() + n));
    GFPoly b0 = gfp_zero(F), b1 = gfp_const(F, 1);
    while (r1.deg() > k) {
        // A half-gcd jump keeps deg r0' >= ceil(deg r0/2); it can only cross
        // the target boundary when ceil(deg r0/2) <= k, so guard on that.
        if ((r0.deg() + 1) / 2 > k && r1.deg() >= (r0.deg() + 1) / 2 && r0.deg() >= 64) {
            GFMat2 M = gfp_hgcd(r0, r1);
            GFPoly nr0, nr1, nb0, nb1;
            gfm_apply(M, r0, r1, nr0, nr1);
            gfm_apply(M, b0, b1, nb0, nb1);
            if (nr1.deg() < r1.deg()) {
                r0 = nr0;
                r1 = nr1;
                b0 = nb0;
                b1 = nb1;
                continue;
            }
        }
        GFPoly q, r;
        gfp_divmod(r0, r1, q, r);
        GFPoly b2 = gfp_add(b0, gfp_mul(q, b1));
        r0 = r1;
        r1 = r;
        b0 = b1;
        b1 = b2;
    }
    A = r1;
    B = b1;
    detail::pade_verify(S_in, k, A, B);
}

// ---------------------------------------------------------------------------
// Tower field F_{2^(d*k)} = F_{2^d}[y]/(g), used by the isogeny verifier to
// sample points over extensions without computing embeddings.

struct GFTower {
    GFContext base;
    GFPoly g; // monic irreducible of degree k over base

    int k() const { return g.deg(); }

    using elt = std::vector<gf>; // length k, coefficients in base

    elt zero() const { return elt(size_t(k()), 0); }
    elt one() const {
        elt e(size_t(k()), 0);
        e[0] = 1;
        return e;
    }
    elt from_base(gf a) const {
        elt e(size_t(k()), 0);
        e[0] = a;
        return e;
    }
    bool is_zero(const elt& a) const {
        for (gf x : a)
            if (x) return false;
        return true;
    }
    elt add(const elt& a, const elt& b) const {
        elt r(a);
        for (size_t i = 0; i < r.size(); ++i) r[i] ^= b[i];
        return r;
    }
    elt mul(const elt& a, const elt& b) const {
        std::vector<gf> prod(2 * size_t(k()) - 1, 0);
        for (size_t i = 0; i < a.size(); ++i) {
            if (!a[i]) continue;
            for (size_t j = 0; j < b.size(); ++j)
                if (b[j]) prod[i + j] ^= gf_mul(base, a[i], b[j]);
        }
        // reduce mod g
        for (int i = int(prod.size()) - 1; i >= k(); --i) {
            if (!prod[i]) continue;
            gf f = gf_mul(base, prod[i], gf_inv(base, g.lead()));
            for (int j = 0; j <= g.deg(); ++j) prod[i - k() + j] ^= gf_mul(base, g.c[j], f);
        }
        prod.resize(size_t(k()));
        return prod;
    }
    elt sq(const elt& a) const { return mul(a, a); }
    elt pow(elt a, uint64_t e) const {
        elt r = one();
        while (e) {
            if (e & 1) r = mul(r, a);
            a = mul(a, a);
            e >>= 1;
        }
        return r;
    }
    elt inv(const elt& a) const {
        if (is_zero(a)) throw NotInvertible("tower division by zero");
        uint64_t order = 1;
        for (int i = 0; i < base.d * k(); ++i) order <<= 1;
        return pow(a, order - 2);
    }
    // Absolute trace down to F_2.
    int abs_trace(const elt& a) const {
        elt t = zero(), x = a;
        int n = base.d * k();
        for (int i = 0; i < n; ++i) {
            t = add(t, x);
            x = sq(x);
        }
        // t lies in F_2
        return int(t[0] & 1);
    }
    // Solve w^2 + w = a (abs_trace(a) must be 0); works for odd n by half
    // trace, otherwise by a random Hilbert-90 style search.
    bool solve_artin_schreier(const elt& a, elt& w, std::mt19937_64& rng) const {
        if (abs_trace(a) != 0) return false;
        int n = base.d * k();
        if (n % 2 == 1) {
            elt h = zero(), x = a;
            for (int i = 0; i <= (n - 1) / 2; ++i) {
                h = add(h, x);
                x = sq(sq(x));
            }
            w = h;
            return true;
        }
        // even n: find theta with abs_trace(theta) = 1, then
        // w = sum_{i<n-1} (sum_{j<=i} theta^(2^j)) * a^(2^(i+1)) variant;
        // use the standard series: w = sum_{i=0}^{n-2} a^{2^{i+1}} * s_i with
        // s_i = sum_{j=0}^{i} theta^{2^j}.
        elt theta;
        do {
            theta = zero();
            for (auto& coef : theta) coef = rng() & ((gf(1) << base.d) - 1);
        } while (abs_trace(theta) != 1);
        elt w_acc = zero();
        elt s = theta;        // s_0 = theta
        elt apow = sq(a);     // a^(2^1)
        for (int i = 0; i <= n - 2; ++i) {
            w_acc = add(w_acc, mul(apow, s));
            s = add(s, pow(theta, uint64_t(1) << (i + 1)));
            apow = sq(apow);
        }
        if (add(sq(w_acc), w_acc) == a) {
            w = w_acc;
            return true;
        }
        // fallback: brute force only feasible for tiny fields
        if (n <= 16) {
            uint64_t lim = uint64_t(1) << n;
            for (uint64_t bits = 0; bits < lim; ++bits) {
                elt cand = zero();
                for (int i = 0; i < k(); ++i)
                    cand[i] = (bits >> (i * base.d)) & ((gf(1) << base.d) - 1);
                if (add(sq(cand), cand) == a) {
                    w = cand;
                    return true;
                }
            }
        }
        return false;
    }
};

} // namespace twoadic
