#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "support/ec_oracle.hpp"
#include "twoadic/io.hpp"
#include "twoadic/isogeny.hpp"

using namespace twoadic;

namespace {

LiftedPair toy_pair(int M = 9) {
    LiftedPair p;
    p.ctx = make_context(1, M);
    p.A2 = Zq::zero(p.ctx.get());
    p.A6 = Zq::one(p.ctx.get());
    p.At2 = Zq::zero(p.ctx.get());
    p.At6 = Zq::from_int(p.ctx.get(), 225);
    p.c = Zq::from_int(p.ctx.get(), 41);
    p.ell = 11;
    return p;
}

LiftedPair f16_pair() {
    LiftedPair p;
    p.ctx = make_context(4, 12);
    auto* c = p.ctx.get();
    p.A2 = Zq::zero(c);
    p.A6 = Zq(c, {256, 316, 261, 21});
    p.At2 = Zq::zero(c);
    p.At6 = Zq(c, {369, 243, 123, 1});
    Zq c0(c, {725 & 4095, 600, 164, 244});
    p.c = c0 * c0;
    p.ell = 73;
    return p;
}

} // namespace

TEST_CASE("build_UV") {
    SECTION("direct substitution, A2 = 0, A6 = 1") {
        LiftedPair p = toy_pair();
        auto [U, V] = build_UV(p);
        CHECK(U.raw()[1] == 4);
        CHECK(U.raw()[2] == 1);
        CHECK(U.raw()[3] == 0);
        CHECK(U.raw()[4] == 4);
        CHECK(V.raw()[4] == (4 * 225) % 512);
        CHECK(U.length() == 2 * 11 + 2);
    }
    SECTION("the F16 target side: V = 4(v^3+123v^2+243v+369) t^4 + t^2 + 4t") {
        LiftedPair p = f16_pair();
        auto [U, V] = build_UV(p);
        Zq four = Zq::from_int(p.ctx.get(), 4);
        CHECK(V.get(1) == four);
        CHECK(V.get(2) == Zq::one(p.ctx.get()));
        CHECK(V.get(4) == four * p.At6);
    }
    SECTION("U = V under c = 1 and equal lifts") {
        LiftedPair p = toy_pair();
        p.At6 = p.A6;
        p.c = Zq::one(p.ctx.get());
        auto [U, V] = build_UV(p);
        CHECK(U == V);
    }
}

TEST_CASE("hensel_4a") {
    auto ctx = make_context(1, 9);
    SECTION("toy root 252") {
        std::vector<Zq> P{Zq::from_int(ctx.get(), 4), Zq::one(ctx.get()), Zq::zero(ctx.get()),
                          Zq::from_int(ctx.get(), 4)};
        Zq r = hensel_4a(P);
        CHECK(r.coeffs()[0] == 252);
    }
    SECTION("A6 = 0 input fails (degenerate, not ordinary-shaped)") {
        LiftedPair p = toy_pair();
        p.A6 = Zq::zero(p.ctx.get());
        auto [U, V] = build_UV(p);
        CHECK_THROWS_AS(make_ode(U, V, 8), HenselFailure);
    }
    SECTION("residual vanishes for random ordinary lifts") {
        std::mt19937_64 rng(41);
        auto c14 = make_context(1, 14);
        for (int rep = 0; rep < 20; ++rep) {
            Zq A2 = Zq::from_int(c14.get(), (long long)(rng() & 0xff));
            Zq A6 = Zq::from_int(c14.get(), (long long)((rng() & 0xff) | 1));
            std::vector<Zq> P{Zq::from_int(c14.get(), 4),
                              Zq::from_int(c14.get(), 4) * A2 + Zq::one(c14.get()),
                              Zq::zero(c14.get()), Zq::from_int(c14.get(), 4) * A6};
            Zq r = hensel_4a(P); // residual checked inside; val2 must be 2
            CHECK(r.val2() == 2);
        }
    }
}

TEST_CASE("setup: toy u^2 and no extension for even A2") {
    LiftedPair p = toy_pair();
    auto [U, V] = build_UV(p);
    NonlinearODE ode = make_ode(U, V, 23, std::optional<Zq>(p.c));
    CHECK(ode.u2.raw()[0] == 65);
    CHECK(ode.u2.raw()[1] == 512 - 16);
    CHECK(ode.u2.raw()[2] == 4);
    // v^2 = c * V0 has constant term 105 = 41 * 65 mod 512
    CHECK(ode.v2.raw()[0] == 105);
}

TEST_CASE("normalize_pair: twist and quadratic extension") {
    SECTION("trace-0 odd A2 is twisted away (d = 4)") {
        auto ctx = make_context(4, 10);
        GFContext F = ctx->residue_field();
        gf tr0 = 0;
        for (gf x = 1; x < 16; ++x)
            if (gf_trace(F, x) == 0) {
                tr0 = x;
                break;
            }
        LiftedPair p;
        p.ctx = ctx;
        p.A2 = lift_from_gf<uint64_t>(ctx.get(), tr0);
        p.A6 = Zq::one(ctx.get());
        p.At2 = Zq::zero(ctx.get());
        p.At6 = Zq::one(ctx.get());
        p.c = Zq::one(ctx.get());
        p.ell = 3;
        LiftedPair q = normalize_pair(p);
        CHECK(q.ctx->d == 4);
        CHECK(q.A2.is_zero());
    }
    SECTION("trace-1 A2 doubles the context (d = 1, A2 = 1)") {
        LiftedPair p = toy_pair();
        p.A2 = Zq::one(p.ctx.get());
        LiftedPair q = normalize_pair(p);
        CHECK(q.ctx->d == 2);
        CHECK(q.A2.is_zero());
        CHECK(q.A6.reduce_mod2() == 1);
    }
}

TEST_CASE("reduce_and_sqrt") {
    LiftedPair p = toy_pair();
    GFContext F = p.ctx->residue_field();
    SECTION("toy: 1 + t + t^3 + t^7 + t^8 + t^9 + t^11") {
        Series z = solve_to_series(p);
        GFPoly S = reduce_and_sqrt(F, z);
        CHECK(std::vector<gf>(S.c.begin(), S.c.begin() + 12) ==
              std::vector<gf>{1, 1, 0, 1, 0, 0, 0, 1, 1, 1, 0, 1});
    }
    SECTION("z = t gives S = 1") {
        Series z(p.ctx.get(), 4);
        z.set(1, Zq::one(p.ctx.get()));
        GFPoly S = reduce_and_sqrt(F, z);
        CHECK(S.coeff(0) == 1);
        CHECK(S.deg() == 0);
    }
    SECTION("odd-degree survivor raises") {
        Series z(p.ctx.get(), 4);
        z.set(1, Zq::one(p.ctx.get()));
        z.set(3, Zq::one(p.ctx.get())); // z/t has odd-degree term t^2? no: t^2 even; use t^3 -> (z/t)_2 even; set z_4?
        // make (z/t) have an odd-degree term: z_3 gives (z/t)_2 (even); z_2 gives (z/t)_1 (odd)
        Series z2(p.ctx.get(), 4);
        z2.set(1, Zq::one(p.ctx.get()));
        z2.set(2, Zq::one(p.ctx.get()));
        CHECK_THROWS_AS(reduce_and_sqrt(F, z2), NotASquareChar2);
    }
    SECTION("random square round trip") {
        std::mt19937_64 rng(42);
        for (int rep = 0; rep < 50; ++rep) {
            // z/t = S(t)^2 mod 2 for random S
            int ns = 8;
            std::vector<gf> Sc((size_t(ns)));
            for (auto& x : Sc) x = rng() & 1;
            Sc[0] = 1;
            Series z(p.ctx.get(), 2 * ns);
            z.set(1, Zq::one(p.ctx.get()));
            for (int i = 1; i < ns; ++i)
                z.set(2 * i + 1, Zq::from_int(p.ctx.get(), (long long)Sc[size_t(i)]));
            GFPoly S = reduce_and_sqrt(F, z);
            for (int i = 0; i < ns; ++i) CHECK(S.coeff(i) == Sc[size_t(i)]);
        }
    }
}

TEST_CASE("reconstruct: the toy self-11-isogeny") {
    LiftedPair p = toy_pair();
    IsogenyResult res = compute_isogeny(p);
    GFContext F = p.ctx->residue_field();
    CHECK(res.psi.c == std::vector<gf>{1, 0, 1, 1, 1, 1});   // x^5+x^4+x^3+x^2+1
    CHECK(res.hpoly.c == std::vector<gf>{1, 1, 1, 1, 0, 1}); // x^5+x^3+x^2+x+1
    CHECK(res.num.deg() == 11);
    CHECK(res.den.deg() == 10);
    CHECK(gfp_gcd(res.num, res.den).deg() == 0);
    (void)F;
}

TEST_CASE("reconstruct: random expand-then-reconstruct") {
    // random coprime A/B of degree (3,3) over F2 expanded to t^9 recovers A/B
    std::mt19937_64 rng(43);
    GFContext F = make_gf(1);
    int done = 0;
    while (done < 30) {
        std::vector<gf> ac(4), bc(4);
        for (auto& x : ac) x = rng() & 1;
        for (auto& x : bc) x = rng() & 1;
        ac[0] = 1;
        bc[0] = 1;
        ac[3] = 1;
        bc[3] = 1;
        GFPoly A0(F, ac), B0(F, bc);
        if (gfp_gcd(A0, B0).deg() != 0) continue;
        int k = 3, n = 2 * k + 1;
        std::vector<gf> Sc(size_t(n), 0);
        for (int i = 0; i < n; ++i) {
            gf acc = A0.coeff(i);
            for (int j = 1; j <= i; ++j) acc ^= gf_mul(F, B0.coeff(j), Sc[size_t(i - j)]);
            Sc[size_t(i)] = acc;
        }
        GFPoly S(F, Sc);
        S.c.resize(size_t(n), 0);
        GFPoly A, B;
        half_gcd_pade(S, k, A, B);
        CHECK(A.c == A0.c);
        CHECK(B.c == B0.c);
        ++done;
    }
}

TEST_CASE("verify_isogeny") {
    LiftedPair p = toy_pair();
    IsogenyResult res = compute_isogeny(p);
    GFContext F = p.ctx->residue_field();
    OrdinaryCurve E{F, 0, 1};
    SECTION("toy passes 200 trials") {
        VerifyReport rep = verify_isogeny(res, E, E, 200);
        CHECK(rep.ok());
        CHECK(rep.passed == 200);
    }
    SECTION("identity map passes") {
        IsogenyResult idmap;
        idmap.ell = 1;
        idmap.num = gfp_x(F);
        idmap.den = gfp_const(F, 1);
        idmap.psi = gfp_const(F, 1);
        idmap.hpoly = gfp_const(F, 1);
        VerifyReport rep = verify_isogeny(idmap, E, E, 100);
        CHECK(rep.ok());
    }
    SECTION("corrupted numerator fails") {
        IsogenyResult bad = res;
        bad.num.c[2] ^= 1; // flip one coefficient
        VerifyReport rep = verify_isogeny(bad, E, E, 200);
        CHECK_FALSE(rep.ok());
    }
}

TEST_CASE("multiplication instances: [3] and [5] against the group law") {
    using namespace ec_oracle;
    GFContext F2 = make_gf(1);
    OrdinaryCurve E{F2, 0, 1};
    for (int m : {3, 5}) {
        LiftedPair pair = multiplication_instance(E, m);
        CHECK(pair.ell == m * m);
        IsogenyResult res = compute_isogeny(pair);
        CHECK(res.num.deg() == m * m);
        for (int k = 1; k <= 6; ++k) {
            PlainField K{make_gf(k)};
            Curve<PlainField> C{K, 0, 1};
            for (const auto& P : affine_points(C)) {
                auto Q = C.mul(m, P);
                gf nv = gfp_eval(GFPoly(K.F, res.num.c), P.x);
                gf dv = gfp_eval(GFPoly(K.F, res.den.c), P.x);
                if (Q.inf) {
                    CHECK(dv == 0);
                } else {
                    REQUIRE(dv != 0);
                    CHECK(gf_mul(K.F, nv, gf_inv(K.F, dv)) == Q.x);
                }
            }
        }
    }
}

TEST_CASE("multiplication instance: ell = 1 gives the identity map") {
    GFContext F2 = make_gf(1);
    OrdinaryCurve E{F2, 0, 1};
    LiftedPair pair = multiplication_instance(E, 1);
    IsogenyResult res = compute_isogeny(pair);
    CHECK(res.num.c == std::vector<gf>{0, 1});
    CHECK(res.psi.c == std::vector<gf>{1});
}

TEST_CASE("kernel roots generate order-11 x-orbits under the group law") {
    using namespace ec_oracle;
    LiftedPair p = toy_pair();
    IsogenyResult res = compute_isogeny(p);
    // psi is irreducible of degree 5 over F2: realize F_32 = F2[x]/(psi) so
    // the class of x is a kernel abscissa. The matching y-coordinate may need
    // the quadratic extension (the kernel satisfies sigma^5 P = -P for this
    // eigenvalue), so lift the point over a degree-2 tower on top.
    REQUIRE(irreducible_test(res.psi));
    uint64_t bits = 0;
    for (int i = 0; i <= res.psi.deg(); ++i) bits |= uint64_t(res.psi.coeff(i) & 1) << i;
    GFContext F32{5, bits};
    std::mt19937_64 rng(44);
    GFTower T{F32, gfp_random_irreducible(F32, 2, rng)};
    TowerAdapter K{T};
    Curve<TowerAdapter> C{K, T.zero(), T.one()};
    GFTower::elt x = T.from_base(0b00010); // the class of x in F32
    // solve Y^2 + xY = x^3 + 1: Y = x W with W^2 + W = x + x^{-2}
    GFTower::elt rhs = T.add(x, T.inv(T.sq(x)));
    GFTower::elt w;
    REQUIRE(T.solve_artin_schreier(rhs, w, rng));
    Point<TowerAdapter> P{x, T.mul(x, w), false};
    REQUIRE(C.on_curve(P));
    auto Q = C.mul(11, P);
    CHECK(Q.inf);
    for (int j = 1; j < 11; ++j) CHECK_FALSE(C.mul(j, P).inf);
}

TEST_CASE("F16 pipeline reproduces the degree-36 kernel polynomial") {
    LiftedPair p = f16_pair();
    IsogenyResult res = compute_isogeny(p);
    const std::vector<gf> expect{0xF, 0xE, 7,   0xB, 7,   0xB, 0xE, 7,   0, 2,   0xB, 0, 0,
                                 7,   9,   0xE, 7,   0xF, 6,   5,   0xD, 6, 1,   0xC, 7, 0,
                                 0xB, 2,   3,   2,   5,   0xA, 0xC, 7,   9, 0xD, 1};
    CHECK(res.psi.c == expect);
    CHECK(irreducible_test(res.psi));
}

TEST_CASE("verify_isogeny on the F16 and multiplication results") {
    SECTION("F16 degree-73 map verifies on 50 extension points") {
        LiftedPair p = f16_pair();
        IsogenyResult res = compute_isogeny(p);
        GFContext F = p.ctx->residue_field();
        OrdinaryCurve src{F, 0, p.A6.reduce_mod2()};
        OrdinaryCurve dst{F, 0, p.At6.reduce_mod2()};
        VerifyReport rep = verify_isogeny(res, src, dst, 50);
        CHECK(rep.ok());
    }
    SECTION("[3]-multiplication result verifies") {
        GFContext F2 = make_gf(1);
        OrdinaryCurve E{F2, 0, 1};
        IsogenyResult res = compute_isogeny(multiplication_instance(E, 3));
        VerifyReport rep = verify_isogeny(res, E, E, 100);
        CHECK(rep.ok());
    }
}
