#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "twoadic/zq.hpp"

using namespace twoadic;

TEST_CASE("ring operations, d = 1") {
    auto ctx = make_context(1, 9);
    Zq a = Zq::from_int(ctx.get(), 41);
    CHECK((a * a).coeffs()[0] == 145); // 1681 mod 512
    Zq x = Zq::from_int(ctx.get(), 123);
    CHECK((x + Zq::zero(ctx.get())) == x);
    CHECK((x * Zq::one(ctx.get())) == x);
    CHECK((x - x).is_zero());
}

TEST_CASE("ring operations, d = 4 (F16 lift)") {
    auto ctx = make_context(4, 10);
    // v * v^3 = v^4 = v + 1 + (a multiple-of-2 correction fixed by the lift);
    // with the 0/1 lift of v^4 + v + 1 the product is exactly -1 - v mod 2^10.
    Zq v(ctx.get(), {0, 1, 0, 0});
    Zq v3(ctx.get(), {0, 0, 0, 1});
    Zq p = v * v3;
    Zq expect = -(Zq::one(ctx.get()) + v);
    CHECK(p == expect);
    CHECK(p.reduce_mod2() == 0b11); // v + 1 over F16
}

TEST_CASE("ring axioms on random triples") {
    std::mt19937_64 rng(1);
    for (int d : {1, 4}) {
        auto ctx = make_context(d, 12);
        for (int it = 0; it < 64; ++it) {
            auto rnd = [&] {
                std::vector<uint64_t> c((size_t(d)));
                for (auto& x : c) x = rng();
                return Zq(ctx.get(), std::move(c));
            };
            Zq a = rnd(), b = rnd(), c = rnd();
            CHECK((a + b) == (b + a));
            CHECK((a * b) == (b * a));
            CHECK(((a + b) + c) == (a + (b + c)));
            CHECK(((a * b) * c) == (a * (b * c)));
            CHECK((a * (b + c)) == (a * b + a * c));
        }
    }
}

TEST_CASE("val2") {
    auto ctx = make_context(1, 9);
    CHECK(Zq::zero(ctx.get()).val2() == 9);
    CHECK(Zq::from_int(ctx.get(), 12).val2() == 2);
    auto ctx4 = make_context(4, 9);
    Zq x(ctx4.get(), {2, 1, 0, 0}); // v + 2: unit coefficient present
    CHECK(x.val2() == 0);
}

TEST_CASE("division semantics") {
    auto ctx9 = make_context(1, 9);
    CHECK(div(Zq::zero(ctx9.get()), Zq::from_int(ctx9.get(), 2)).is_zero());
    auto ctx4 = make_context(1, 4);
    CHECK(div(Zq::from_int(ctx4.get(), 6), Zq::from_int(ctx4.get(), 3)).coeffs()[0] == 2);
    CHECK_THROWS_AS(div(Zq::one(ctx9.get()), Zq::from_int(ctx9.get(), 2)), PrecisionError);
}

TEST_CASE("division exactness: y * div(x, y) = x") {
    std::mt19937_64 rng(2);
    for (int d : {1, 4}) {
        auto ctx = make_context(d, 14);
        for (int it = 0; it < 200; ++it) {
            std::vector<uint64_t> yc(size_t(d), 0);
            for (auto& w : yc) w = rng();
            Zq y(ctx.get(), std::move(yc));
            if (y.is_zero()) continue;
            std::vector<uint64_t> zc(size_t(d), 0);
            for (auto& w : zc) w = rng();
            Zq z(ctx.get(), std::move(zc));
            Zq x = y * z; // val2(x) >= val2(y) by construction
            Zq q = div(x, y);
            CHECK((y * q) == x);
        }
    }
}

TEST_CASE("val2 multiplicativity") {
    std::mt19937_64 rng(3);
    auto ctx1 = make_context(1, 16);
    for (int it = 0; it < 100; ++it) {
        Zq x = Zq::from_int(ctx1.get(), (long long)(rng() & 0xffff));
        Zq y = Zq::from_int(ctx1.get(), (long long)(rng() & 0xffff));
        int vx = x.val2(), vy = y.val2();
        CHECK((x * y).val2() == std::min(vx + vy, 16));
    }
    // d > 1: only >= in general; equality on unit-times-power-of-2 pairs
    auto ctx4 = make_context(4, 16);
    int eq_checked = 0;
    for (int it = 0; it < 400 && eq_checked < 200; ++it) {
        std::vector<uint64_t> uc(4), vc(4);
        for (auto& w : uc) w = rng() | 1; // odd somewhere: unit
        for (auto& w : vc) w = rng();
        Zq u(ctx4.get(), std::move(uc));
        int k = int(rng() % 10);
        Zq p = Zq::from_int(ctx4.get(), 1LL << k);
        Zq prod = u * p;
        REQUIRE(prod.val2() == std::min(u.val2() + k, 16));
        ++eq_checked;
        Zq w(ctx4.get(), std::move(vc));
        CHECK((u * w).val2() >= std::min(u.val2() + w.val2(), 16));
    }
    CHECK(eq_checked == 200);
}

TEST_CASE("unit_sqrt") {
    auto ctx = make_context(1, 6);
    CHECK(unit_sqrt(Zq::one(ctx.get())).coeffs()[0] == 1);
    Zq r = unit_sqrt(Zq::from_int(ctx.get(), 9));
    CHECK(r.coeffs()[0] == 29); // 29^2 = 841 = 9 mod 32, 29 = 1 mod 4
    CHECK_THROWS_AS(unit_sqrt(Zq::from_int(ctx.get(), 5)), NotASquare);
}

TEST_CASE("unit_sqrt postcondition on random squares") {
    std::mt19937_64 rng(4);
    for (int d : {1, 4}) {
        auto ctx = make_context(d, 13);
        for (int it = 0; it < 100; ++it) {
            std::vector<uint64_t> gc((size_t(d)));
            for (auto& w : gc) w = rng();
            gc[0] |= 1; // unit
            Zq g(ctx.get(), std::move(gc));
            Zq x = g * g;
            // x = g^2 is a unit square; force the 1-mod-8 shape by squaring
            // the normalized g' = g / (odd part sign): g^2 mod 8 in {1}?
            // any odd g: g = 1,3,5,7 mod 8 -> g^2 = 1 mod 8 over Z_2 when d=1;
            // for d > 1 require the constant-coefficient-odd case
            if ((x.coeffs()[0] & 7) != 1) continue;
            bool higher_ok = true;
            for (int i = 1; i < d; ++i)
                if (x.coeffs()[size_t(i)] & 7) higher_ok = false;
            if (!higher_ok) continue;
            Zq r = unit_sqrt(x);
            CHECK((r.coeffs()[0] & 3) == 1);
            Zq diff = r * r - x;
            CHECK(diff.val2() >= ctx->M - 1);
        }
    }
}

TEST_CASE("extend_context") {
    SECTION("d = 1, a2 = 0: X^2 - X factors, root 0") {
        auto ctx = make_context(1, 9);
        auto ext = extend_context<uint64_t>(ctx, Zq::zero(ctx.get()));
        CHECK_FALSE(ext.extended);
        CHECK(ext.ctx->d == 1);
        CHECK((ext.mu * ext.mu - ext.mu).is_zero());
    }
    SECTION("d = 1, a2 = 1: trace 1, degree doubles") {
        auto ctx = make_context(1, 9);
        auto ext = extend_context<uint64_t>(ctx, Zq::one(ctx.get()));
        CHECK(ext.extended);
        CHECK(ext.ctx->d == 2);
        Zq a2e = ext.embed(Zq::one(ctx.get()));
        Zq resid = ext.mu * ext.mu - ext.mu - a2e;
        CHECK(resid.is_zero());
        // the embedding is a ring homomorphism on a sample
        Zq x = Zq::from_int(ctx.get(), 37), y = Zq::from_int(ctx.get(), 101);
        CHECK(ext.embed(x * y) == ext.embed(x) * ext.embed(y));
        CHECK(ext.embed(x + y) == ext.embed(x) + ext.embed(y));
    }
    SECTION("d = 4, trace-0 element: same context, Hensel-lifted root") {
        auto ctx = make_context(4, 10);
        GFContext F = ctx->residue_field();
        // find a trace-0 element of F16 (exhaustion over 16 elements)
        gf a2m = 0;
        for (gf x = 1; x < 16; ++x)
            if (gf_trace(F, x) == 0) {
                a2m = x;
                break;
            }
        REQUIRE(a2m != 0);
        Zq a2 = lift_from_gf<uint64_t>(ctx.get(), a2m);
        auto ext = extend_context<uint64_t>(ctx, a2);
        CHECK_FALSE(ext.extended);
        CHECK((ext.mu * ext.mu - ext.mu - a2).is_zero());
    }
    SECTION("d = 4, trace-1 element: degree doubles and the root satisfies the equation") {
        auto ctx = make_context(4, 8);
        GFContext F = ctx->residue_field();
        gf a2m = 0;
        for (gf x = 1; x < 16; ++x)
            if (gf_trace(F, x) == 1) {
                a2m = x;
                break;
            }
        REQUIRE(a2m != 0);
        Zq a2 = lift_from_gf<uint64_t>(ctx.get(), a2m);
        auto ext = extend_context<uint64_t>(ctx, a2);
        CHECK(ext.extended);
        CHECK(ext.ctx->d == 8);
        CHECK((ext.mu * ext.mu - ext.mu - ext.embed(a2)).is_zero());
    }
}

TEST_CASE("lift and reduce round trip") {
    auto ctx = make_context(1, 9);
    CHECK(Zq::from_int(ctx.get(), 41).reduce_mod2() == 1);
    auto ctx4 = make_context(4, 9);
    Zq l = lift_from_gf<uint64_t>(ctx4.get(), 0b1001); // v^3 + 1
    CHECK(l.coeffs() == std::vector<uint64_t>{1, 0, 0, 1});
    std::mt19937_64 rng(5);
    for (int it = 0; it < 100; ++it) {
        gf x = rng() & 0xf;
        CHECK(lift_from_gf<uint64_t>(ctx4.get(), x).reduce_mod2() == x);
    }
}

TEST_CASE("context mismatch raises") {
    auto c1 = make_context(1, 9), c2 = make_context(1, 10);
    CHECK_THROWS_AS(Zq::one(c1.get()) + Zq::one(c2.get()), ContextMismatch);
}

TEST_CASE("big-word backend agrees with the fast path") {
    auto ctx = make_context(4, 12);
    std::mt19937_64 rng(6);
    for (int it = 0; it < 50; ++it) {
        std::vector<uint64_t> ac(4), bc(4);
        for (auto& w : ac) w = rng();
        for (auto& w : bc) w = rng();
        Zq a(ctx.get(), std::vector<uint64_t>(ac)), b(ctx.get(), std::vector<uint64_t>(bc));
        std::vector<mpz_class> am(ac.begin(), ac.end()), bm(bc.begin(), bc.end());
        ZqBig A(ctx.get(), std::move(am)), B(ctx.get(), std::move(bm));
        Zq p = a * b;
        ZqBig P = A * B;
        for (int i = 0; i < 4; ++i)
            CHECK(mpz_get_ui(P.coeffs()[size_t(i)].get_mpz_t()) == p.coeffs()[size_t(i)]);
    }
}
