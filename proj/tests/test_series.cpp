#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "twoadic/series.hpp"

using namespace twoadic;

namespace {
std::vector<uint64_t> ints(const Series& s) {
    REQUIRE(s.ctx()->d == 1);
    return s.raw();
}
} // namespace

TEST_CASE("mul basics") {
    auto ctx = make_context(1, 9);
    Series f = Series::from_ints(ctx.get(), {1, 1}, 3);  // 1 + t
    Series g = Series::from_ints(ctx.get(), {1, 511}, 3); // 1 - t
    Series p = f.mul(g, 3);
    CHECK(ints(p) == std::vector<uint64_t>{1, 0, 511}); // 1 - t^2
    Series one = Series::from_ints(ctx.get(), {1}, 1);
    Series h = Series::from_ints(ctx.get(), {7, 3, 1, 4}, 4);
    CHECK(h.mul(one, 4) == h);
}

TEST_CASE("fast multiplication agrees with schoolbook") {
    std::mt19937_64 rng(11);
    for (int d : {1, 2, 4}) {
        auto ctx = make_context(d, 17);
        for (int rep = 0; rep < 8; ++rep) {
            int n = 64;
            Series f(ctx.get(), n), g(ctx.get(), n);
            for (int i = 0; i < n; ++i) {
                std::vector<uint64_t> a((size_t(d))), b((size_t(d)));
                for (auto& w : a) w = rng();
                for (auto& w : b) w = rng();
                f.set(i, Zq(ctx.get(), std::move(a)));
                g.set(i, Zq(ctx.get(), std::move(b)));
            }
            Series fast = f.mul(g, n);
            Series slow(ctx.get(), n);
            schoolbook_mul(*ctx, f, g, slow, n);
            CHECK(fast == slow);
        }
    }
}

TEST_CASE("ring axioms for series on random triples") {
    std::mt19937_64 rng(12);
    auto ctx = make_context(1, 12);
    for (int rep = 0; rep < 128; ++rep) {
        int n = 1 + int(rng() % 24);
        auto rnd = [&] {
            Series s(ctx.get(), n);
            for (int i = 0; i < n; ++i) s.set(i, Zq::from_int(ctx.get(), (long long)(rng() & 0xfff)));
            return s;
        };
        Series a = rnd(), b = rnd(), c = rnd();
        CHECK(a.mul(b, n) == b.mul(a, n));
        CHECK((a + b).mul(c, n) == (a.mul(c, n) + b.mul(c, n)));
        CHECK(a.mul(b, n).mul(c, n) == a.mul(b.mul(c, n), n));
    }
}

TEST_CASE("derivative") {
    auto ctx = make_context(1, 9);
    Series t = Series::from_ints(ctx.get(), {0, 1}, 2);
    CHECK(ints(t.derivative()) == std::vector<uint64_t>{1});
    // lambda t + t(t-4a) q with q = c0: derivative lambda - 4a c0 + 2 c0 t
    long long lambda = 3, a = 5, c0 = 7;
    Series z = Series::from_ints(ctx.get(), {0, lambda - 4 * a * c0, c0}, 3);
    Series zp = z.derivative();
    CHECK(zp.get(0) == Zq::from_int(ctx.get(), lambda - 4 * a * c0));
    CHECK(zp.get(1) == Zq::from_int(ctx.get(), 2 * c0));
    // derivative of the antiderivative returns f (t^0 term handled apart)
    std::mt19937_64 rng(13);
    Series f(ctx.get(), 12);
    for (int i = 0; i < 12; ++i) f.set(i, Zq::from_int(ctx.get(), (long long)(rng() & 0x1ff)));
    Series F(ctx.get(), 13);
    for (int i = 0; i < 12; ++i) {
        // antiderivative coefficient (i+1): f_i / (i+1) only when exact; use
        // the identity on indices where i+1 is odd to stay in the ring
        if ((i + 1) % 2 == 1)
            F.set(i + 1, div(f.get(i), Zq::from_int(ctx.get(), i + 1)));
    }
    Series Fp = F.derivative();
    for (int i = 0; i < 12; ++i)
        if ((i + 1) % 2 == 1) CHECK(Fp.get(i) == f.get(i));
}

TEST_CASE("invert") {
    auto ctx = make_context(1, 9);
    Series f = Series::from_ints(ctx.get(), {1, 511}, 4); // 1 - t
    CHECK(ints(series_invert(f, 4)) == std::vector<uint64_t>{1, 1, 1, 1});
    // invert(invert(f)) = f for random unit f
    std::mt19937_64 rng(14);
    for (int rep = 0; rep < 20; ++rep) {
        Series g(ctx.get(), 16);
        for (int i = 0; i < 16; ++i) g.set(i, Zq::from_int(ctx.get(), (long long)(rng() & 0x1ff)));
        g.set(0, Zq::from_int(ctx.get(), (long long)((rng() & 0x1ff) | 1)));
        CHECK(series_invert(series_invert(g, 16), 16) == g.trunc(16));
    }
    // the worked example: u^2 = 65 - 16t + 4t^2, invert then multiply gives 1
    Series u2 = Series::from_ints(ctx.get(), {65, -16, 4}, 12);
    Series inv = series_invert(u2, 12);
    Series prod = u2.mul(inv, 12);
    CHECK(prod.get(0) == Zq::one(ctx.get()));
    for (int i = 1; i < 12; ++i) CHECK(prod.coeff_is_zero(i));
    CHECK_THROWS_AS(series_invert(Series::from_ints(ctx.get(), {2, 1}, 4), 4), NotInvertible);
}

TEST_CASE("sqrt_inverse") {
    auto ctx = make_context(1, 9);
    Series one = Series::from_ints(ctx.get(), {1}, 4);
    CHECK(sqrt_inverse(one, 4).get(0) == Zq::one(ctx.get()));

    // 1/u = 225 - 248 t - 226 t^2 + 208 t^3 - ... for u^2 = 65 - 16t + 4t^2;
    // the kernel guarantees agreement to O(2^(M-1)) = mod 2^8 here.
    Series u2 = Series::from_ints(ctx.get(), {65, -16, 4}, 12);
    Series uinv = sqrt_inverse(u2, 12);
    const long long golden[] = {225, -248, -226, 208, -122, 240, 172, 160, -250, -80, -60, 96};
    for (int i = 0; i < 12; ++i) {
        long long want = ((golden[i] % 256) + 256) % 256;
        CHECK(uinv.raw()[size_t(i)] % 256 == uint64_t(want));
    }
    // postcondition: r^2 u^2 = 1 mod 2^(M-1)
    Series chk = uinv.mul(uinv, 12).mul(u2, 12);
    CHECK((chk.get(0) - Zq::one(ctx.get())).val2() >= 8);
    for (int i = 1; i < 12; ++i) CHECK(chk.coeff_val2(i) >= 8);

    // random g = 1 mod 4 unit: sqrt_inverse(g^2) * g = +-1 mod 2^(M-1)
    std::mt19937_64 rng(15);
    for (int rep = 0; rep < 20; ++rep) {
        Series g(ctx.get(), 10);
        for (int i = 0; i < 10; ++i) g.set(i, Zq::from_int(ctx.get(), (long long)(rng() & 0x1ff)));
        g.set(0, Zq::from_int(ctx.get(), (long long)((rng() & 0x1fc) | 1)));
        Series f = g.mul(g, 10);
        Series r = sqrt_inverse(f, 10);
        Series prod = r.mul(g, 10);
        bool plus = (prod.get(0) - Zq::one(ctx.get())).val2() >= 8;
        bool minus = (prod.get(0) + Zq::one(ctx.get())).val2() >= 8;
        CHECK((plus || minus));
        for (int i = 1; i < 10; ++i) CHECK(prod.coeff_val2(i) >= 8);
    }
    Series bad = Series::from_ints(ctx.get(), {5, 1}, 4);
    CHECK_THROWS_AS(sqrt_inverse(bad, 4), NotASquare);
}

TEST_CASE("divide_by_t_t_minus_4a") {
    auto ctx = make_context(1, 9);
    Zq four_a = Zq::from_int(ctx.get(), 252); // the worked example's 4a
    SECTION("t(t-4a) * 1 -> 1") {
        Series f = Series::from_ints(ctx.get(), {0, -252, 1}, 3);
        Series q = divide_by_t_t_minus_4a(f, four_a);
        CHECK(q.get(0) == Zq::one(ctx.get()));
    }
    SECTION("round trip with the example u^2") {
        Series u2 = Series::from_ints(ctx.get(), {65, -16, 4}, 3);
        Series tt(ctx.get(), 3);
        tt.set(1, -four_a);
        tt.set(2, Zq::one(ctx.get()));
        Series f = tt.mul(u2, 5);
        Series q = divide_by_t_t_minus_4a(f, four_a);
        CHECK(q.trunc(3) == u2.trunc(3));
    }
    SECTION("round trip property: full product recovers f mod (t^(n-2), 2^(M-2))") {
        std::mt19937_64 rng(16);
        for (int rep = 0; rep < 20; ++rep) {
            int n = 12;
            Series f(ctx.get(), n);
            for (int i = 0; i < n; ++i)
                f.set(i, Zq::from_int(ctx.get(), (long long)(rng() & 0x1ff)));
            Series tt(ctx.get(), 3);
            tt.set(1, -four_a);
            tt.set(2, Zq::one(ctx.get()));
            Series g = tt.mul(f, n + 2);
            Series q = divide_by_t_t_minus_4a(g, four_a);
            for (int i = 0; i < n - 2; ++i)
                CHECK((q.get(i) - f.get(i)).val2() >= ctx->M - 2);
            CHECK(q.trunc(n) == f.trunc(n)); // the synthetic division is exact here
        }
    }
    SECTION("forced failure") {
        Series f = Series::from_ints(ctx.get(), {0, 1}, 2); // f = t
        CHECK_THROWS_AS(divide_by_t_t_minus_4a(f, four_a), PrecisionError);
    }
}

TEST_CASE("compose_quartic") {
    auto ctx = make_context(1, 9);
    SECTION("W = x^2") {
        std::vector<Series> Wc;
        for (int i = 0; i < 5; ++i) Wc.push_back(Series(ctx.get(), 1));
        Wc[2].set(0, Zq::one(ctx.get()));
        Series x = Series::from_ints(ctx.get(), {1, 1}, 3);
        Series r = compose_quartic(Wc, x, 3);
        CHECK(ints(r) == std::vector<uint64_t>{1, 2, 1});
    }
    SECTION("x = 0 returns the constant coefficient") {
        std::vector<Series> Wc;
        for (int i = 0; i < 5; ++i) {
            Series s = Series::from_ints(ctx.get(), {(long long)(3 + i), (long long)i}, 4);
            Wc.push_back(s);
        }
        Series zero(ctx.get(), 4);
        CHECK(compose_quartic(Wc, zero, 4) == Wc[0].trunc(4));
    }
}
