#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wach/padic.hpp"
#include "wach/quadext.hpp"

using namespace wach;

TEST_CASE("integer arithmetic and valuations") {
    // (p=3) 1 + 2 = 3: unit 1 at valuation 1
    PAdic a = PAdic::from_int(3, 1, 10);
    PAdic b = PAdic::from_int(3, 2, 10);
    PAdic s = a + b;
    CHECK(s.valuation() == 1);
    CHECK(s.digit(0) == 1);

    // (p=5) (1/5) * 5 = 1 at valuation 0
    PAdic fifth = PAdic::from_ratio(5, 1, 5, 10);
    CHECK(fifth.valuation() == -1);
    PAdic prod = fifth * PAdic::from_int(5, 5, 10);
    CHECK(prod.valuation() == 0);
    CHECK(prod.agrees(PAdic::from_int(5, 1, 10), 8));
}

TEST_CASE("multiplicative identity on random values") {
    std::mt19937_64 rng(7);
    for (int64_t p : {3, 5, 7}) {
        PAdic one = PAdic::from_int(p, 1, 12);
        for (int i = 0; i < 50; ++i) {
            long long v = static_cast<long long>(rng() % 100000) - 50000;
            if (v == 0) v = 1;
            PAdic x = PAdic::from_int(p, v, 12);
            CHECK((x * one).agrees(x, x.abs_prec()));
        }
    }
}

TEST_CASE("ring axioms at tracked precision") {
    std::mt19937_64 rng(11);
    for (int64_t p : {3, 5}) {
        for (int i = 0; i < 60; ++i) {
            auto rnd = [&]() {
                long long v = static_cast<long long>(rng() % 2000000) - 1000000;
                return PAdic::from_int(p, v, 14);
            };
            PAdic x = rnd(), y = rnd(), z = rnd();
            CHECK(((x + y) + z).agrees(x + (y + z), 12));
            CHECK((x * y).agrees(y * x, 12));
            CHECK((x * (y + z)).agrees(x * y + x * z, 12));
            CHECK(((x - y) + y).agrees(x, 12));
        }
    }
}

TEST_CASE("division tracks precision and rejects zero") {
    PAdic x = PAdic::from_int(3, 10, 12);
    PAdic y = PAdic::from_int(3, 9, 12);
    PAdic q = x / y;
    CHECK(q.valuation() == -2);
    CHECK((q * y).agrees(x, 9));
    CHECK_THROWS_AS(x / PAdic::zero(3, 6), DivisionByZero);
}

TEST_CASE("precision semantics of cancellation") {
    // (1 + O(3^6)) - (1 + O(3^6)) is a zero known mod 3^6
    PAdic a = PAdic::from_int(3, 1, 6);
    PAdic d = a - a;
    CHECK(d.is_zero());
    CHECK(d.valuation() == 6);
    // adding a fuzzier zero caps the result precision
    PAdic z3 = PAdic::zero(3, 3);
    PAdic s = a + z3;
    CHECK(s.abs_prec() == 3);
}

TEST_CASE("teichmuller values") {
    // (p=5, N=2) a=2 -> 7 mod 25  [oracle: iterate x -> x^5 mod 25]
    PAdic w = teichmuller(5, 2, 2);
    CHECK(w.agrees(PAdic::from_int(5, 7, 2), 2));
    // (p=3) a=1 -> 1, a=2 -> -1
    CHECK(teichmuller(3, 1, 8).agrees(PAdic::from_int(3, 1, 8), 8));
    CHECK(teichmuller(3, 2, 8).agrees(PAdic::from_int(3, -1, 8), 8));
}

TEST_CASE("teichmuller is a (p-1)-st root of unity up to N=64") {
    for (int64_t p : {3, 5, 7}) {
        for (int N : {1, 2, 8, 33, 64}) {
            for (uint32_t a = 1; a < static_cast<uint32_t>(p); ++a) {
                PAdic w = teichmuller(p, a, N);
                CHECK(w.pow(p - 1).agrees(PAdic::from_int(p, 1, N), N));
                CHECK(w.digit(0) == a);
            }
        }
    }
}

TEST_CASE("quad_roots: supersingular symbolic pair") {
    // (p=3,k=2,a_p=0): alpha = sqrt(-3) symbolically, alpha^2 = -3
    PAdic ap = PAdic::zero(3);
    RootPair r = quad_roots(ap, 2, 10);
    CHECK_FALSE(r.split);
    QuadExtElt sq = r.alpha * r.alpha;
    CHECK(sq.rational_part().agrees(PAdic::from_int(3, -3, 10), 9));
    CHECK(sq.alpha_part().vanishes(9));
}

TEST_CASE("quad_roots: Vieta for random ordinary a_p") {
    std::mt19937_64 rng(13);
    for (int64_t p : {3, 5, 7}) {
        for (int k : {2, 3, 4}) {
            for (int i = 0; i < 8; ++i) {
                long long u = static_cast<long long>(rng() % 1000) + 1;
                if (u % p == 0) ++u;
                PAdic ap = PAdic::from_int(p, u, 14);
                RootPair r = quad_roots(ap, k, 14);
                CHECK(r.split);
                CHECK((r.alpha_padic + r.beta_padic).agrees(ap, 12));
                PAdic pk = PAdic::from_int(p, 1, 14).shift(k - 1);
                CHECK((r.alpha_padic * r.beta_padic).agrees(pk, 12));
                CHECK(r.alpha_padic.valuation() == 0);
                CHECK(r.beta_padic.valuation() == k - 1);
            }
        }
    }
}

TEST_CASE("quad_roots: Hensel refinement for p=5,k=2,a_p=1") {
    // X^2 - X + 5: unit root is 1 mod 5, refined to 21 mod 25
    PAdic ap = PAdic::from_int(5, 1, 8);
    RootPair r = quad_roots(ap, 2, 8);
    REQUIRE(r.split);
    CHECK(r.alpha_padic.digit(0) == 1);
    CHECK(r.alpha_padic.agrees(PAdic::from_int(5, 21, 8), 2));
    // Newton oracle, run independently
    PAdic x = PAdic::from_int(5, 1, 8);
    for (int i = 0; i < 6; ++i) {
        PAdic f = x * x - x + PAdic::from_int(5, 5, 8);
        PAdic fp = PAdic::from_int(5, 2, 8) * x - PAdic::from_int(5, 1, 8);
        x = x - f / fp;
    }
    CHECK(r.alpha_padic.agrees(x, 8));
}

TEST_CASE("quadratic extension arithmetic") {
    QuadContext ctx{PAdic::from_int(3, 0, 12), 2};
    QuadExtElt al = QuadExtElt::alpha(ctx, 12);
    QuadExtElt x = QuadExtElt(ctx, PAdic::from_int(3, 2, 12), PAdic::from_int(3, 5, 12));
    QuadExtElt xi = x.inv();
    QuadExtElt prod = x * xi;
    CHECK(prod.rational_part().agrees(PAdic::from_int(3, 1, 12), 10));
    CHECK(prod.alpha_part().vanishes(10));
    // norm is multiplicative
    QuadExtElt y = QuadExtElt(ctx, PAdic::from_int(3, 7, 12), PAdic::from_int(3, -4, 12));
    CHECK((x * y).norm().agrees(x.norm() * y.norm(), 10));
    CHECK((al * al).rational_part().agrees(PAdic::from_int(3, -3, 12), 10));
}

TEST_CASE("decimal round trip") {
    PAdic x = PAdic::from_decimal(5, "123456789123456789", 20);
    PAdic y = PAdic::from_int(5, 123456789123456789LL, 20);
    CHECK(x.agrees(y, 20));
    CHECK(PAdic::from_decimal(3, "-7", 10).agrees(PAdic::from_int(3, -7, 10), 10));
    CHECK(PAdic::from_decimal(3, "1/2", 10).agrees(PAdic::from_ratio(3, 1, 2, 10), 10));
}
