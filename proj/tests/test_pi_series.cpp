#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wach/pi_series.hpp"

using namespace wach;

namespace {

PiSeries random_series(std::mt19937_64& rng, int64_t p, int D, int prec, int max_deg = -1) {
    PiSeries f(p, D);
    int d = max_deg < 0 ? D : max_deg;
    for (int j = 0; j <= std::min(d, D); ++j) {
        long long v = static_cast<long long>(rng() % 200000) - 100000;
        f.set_coeff(j, PAdic::from_int(p, v, prec));
    }
    return f;
}

} // namespace

TEST_CASE("series ring basics") {
    std::mt19937_64 rng(3);
    for (int64_t p : {3, 5}) {
        PiSeries one = PiSeries::one(p, 24, 12);
        PiSeries f = random_series(rng, p, 24, 12);
        CHECK((f * one).agrees(f, 10));
        PiSeries g = random_series(rng, p, 24, 12);
        PiSeries h = random_series(rng, p, 24, 12);
        CHECK((f * (g + h)).agrees(f * g + f * h, 10));
        CHECK((f * g).agrees(g * f, 10));
    }
}

TEST_CASE("divide_exact: q = phi(pi)/pi, and pi/q is not divisible") {
    for (int64_t p : {3, 5}) {
        PiSeries phipi = series_phi_pi(p, 20, 12);
        PiSeries pi = PiSeries::pi(p, 20, 12);
        PiSeries q = divide_exact(phipi, pi);
        CHECK(q.agrees(series_q(p, 20, 12), 11));
        CHECK_THROWS_AS(divide_exact(pi, series_q(p, 20, 12)), NotDivisible);
    }
}

TEST_CASE("frobenius explicit values at p=3") {
    // phi(pi) = pi^3 + 3 pi^2 + 3 pi, q = pi^2 + 3 pi + 3
    PiSeries phipi = series_phi_pi(3, 8, 10);
    CHECK(phipi.coeff(1).agrees(PAdic::from_int(3, 3, 10), 9));
    CHECK(phipi.coeff(2).agrees(PAdic::from_int(3, 3, 10), 9));
    CHECK(phipi.coeff(3).agrees(PAdic::from_int(3, 1, 10), 9));
    CHECK(phipi.coeff(4).vanishes(9));
    PiSeries q = series_q(3, 8, 10);
    CHECK(q.coeff(0).agrees(PAdic::from_int(3, 3, 10), 9));
    CHECK(q.coeff(1).agrees(PAdic::from_int(3, 3, 10), 9));
    CHECK(q.coeff(2).agrees(PAdic::from_int(3, 1, 10), 9));
    // frobenius really is substitution by phi(pi)
    PiSeries pi = PiSeries::pi(3, 8, 10);
    CHECK(frobenius(pi).agrees(phipi, 9));
}

TEST_CASE("frobenius is a ring homomorphism") {
    std::mt19937_64 rng(5);
    for (int64_t p : {3, 5}) {
        for (int i = 0; i < 10; ++i) {
            PiSeries f = random_series(rng, p, 30, 12);
            PiSeries g = random_series(rng, p, 30, 12);
            PiSeries lhs = frobenius(f * g);
            PiSeries rhs = frobenius(f) * frobenius(g);
            CHECK(lhs.agrees(rhs, 10));
        }
    }
}

TEST_CASE("psi basics") {
    for (int64_t p : {3, 5}) {
        PiSeries one = PiSeries::one(p, 30, 12);
        CHECK(psi(one).agrees(one, 11));
        // psi(pi) = -1
        PiSeries pi = PiSeries::pi(p, 30, 12);
        PiSeries psip = psi(pi);
        CHECK(psip.coeff(0).agrees(PAdic::from_int(p, -1, 12), 11));
        CHECK(psip.is_zero_at(11, psip.reliable_deg()) == false);
        for (int j = 1; j <= psip.reliable_deg(); ++j) CHECK(psip.coeff(j).vanishes(11));
    }
}

TEST_CASE("psi inverts frobenius and the projection formula holds") {
    std::mt19937_64 rng(9);
    for (int64_t p : {3, 5, 7}) {
        for (int i = 0; i < 12; ++i) {
            PiSeries f = random_series(rng, p, 40, 12);
            PiSeries g = random_series(rng, p, 40, 12);
            CHECK(psi(frobenius(f)).agrees(f, 10));
            // psi(phi(f) g) = f psi(g)
            PiSeries lhs = psi(frobenius(f) * g);
            PiSeries rhs = f * psi(g);
            CHECK(lhs.agrees(rhs, 10));
        }
    }
}

TEST_CASE("psi kills the unit-exponent graded pieces") {
    std::mt19937_64 rng(21);
    for (int64_t p : {3, 5}) {
        PiSeries h = random_series(rng, p, 40, 12, 8);
        PiSeries oneplus = PiSeries::one(p, 40, 12) + PiSeries::pi(p, 40, 12);
        PiSeries cur = PiSeries::one(p, 40, 12);
        for (int i = 1; i <= static_cast<int>(p) - 1; ++i) {
            cur = cur * oneplus;
            PiSeries v = cur * frobenius(h);
            CHECK(psi(v).is_zero_at(10));
        }
    }
}

TEST_CASE("gamma action explicit values") {
    // gamma(pi) with chi(gamma) = 4 at p=3: (1+pi)^4 - 1
    PiSeries pi = PiSeries::pi(3, 10, 12);
    PiSeries g = gamma_act(pi, 0, PAdic::from_int(3, 1, 30), 12);
    CHECK(g.coeff(1).agrees(PAdic::from_int(3, 4, 12), 10));
    CHECK(g.coeff(2).agrees(PAdic::from_int(3, 6, 12), 10));
    CHECK(g.coeff(3).agrees(PAdic::from_int(3, 4, 12), 10));
    CHECK(g.coeff(4).agrees(PAdic::from_int(3, 1, 12), 10));
    CHECK(g.coeff(5).vanishes(10));

    // delta with tau(2) = -1 at p=3: pi -> (1+pi)^{-1} - 1 = -pi + pi^2 - ...
    PiSeries d = gamma_act(pi, 2, PAdic::zero(3), 12);
    for (int j = 1; j <= 6; ++j)
        CHECK(d.coeff(j).agrees(PAdic::from_int(3, (j % 2) ? -1 : 1, 12), 10));
}

TEST_CASE("gamma commutes with frobenius and fixes constants mod pi") {
    std::mt19937_64 rng(33);
    for (int64_t p : {3, 5}) {
        GammaAction gam(p, 40, one_plus_p_pow(PAdic::from_int(p, 1, 40), 40), 14);
        for (int i = 0; i < 6; ++i) {
            PiSeries f = random_series(rng, p, 40, 12);
            CHECK(gam.apply(frobenius(f)).agrees(frobenius(gam.apply(f)), 10));
            // gamma(f) = f mod pi
            CHECK(gam.apply(f).coeff(0).agrees(f.coeff(0), 10));
        }
    }
}

TEST_CASE("derivation") {
    std::mt19937_64 rng(41);
    PiSeries pi = PiSeries::pi(3, 20, 12);
    PiSeries oneplus = PiSeries::one(3, 20, 12) + pi;
    CHECK(derivation(oneplus).agrees(oneplus, 10));
    CHECK(derivation(PiSeries::one(3, 20, 12)).is_zero_at(10));
    for (int i = 0; i < 6; ++i) {
        PiSeries f = random_series(rng, 3, 20, 12);
        PiSeries g = random_series(rng, 3, 20, 12);
        PiSeries lhs = derivation(f * g);
        PiSeries rhs = derivation(f) * g + f * derivation(g);
        CHECK(lhs.agrees(rhs, 10));
    }
    // d/dt of t is 1: derivation(t) = 1
    PiSeries t = series_t(3, 20, 14);
    PiSeries dt = derivation(t);
    CHECK(dt.coeff(0).agrees(PAdic::from_int(3, 1, 12), 10));
    CHECK(dt.is_zero_at(10, dt.reliable_deg()) == false);
    for (int j = 1; j <= dt.reliable_deg(); ++j) CHECK(dt.coeff(j).vanishes(10));
}

TEST_CASE("half logarithms and their frobenius relations") {
    for (int64_t p : {3, 5}) {
        int D = 48, N = 10;
        PiSeries lp = series_lambda_plus(p, D, N);
        PiSeries lm = series_lambda_minus(p, D, N);
        CHECK(lp.coeff(0).agrees(PAdic::from_int(p, 1, N), N));
        CHECK(lm.coeff(0).agrees(PAdic::from_int(p, 1, N), N));
        // lambda+ * lambda- = t/pi
        CHECK((lp * lm).agrees(series_t_over_pi(p, D, N + 6), N));
        // phi(lambda-) = lambda+ and phi(lambda+) = (p/q) lambda-
        CHECK(frobenius(lm).agrees(lp, N));
        PiSeries lhs = frobenius(lp) * series_q(p, D, N + 6);
        CHECK(lhs.agrees(lm.scal_shift(1), N));
    }
}

TEST_CASE("phi(t) = p t") {
    PiSeries t = series_t(3, 36, 12);
    CHECK(frobenius(t).agrees(t.scal_shift(1), 10));
}

TEST_CASE("pi0 and its psi value") {
    for (int64_t p : {3, 5}) {
        PiSeries pi0 = series_pi0(p, 40, 12);
        CHECK(eval_at_zero(pi0).vanishes(10)); // pi0(0) = -p + p = 0
        PiSeries shifted = pi0 + PiSeries::constant(PAdic::from_int(p, static_cast<long long>(p) - 1, 12), 40);
        CHECK(psi(shifted).is_zero_at(10));
    }
}

TEST_CASE("orders and evaluation") {
    PiSeries q = series_q(3, 10, 10);
    CHECK(eval_at_zero(q).agrees(PAdic::from_int(3, 3, 10), 9));
    // p*1 + pi has first unit coefficient at degree 1
    PiSeries f = PiSeries::constant(PAdic::from_int(3, 3, 10), 10) + PiSeries::pi(3, 10, 10);
    CHECK(lowest_order(f, 8) == 1);
    // phi(pi) = pi q: every coefficient below degree p is divisible by p
    CHECK(lowest_order(series_phi_pi(3, 10, 10), 8) == 3);
    CHECK_THROWS_AS(lowest_order(PiSeries::zero(3, 10), 8), AllZero);
}

TEST_CASE("reliable degree bookkeeping interacts with equality") {
    std::mt19937_64 rng(55);
    PiSeries f = random_series(rng, 3, 30, 12);
    PiSeries pf = psi(f);
    CHECK(pf.reliable_deg() == 10);
    PiSeries g = frobenius(f);
    CHECK(g.reliable_deg() == 30);
}
