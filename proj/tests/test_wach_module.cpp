#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "wach/wach_module.hpp"

using namespace wach;

namespace {

PrecisionBudget small_budget() {
    PrecisionBudget b;
    b.N = 10;
    b.D = 54;
    b.X = 6;
    b.tower = 2;
    return b;
}

PiSeries random_psi0(std::mt19937_64& rng, int64_t p, int D, int prec, int pi_pow) {
    // (1+pi)^j phi(pi^e h) is killed by psi and divisible by pi^e
    PiSeries h(p, D);
    for (int j = 0; j <= D; ++j)
        h.set_coeff(j, PAdic::from_int(p, static_cast<long long>(rng() % 20000) - 10000, prec));
    h = h.shifted(pi_pow);
    PiSeries oneplus = PiSeries::one(p, D, prec) + PiSeries::pi(p, D, prec);
    int j = 1 + static_cast<int>(rng() % static_cast<uint64_t>(p - 1));
    return oneplus.pow(j) * frobenius(h);
}

} // namespace

TEST_CASE("context construction: z-polynomial and P") {
    PrecisionBudget b = small_budget();
    // (p=3, k=2, ap=3): m=0, delta=3, z = 1
    WachContext c = build_context(3, 2, PAdic::from_int(3, 3, 24), b);
    CHECK(c.m == 0);
    CHECK(c.delta.agrees(PAdic::from_int(3, 3, 20), 10));
    CHECK(eval_at_zero(c.z).agrees(PAdic::from_int(3, 1, 20), 10));
    for (int j = 1; j <= c.k - 2; ++j) CHECK(c.z.coeff(j).vanishes(10));
    // det P = q^{k-1}
    CHECK(mat_det(c.P).agrees(c.q.pow(c.k - 1), b.N));

    // (p=5, k=3, ap=5): z = 1 + z1 pi with z1 = 2/3 (geometric-sum oracle)
    WachContext c2 = build_context(5, 3, PAdic::from_int(5, 5, 24), b);
    CHECK(eval_at_zero(c2.z).agrees(PAdic::from_int(5, 1, 20), 10));
    // oracle: lambda-[1] = (p-1)/2 sum p^{2j} = -1/(2(p+1));
    //         lambda+[1] = -p/(2(p+1)); z1 = 2(lm[1]-lp[1]) = (p-1)/(p+1)
    PAdic z1_expect = PAdic::from_ratio(5, 4, 6, 20);
    CHECK(c2.z.coeff(1).agrees(z1_expect, 10));
    CHECK(mat_det(c2.P).agrees(c2.q.pow(2), b.N));

    // assumption flags: (3,4,9) has m=1, delta=3
    WachContext c3 = build_context(3, 4, PAdic::from_int(3, 9, 24), b);
    CHECK(c3.m == 1);
    CHECK(c3.delta.agrees(PAdic::from_int(3, 3, 20), 10));
    for (int j = 0; j <= c3.k - 2; ++j)
        CHECK((c3.z.coeff(j).is_zero() || c3.z.coeff(j).valuation() >= 0));

    // (C) violated: supersingular needs v(ap) > m
    CHECK_THROWS_AS(build_context(3, 4, PAdic::from_int(3, 3, 24), b), AssumptionViolated);
}

TEST_CASE("Mprime: explicit forms and the intertwining relation") {
    PrecisionBudget b = small_budget();
    // ap = 0: Mprime = diag(lambda+^{k-1}, lambda-^{k-1})
    for (int k : {2, 3}) {
        WachContext c = build_context(3, k, PAdic::zero(3), b);
        CHECK(c.Mprime.a.agrees(c.lambda_plus_pow(), b.N));
        CHECK(c.Mprime.d.agrees(c.lambda_minus_pow(), b.N));
        CHECK(c.Mprime.b.is_zero_at(b.N));
        CHECK(c.Mprime.c.is_zero_at(b.N));
        // phi(M') P^T = Aphi^T M' holds with zero defect;
        // A^T M' = [[A.a M.a + A.c M.c, A.a M.b + A.c M.d],
        //           [A.b M.a + A.d M.c, A.b M.b + A.d M.d]]
        MatSeries lhs = mat_mul(mat_frobenius(c.Mprime), mat_transpose(c.P));
        MatSeries rhs{c.Mprime.a.scaled(c.Aphi.a) + c.Mprime.c.scaled(c.Aphi.c),
                      c.Mprime.b.scaled(c.Aphi.a) + c.Mprime.d.scaled(c.Aphi.c),
                      c.Mprime.a.scaled(c.Aphi.b) + c.Mprime.c.scaled(c.Aphi.d),
                      c.Mprime.b.scaled(c.Aphi.b) + c.Mprime.d.scaled(c.Aphi.d)};
        CHECK(mat_agrees(lhs, rhs, b.N));
    }
    // k = 2, ap = 3: Mprime equals the stabilized Sprung product B_infty^0
    WachContext c = build_context(3, 2, PAdic::from_int(3, 3, 30), b);
    MatSeries binf = sprung_limit_B(c, 0);
    CHECK(mat_agrees(c.Mprime, binf, b.N));
    // det M' = t/pi for k = 2
    CHECK(mat_det(c.Mprime).agrees(c.t_over_pi, b.N));
}

TEST_CASE("matrix M: ap = 0 closed form and the normalized congruence") {
    PrecisionBudget b = small_budget();
    for (int k : {2, 3}) {
        WachContext c = build_context(3, k, PAdic::zero(3), b);
        // M = [[0, lambda+^{k-1}], [-(lambda-/q)^{k-1}, 0]]
        CHECK(c.M.a.is_zero_at(b.N - 2));
        CHECK(c.M.d.is_zero_at(b.N - 2));
        CHECK(c.M.b.agrees(c.lambda_plus_pow(), b.N - 2));
        PiSeries lmq = divide_series(c.lambda_minus, c.q).pow(k - 1);
        CHECK(c.M.c.agrees(-lmq, b.N - 2));
        // p^{k-1} M at the level-1 points is Aphi^T
        CycElt e12 = eval_series_at_level(c.M.b.scal_shift(k - 1), 1);
        CHECK(e12.agrees(CycElt::scalar(3, 1, c.Aphi.c), 6));
    }
}

TEST_CASE("coleman maps and the reassembly identity") {
    PrecisionBudget b = small_budget();
    std::mt19937_64 rng(101);
    for (auto kv : {std::pair<int, int>{2, 0}, {3, 0}, {2, 3}}) {
        int k = kv.first;
        WachContext c = build_context(3, k, kv.second == 0 ? PAdic::zero(3) : PAdic::from_int(3, kv.second, 30), b);
        for (int rep = 0; rep < 4; ++rep) {
            PiSeries y1 = random_psi0(rng, 3, b.D, 40, k - 1);
            ModuleVec x = fixed_point(y1, PiSeries::zero(3, b.D), c);
            // psi-fixedness
            ModuleVec px = psi_coords(x, c);
            CHECK(px.x1.agrees(x.x1, b.N - 2));
            CHECK(px.x2.agrees(x.x2, b.N - 2));
            // Col(x) = (y1, 0)
            auto col = coleman(x, c);
            CHECK(col.first.agrees(y1, b.N - 2));
            CHECK(col.second.is_zero_at(b.N - 2));
            // kernel-of-psi property of the outputs
            CHECK(psi(col.first).is_zero_at(b.N - 2));
            CHECK(psi(col.second).is_zero_at(b.N - 2));
            // (1-phi)x reassembles to Col(x) through P
            ModuleVec fx = phi_coords(x, c);
            ModuleVec onemphi{x.x1 - fx.x1, x.x2 - fx.x2, 0};
            ModuleVec expect = nprime_to_coords(col.first, col.second, c);
            CHECK(onemphi.x1.agrees(expect.x1, b.N - 2));
            CHECK(onemphi.x2.agrees(expect.x2, b.N - 2));
        }
    }
    // zero maps to zero
    WachContext c0 = build_context(3, 2, PAdic::zero(3), b);
    ModuleVec z{PiSeries::zero(3, b.D), PiSeries::zero(3, b.D), 0};
    auto col0 = coleman(z, c0);
    CHECK(col0.first.is_zero_at(20));
    CHECK(col0.second.is_zero_at(20));
    // ap = 0 reduction of the formulas: Col1 = x2 - phi(x1), Col2 = -q^{k-1}x1 - phi(x2)
    std::mt19937_64 rng2(55);
    PiSeries a1 = random_psi0(rng2, 3, b.D, 14, 0);
    PiSeries a2 = random_psi0(rng2, 3, b.D, 14, 0);
    ModuleVec xv{a1, a2, 0};
    auto col = coleman(xv, c0);
    CHECK(col.first.agrees(a2 - frobenius(a1), b.N));
    CHECK(col.second.agrees(-(c0.q.pow(c0.k - 1) * a1) - frobenius(a2), b.N));
}

TEST_CASE("change-of-basis covariance of the Coleman maps") {
    PrecisionBudget b = small_budget();
    std::mt19937_64 rng(120);
    WachContext c = build_context(3, 3, PAdic::zero(3), b);
    for (int rep = 0; rep < 3; ++rep) {
        PiSeries u(3, b.D);
        for (int j = 0; j <= b.D; ++j)
            u.set_coeff(j, PAdic::from_int(3, static_cast<long long>(rng() % 200) - 100, 16));
        // unipotent upper-triangular change of basis M'' = [[1, u],[0, 1]]
        MatSeries Mpp{PiSeries::one(3, b.D, 16), u, PiSeries::zero(3, b.D), PiSeries::one(3, b.D, 16)};
        // P' with n = M'' n': P'^T = phi(M'')^{-1} P^T M''
        MatSeries phiM = mat_frobenius(Mpp);
        MatSeries phiMinv{phiM.d, -phiM.b, -phiM.c, phiM.a}; // unipotent: adj = inverse
        MatSeries Ppt = mat_mul(mat_mul(phiMinv, mat_transpose(c.P)), Mpp);
        MatSeries Pp = mat_transpose(Ppt);
        PiSeries x1(3, b.D), x2(3, b.D);
        for (int j = 0; j <= b.D; ++j) {
            x1.set_coeff(j, PAdic::from_int(3, static_cast<long long>(rng() % 2000) - 1000, 16));
            x2.set_coeff(j, PAdic::from_int(3, static_cast<long long>(rng() % 2000) - 1000, 16));
        }
        // coordinates transform by x' = x M''
        PiSeries x1p = x1 * Mpp.a + x2 * Mpp.c;
        PiSeries x2p = x1 * Mpp.b + x2 * Mpp.d;
        auto col = coleman_generic(x1, x2, c.P);
        auto colp = coleman_generic(x1p, x2p, Pp);
        // Col'(x) = Col(x) phi(M'')
        PiSeries e1 = col.first * phiM.a + col.second * phiM.c;
        PiSeries e2 = col.first * phiM.b + col.second * phiM.d;
        CHECK(colp.first.agrees(e1, b.N));
        CHECK(colp.second.agrees(e2, b.N));
    }
}

TEST_CASE("gamma matrices: congruence and cocycle") {
    PrecisionBudget b = small_budget();
    int nbig = 40 + factorial_valuation(3, b.D) + 8;
    GammaAction gam(3, b.D, PAdic::from_int(3, 4, nbig), 24);
    for (auto spec : {std::pair<int, int>{2, 0}, {3, 0}, {2, 3}}) {
        WachContext c = build_context(3, spec.first, spec.second == 0 ? PAdic::zero(3) : PAdic::from_int(3, spec.second, 30), b);
        MatSeries G = wach_gamma_matrix(c, gam);
        // G = I mod pi, and mod (p pi, pi^2)
        CHECK(eval_at_zero(G.a).agrees(PAdic::from_int(3, 1, 20), b.N));
        CHECK(eval_at_zero(G.d).agrees(PAdic::from_int(3, 1, 20), b.N));
        CHECK(eval_at_zero(G.b).vanishes(b.N));
        CHECK(eval_at_zero(G.c).vanishes(b.N));
        // G = I mod (p pi, pi^2): constant parts match and the linear
        // coefficients of G - I are divisible by p
        MatSeries diff{G.a - PiSeries::one(3, b.D, 20), G.b, G.c, G.d - PiSeries::one(3, b.D, 20)};
        for (const PiSeries* e : {&diff.a, &diff.b, &diff.c, &diff.d}) {
            CHECK(e->coeff(0).vanishes(b.N));
            CHECK(e->coeff(1).vanishes(1));
        }
    }
    // cocycle: G_{g^2} = G_g * g(G_g)
    WachContext c = build_context(3, 2, PAdic::zero(3), b);
    GammaAction gam2(3, b.D, PAdic::from_int(3, 16, nbig), 24); // chi = 4^2
    MatSeries G1 = wach_gamma_matrix(c, gam);
    MatSeries G2 = wach_gamma_matrix(c, gam2);
    MatSeries rhs = mat_mul(G1, mat_apply(gam, G1));
    CHECK(mat_agrees(G2, rhs, b.N - 2));
}

TEST_CASE("sprung matrices") {
    PrecisionBudget b = small_budget();
    WachContext c = build_context(3, 2, PAdic::from_int(3, 3, 30), b);
    // n=1, i=0, variant A: [[0, Phi_1(gamma)], [-1, ap]]
    MatIwasawa A10 = sprung_product_A(c, 1, 0, b.X);
    IwasawaElement phi1 = cyc_poly_gamma(3, 1, b.X, c.wprec);
    CHECK(A10.a.is_zero_at(b.N));
    CHECK(A10.b.agrees(phi1, b.N));
    CHECK(A10.c.agrees(IwasawaElement::one(3, b.X, 20).scaled(PAdic::from_int(3, -1, 20)), b.N));
    CHECK(A10.d.agrees(IwasawaElement::from_tpoly(3, b.X, 0, {c.ap}), b.N));
    // u_n recursion: C^n = [[-p u_{n-1}, p u_n], [-u_n, u_{n+1}]]
    RootPair r = quad_roots(c.ap, 2, 30);
    auto u_of = [&](int n) {
        // (alpha^n - beta^n)/(alpha - beta) via the quadratic extension
        QuadExtElt num = r.alpha;
        QuadExtElt den = r.alpha - r.beta;
        QuadExtElt an = r.alpha, bn = r.beta;
        // compute alpha^n, beta^n
        QuadExtElt pa = QuadExtElt::scalar(r.alpha.ctx(), PAdic::from_int(3, 1, 30));
        QuadExtElt pb = pa;
        for (int i = 0; i < n; ++i) { pa = pa * an; pb = pb * bn; }
        return ((pa - pb) / den).rational_part();
    };
    MatScalar C{PAdic::zero(3), PAdic::from_int(3, 3, 30), PAdic::from_int(3, -1, 30), c.ap};
    MatScalar Cn = C;
    for (int n = 2; n <= 5; ++n) Cn = mat_mul(Cn, C);
    // Cn = C^5
    CHECK(Cn.a.agrees(-u_of(4).shift(1), 12));
    CHECK(Cn.b.agrees(u_of(5).shift(1), 12));
    CHECK(Cn.c.agrees(-u_of(5), 12));
    CHECK(Cn.d.agrees(u_of(6), 12));
    // ap = 0 variant B stabilizes to diag(lambda+, lambda-) (k=2)
    WachContext c0 = build_context(3, 2, PAdic::zero(3), b);
    MatSeries binf = sprung_limit_B(c0, 0);
    CHECK(binf.a.agrees(c0.lambda_plus, b.N));
    CHECK(binf.d.agrees(c0.lambda_minus, b.N));
    CHECK(binf.b.is_zero_at(b.N));
    CHECK(binf.c.is_zero_at(b.N));
}

TEST_CASE("kernel trace conditions at ap = 0") {
    PrecisionBudget b = small_budget();
    b.D = 81; // level-2 evaluations read high-degree coefficients...
    b.N = 24; // ...so the fixed-point tail must be pushed further down
    WachContext c = build_context(3, 2, PAdic::zero(3), b);
    std::mt19937_64 rng(131);
    // kernel element of Col_1: fixed_point with target (0, y2)
    PiSeries y2 = c.phi_pi * random_psi0(rng, 3, b.D, 44, 0);
    ModuleVec x = fixed_point(PiSeries::zero(3, b.D), y2, c);
    auto col = coleman(x, c);
    CHECK(col.first.is_zero_at(b.N - 2));
    KernelReport rep = kernel_conditions(x, c, 1, 2);
    CHECK(rep.all);
    // zero vector: vacuous
    ModuleVec z{PiSeries::zero(3, b.D), PiSeries::zero(3, b.D), 0};
    CHECK(kernel_conditions(z, c, 1, 2).all);
    CHECK(kernel_conditions(z, c, 2, 2).all);
    // generic random psi-fixed element: conditions fail. The input needs
    // pi | w but nonvanishing level-1 values, so mix two graded pieces
    // whose constant terms cancel.
    PiSeries h1(3, b.D), h2(3, b.D);
    for (int j = 0; j <= b.D; ++j) {
        h1.set_coeff(j, PAdic::from_int(3, static_cast<long long>(rng() % 2000) - 1000 + (j == 0), 44));
        h2.set_coeff(j, PAdic::from_int(3, static_cast<long long>(rng() % 2000) - 1000, 44));
    }
    if (eval_at_zero(h1).is_zero()) h1.set_coeff(0, PAdic::from_int(3, 1, 44));
    h2.set_coeff(0, -eval_at_zero(h1));
    PiSeries oneplus = PiSeries::one(3, b.D, 44) + PiSeries::pi(3, b.D, 44);
    PiSeries w1 = oneplus * frobenius(h1) + oneplus.pow(2) * frobenius(h2);
    CHECK(psi(w1).is_zero_at(12));
    CHECK(eval_at_zero(w1).vanishes(12));
    ModuleVec xg = fixed_point(w1, PiSeries::zero(3, b.D), c);
    KernelReport rep2 = kernel_conditions(xg, c, 1, 2);
    CHECK_FALSE(rep2.all);
}

TEST_CASE("ordinary package") {
    PrecisionBudget b = small_budget();
    // split default: star=0, u=1
    WachContext c = build_context(5, 3, PAdic::from_int(5, 1, 40), b);
    CHECK(c.mode == WachMode::ordinary);
    OrdinaryPackage pkg = ordinary_package(c, PiSeries::zero(5, b.D), PiSeries::one(5, b.D, 40));
    // M' = diag(1, (t/pi)^{k-1}) exactly in the split case
    CHECK(pkg.Mprime.a.agrees(PiSeries::one(5, b.D, 20), b.N));
    CHECK(pkg.Mprime.d.agrees(c.t_over_pi.pow(2), b.N - 2));
    CHECK(pkg.Mprime.b.is_zero_at(b.N));
    CHECK(pkg.Mprime.c.is_zero_at(b.N));
    // alpha-eigenline: first row of M is (alpha (t/pi q)^{k-1}, 0)
    PiSeries expect = divide_series(c.t_over_pi, c.q).pow(2).scaled(c.roots.alpha_padic);
    CHECK(pkg.M.a.agrees(expect, b.N - 4));
    CHECK(pkg.M.b.is_zero_at(b.N - 2));
    // a nontrivial star still passes the shape checks
    PiSeries star = PiSeries::pi(5, b.D, 40);
    OrdinaryPackage pkg2 = ordinary_package(c, star, PiSeries::one(5, b.D, 40));
    CHECK(pkg2.Mprime.b.is_zero_at(b.N));
}

TEST_CASE("elliptic-case images (p=3, k=2, ap=0)") {
    PrecisionBudget b = small_budget();
    WachContext c = build_context(3, 2, PAdic::zero(3), b);
    std::mt19937_64 rng(141);
    // psi(pi0 + p - 1) = 0
    PiSeries pi0 = series_pi0(3, b.D, 20);
    PiSeries shifted = pi0 + PiSeries::constant(PAdic::from_int(3, 2, 20), b.D);
    CHECK(psi(shifted).is_zero_at(b.N));

    // plus-image preimages: pi-divisible target
    PiSeries y = random_psi0(rng, 3, b.D, 44, 1);
    ModuleVec x = plus_image_preimage(y, c);
    ModuleVec px = psi_coords(x, c);
    CHECK(px.x1.agrees(x.x1, b.N - 2));
    CHECK(px.x2.agrees(x.x2, b.N - 2));
    auto col = coleman(x, c);
    CHECK(col.first.agrees(y, b.N - 2));

    // unit-series preimage
    PiSeries g(3, b.D);
    for (int j = 0; j <= b.D; ++j)
        g.set_coeff(j, PAdic::from_int(3, static_cast<long long>(rng() % 200) - 100, 44));
    auto [xu, claimed] = plus_image_unit_preimage(c, g);
    ModuleVec pxu = psi_coords(xu, c);
    CHECK(pxu.x1.agrees(xu.x1, b.N - 2));
    CHECK(pxu.x2.agrees(xu.x2, b.N - 2));
    auto colu = coleman(xu, c);
    CHECK(colu.first.agrees(claimed, b.N - 2));
    PAdic c0 = eval_at_zero(colu.first);
    CHECK(c0.valuation() == 0); // a unit series mod pi

    // Delta-invariant psi=0 elements reduce to c(pi0 + p - 1) mod phi(pi)
    for (int rep = 0; rep < 5; ++rep) {
        PiSeries f(3, b.D);
        for (int j = 0; j <= b.D / 2; ++j)
            f.set_coeff(j, PAdic::from_int(3, static_cast<long long>(rng() % 2000) - 1000, 20));
        PiSeries pol = compose_series(f, pi0); // a polynomial in pi0 is Delta-invariant
        PiSeries y2 = project_psi0(pol);
        auto [cc, ok] = delta_invariant_reduction(y2, b.N);
        CHECK(ok);
    }
}

TEST_CASE("graded-ideal congruences for the transform (crucial steps)") {
    PrecisionBudget b = small_budget();
    int nbig = 40 + factorial_valuation(3, b.D) + 8;
    GammaAction gam(3, b.D, PAdic::from_int(3, 4, nbig), 24);
    for (auto spec : {std::pair<int, int>{2, 0}, {2, 3}, {3, 0}}) {
        WachContext c = build_context(3, spec.first, spec.second == 0 ? PAdic::zero(3) : PAdic::from_int(3, spec.second, 30), b);
        MatSeries H = nprime_gamma_matrix(c, gam);
        // seeds: coordinates of (1+pi) n_i'
        PiSeries oneplus = PiSeries::one(3, b.D, 24) + PiSeries::pi(3, b.D, 24);
        for (int i = 0; i < 2; ++i) {
            PiSeries Y1 = i == 0 ? oneplus : PiSeries::zero(3, b.D);
            PiSeries Y2 = i == 0 ? PiSeries::zero(3, b.D) : oneplus;
            PiSeries cur1 = Y1, cur2 = Y2;
            for (int r = 1; r <= 3; ++r) {
                // (gamma - 1): Y -> (gY) H - Y
                PiSeries g1 = gam.apply(cur1), g2 = gam.apply(cur2);
                PiSeries n1 = g1 * H.a + g2 * H.c - cur1;
                PiSeries n2 = g1 * H.b + g2 * H.d - cur2;
                cur1 = n1;
                cur2 = n2;
                if (r < 2) continue;
                // (gamma-1)^r [(1+pi) n_i'] = phi(pi)^r (1+pi) n_i' mod the
                // graded ideal: check both coordinates
                PiSeries lead1 = c.phi_pi.pow(r) * Y1;
                PiSeries lead2 = c.phi_pi.pow(r) * Y2;
                PiSeries d1 = cur1 - lead1;
                PiSeries d2 = cur2 - lead2;
                // coordinates of ideal members decompose as
                // sum_j (1+pi)^j phi(h_j) with each h_j in the graded ideal;
                // psi((1+pi)^{p-j} d) extracts h_j
                for (const PiSeries* dd : {&d1, &d2}) {
                    for (int j = 1; j <= 2; ++j) {
                        PiSeries h = psi(oneplus.pow(3 - j) * *dd);
                        CHECK(in_graded_ideal(h, r, b.N - 2));
                    }
                }
            }
        }
    }
}
