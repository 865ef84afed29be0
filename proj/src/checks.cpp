#include "wach/checks.hpp"

#include <algorithm>

namespace wach {

PiSeries random_series(std::mt19937_64& rng, int64_t p, int D, int prec, int max_deg) {
    PiSeries f(p, D);
    int d = max_deg < 0 ? D : std::min(max_deg, D);
    for (int j = 0; j <= d; ++j)
        f.set_coeff(j, PAdic::from_int(p, static_cast<long long>(rng() % 200000) - 100000, prec));
    return f;
}

PiSeries random_psi0(std::mt19937_64& rng, int64_t p, int D, int prec, int pi_pow) {
    PiSeries h = random_series(rng, p, D, prec).shifted(pi_pow);
    PiSeries oneplus = PiSeries::one(p, D, prec) + PiSeries::pi(p, D, prec);
    int j = 1 + static_cast<int>(rng() % static_cast<uint64_t>(p - 1));
    return oneplus.pow(j) * frobenius(h);
}

PiSeries random_psi0_generic(std::mt19937_64& rng, int64_t p, int D, int prec) {
    PiSeries h1 = random_series(rng, p, D, prec);
    PiSeries h2 = random_series(rng, p, D, prec);
    if (eval_at_zero(h1).is_zero() || eval_at_zero(h1).valuation() > 0)
        h1.set_coeff(0, PAdic::from_int(p, 1, prec));
    h2.set_coeff(0, -eval_at_zero(h1));
    PiSeries oneplus = PiSeries::one(p, D, prec) + PiSeries::pi(p, D, prec);
    return oneplus * frobenius(h1) + oneplus.pow(2) * frobenius(h2);
}

IwasawaElement random_bounded(std::mt19937_64& rng, int64_t p, int X, int prec) {
    IwasawaElement z(p, X);
    for (int a = 0; a < z.grades(); ++a)
        for (int l = 0; l <= X; ++l)
            z.set_coeff(a, l, PAdic::from_int(p, static_cast<long long>(rng() % 20000) - 10000, prec));
    return z;
}

bool all_pass(const std::vector<CheckResult>& results) {
    for (const auto& r : results)
        if (!r.pass) return false;
    return true;
}

namespace {

// residual helper: smallest valuation of a definite nonzero coefficient
int series_residual(const PiSeries& f, int tol) {
    int v = tol;
    for (int j = 0; j <= f.reliable_deg(); ++j) {
        const PAdic& c = f.coeff(j);
        if (c.is_zero() || c.vanishes(tol)) continue;
        v = std::min(v, c.valuation());
    }
    return v;
}

struct Suite {
    std::vector<CheckResult> out;
    void add(const std::string& name, bool pass, int residual, const std::string& note = "") {
        out.push_back({name, pass, residual, note});
    }
};

} // namespace

std::vector<CheckResult> run_invariant_suite(int64_t p, int k, const PAdic& ap,
                                             const PrecisionBudget& budget, uint64_t seed,
                                             int instances) {
    Suite S;
    std::mt19937_64 rng(seed);
    int D = budget.D;
    int N = budget.N;
    int wp = 2 * N + 16;

    // ---- operator calculus -------------------------------------------------
    {
        bool ok1 = true, ok2 = true, ok4 = true;
        for (int i = 0; i < instances; ++i) {
            PiSeries f = random_series(rng, p, D, wp);
            PiSeries g = random_series(rng, p, D, wp);
            if (!psi(frobenius(f)).agrees(f, N)) ok1 = false;
            if (!psi(frobenius(f) * g).agrees(f * psi(g), N)) ok2 = false;
            PiSeries lhs = derivation(f * g);
            PiSeries rhs = derivation(f) * g + f * derivation(g);
            if (!lhs.agrees(rhs, N)) ok4 = false;
        }
        S.add("psi-after-phi-is-identity", ok1, ok1 ? N : 0);
        S.add("projection-formula", ok2, ok2 ? N : 0);
        S.add("derivation-leibniz", ok4, ok4 ? N : 0);
        int nbig = wp + factorial_valuation(p, D) + 8;
        GammaAction gam(p, D, PAdic::from_int(p, 1 + static_cast<int>(p), nbig), wp);
        bool ok3 = true;
        for (int i = 0; i < std::max(2, instances / 4); ++i) {
            PiSeries f = random_series(rng, p, D, wp);
            if (!gam.apply(frobenius(f)).agrees(frobenius(gam.apply(f)), N)) ok3 = false;
        }
        S.add("gamma-commutes-with-phi", ok3, ok3 ? N : 0);
    }

    // ---- distinguished series ---------------------------------------------
    {
        PiSeries q = series_q(p, D, wp);
        PiSeries quot = divide_exact(series_phi_pi(p, D, wp), PiSeries::pi(p, D, wp));
        S.add("q-is-phi-pi-over-pi", quot.agrees(q, N), N);
        PiSeries lp = series_lambda_plus(p, D, N);
        PiSeries lm = series_lambda_minus(p, D, N);
        PiSeries d1 = lp * lm - series_t_over_pi(p, D, N + 6);
        S.add("half-log-product-is-t-over-pi", d1.is_zero_at(N), series_residual(d1, N));
        PiSeries d2 = frobenius(lm) - lp;
        S.add("phi-of-minus-log-is-plus-log", d2.is_zero_at(N), series_residual(d2, N));
        PiSeries d3 = frobenius(lp) * q - lm.scal_shift(1);
        S.add("phi-of-plus-log-is-p-over-q-minus-log", d3.is_zero_at(N), series_residual(d3, N));
        PiSeries pi0 = series_pi0(p, D, wp);
        PiSeries s = psi(pi0 + PiSeries::constant(PAdic::from_int(p, static_cast<int>(p) - 1, wp), D));
        S.add("pi0-psi-value", s.is_zero_at(N), series_residual(s, N));
    }

    // ---- Mellin ------------------------------------------------------------
    {
        MellinContext mc(p, std::max(D, static_cast<int>(p) * budget.X), budget.X, N);
        bool ok = true, okrt = true;
        for (int i = 0; i < std::max(4, instances / 4); ++i) {
            IwasawaElement z = random_bounded(rng, p, budget.X - 1, wp);
            PiSeries F = mc.mellin(z);
            if (!psi(F).is_zero_at(N)) ok = false;
            if (!mc.inv_mellin(F).resized(budget.X - 1).agrees(z, N)) okrt = false;
        }
        S.add("psi-kills-mellin-image", ok, ok ? N : 0);
        S.add("mellin-round-trip", okrt, okrt ? N : 0);
        bool okpk = true;
        for (int kk = 1; kk <= std::min(4, budget.X - 1); ++kk) {
            PiSeries img = mc.mellin(pk_element(p, kk, budget.X, wp));
            PiSeries phik = series_phi_pi(p, mc.series_deg(), wp).pow(kk);
            PiSeries back = divide_exact(img, phik) * phik;
            if (!back.agrees(img, N - 2)) okpk = false;
        }
        S.add("pk-image-divisibility", okpk, okpk ? N - 2 : 0);
        bool okrank = mc.quotient_bijective(1) && mc.quotient_bijective(2) && mc.quotient_bijective(3);
        S.add("pk-quotient-bijective", okrank, okrank ? N : 0);
    }

    // ---- Fourier-theory predicates ------------------------------------------
    {
        FourierChecker checker(p, 0, N);
        int DC = checker.mellin().series_deg();
        bool agree = true, posneg = true;
        for (int n = 1; n <= 2; ++n) {
            for (int i = 0; i < std::max(2, instances / 8); ++i) {
                PiSeries h = random_series(rng, p, DC, wp);
                PiSeries oneplus = PiSeries::one(p, DC, wp) + PiSeries::pi(p, DC, wp);
                PiSeries F = n == 1 ? oneplus * frobenius(PiSeries::pi(p, DC, wp) * h)
                                    : series_cyc_poly(p, n, DC, wp) * oneplus * frobenius(h);
                FourierReport r1 = checker.run(F, n);
                if (!r1.unanimous) agree = false;
                if (!r1.div_series) posneg = false;
                PiSeries G = oneplus * frobenius(h) + oneplus;
                FourierReport r2 = checker.run(G, n);
                if (!r2.unanimous) agree = false;
                if (r2.div_series) posneg = false;
            }
        }
        S.add("fourier-predicates-agree", agree, agree ? N : 0);
        S.add("fourier-predicates-separate", posneg, posneg ? N : 0);
    }

    // ---- context-level identities -------------------------------------------
    try {
        WachContext ctx = build_context(p, k, ap, budget);
        bool zint = true;
        for (int j = 0; j <= k - 2; ++j) {
            const PAdic& c = ctx.z.coeff(j);
            if (!c.is_zero() && c.valuation() < 0) zint = false;
        }
        S.add("z-polynomial-integral", zint, zint ? N : 0);
        PiSeries dp = mat_det(ctx.P) - ctx.q.pow(k - 1);
        S.add("det-P-is-q-power", dp.is_zero_at(N), series_residual(dp, N));
        {
            MatSeries lhs = mat_mul(mat_frobenius(ctx.Mprime), mat_transpose(ctx.P));
            MatScalar At = mat_transpose(ctx.Aphi);
            MatSeries rhs{ctx.Mprime.a.scaled(At.a) + ctx.Mprime.c.scaled(At.b),
                          ctx.Mprime.b.scaled(At.a) + ctx.Mprime.d.scaled(At.b),
                          ctx.Mprime.a.scaled(At.c) + ctx.Mprime.c.scaled(At.d),
                          ctx.Mprime.b.scaled(At.c) + ctx.Mprime.d.scaled(At.d)};
            bool ok = mat_agrees(lhs, rhs, N);
            S.add("Mprime-intertwines-phi", ok, ok ? N : 0);
        }
        if (ctx.ap_is_zero()) {
            bool ok = ctx.Mprime.a.agrees(ctx.lambda_plus_pow(), N) &&
                      ctx.Mprime.d.agrees(ctx.lambda_minus_pow(), N) &&
                      ctx.Mprime.b.is_zero_at(N) && ctx.Mprime.c.is_zero_at(N);
            S.add("Mprime-half-log-diagonal", ok, ok ? N : 0);
        }
        if (ctx.k == 2 && ctx.mode == WachMode::supersingular) {
            MatSeries binf = sprung_limit_B(ctx, 0);
            bool ok = mat_agrees(binf, ctx.Mprime, N);
            S.add("Mprime-matches-stabilized-product", ok, ok ? N : 0);
        }
        {
            // p^{k-1} M = Aphi^T at the level-1 points (normalized congruence)
            MatScalar At = mat_transpose(ctx.Aphi);
            bool ok = true;
            auto chk = [&](const PiSeries& e, const PAdic& t) {
                if (ctx.mode == WachMode::ordinary && (&e == &ctx.M.c)) return;
                CycElt ev = eval_series_at_level(e.scal_shift(k - 1), 1, std::max(1, budget.tower));
                int tol = N - 2;
                for (const auto& cc : ev.coords())
                    if (cc.abs_prec() < kExactPrec) tol = std::min(tol, cc.abs_prec() - 1);
                if (!ev.agrees(CycElt::scalar(p, 1, t), std::max(2, tol))) ok = false;
            };
            chk(ctx.M.a, At.a);
            chk(ctx.M.b, At.b);
            chk(ctx.M.c, At.c);
            chk(ctx.M.d, At.d);
            S.add("M-congruence-normalized", ok, ok ? N - 2 : 0);
        }
        if (ctx.mode == WachMode::supersingular) {
            bool okker = true, okreas = true;
            PiSeries phik = ctx.phi_pi.pow(k - 1);
            for (int i = 0; i < std::max(2, instances / 8); ++i) {
                PiSeries y1 = random_psi0(rng, p, D, 2 * ctx.wprec, k - 1);
                ModuleVec x = fixed_point(y1, PiSeries::zero(p, D), ctx);
                ModuleVec px = psi_coords(x, ctx);
                if (!px.x1.agrees(x.x1, N - 2) || !px.x2.agrees(x.x2, N - 2)) okker = false;
                auto col = coleman(x, ctx);
                if (!psi(col.first).is_zero_at(N - 2) || !psi(col.second).is_zero_at(N - 2)) okker = false;
                // phi(pi)^{k-1} (1-phi)x = Col(x) P^T in coordinates
                PiSeries f1 = frobenius(x.x1), f2 = frobenius(x.x2);
                MatSeries Pt = mat_transpose(ctx.P);
                PiSeries lhs1 = phik * x.x1 - PiSeries::pi(p, D, ctx.wprec).pow(k - 1) * (f1 * Pt.a + f2 * Pt.c);
                PiSeries lhs2 = phik * x.x2 - PiSeries::pi(p, D, ctx.wprec).pow(k - 1) * (f1 * Pt.b + f2 * Pt.d);
                PiSeries rhs1 = (col.first * Pt.a + col.second * Pt.c).shifted(k - 1);
                PiSeries rhs2 = (col.first * Pt.b + col.second * Pt.d).shifted(k - 1);
                if (!lhs1.agrees(rhs1, N - 2) || !lhs2.agrees(rhs2, N - 2)) okreas = false;
            }
            S.add("coleman-kernel-of-psi", okker, okker ? N - 2 : 0);
            S.add("coleman-reassembly", okreas, okreas ? N - 2 : 0);
        }
        if (ctx.family_supported()) {
            IwasawaTransform J(ctx, budget.X, N + 2);
            bool okb = true, okrt = true;
            {
                PiSeries oneplus = PiSeries::one(p, J.refined_context().budget.D, ctx.wprec) +
                                   PiSeries::pi(p, J.refined_context().budget.D, ctx.wprec);
                auto z = J.transform(oneplus, PiSeries::zero(p, J.refined_context().budget.D));
                okb = z.first.agrees(IwasawaElement::one(p, budget.X - 1, N), N) &&
                      z.second.is_zero_at(N);
            }
            for (int i = 0; i < std::max(2, instances / 10); ++i) {
                IwasawaElement z1 = random_bounded(rng, p, budget.X - 1, wp);
                IwasawaElement z2 = random_bounded(rng, p, budget.X - 1, wp);
                auto Y = J.apply_basis(z1, z2);
                auto back = J.transform(Y.first, Y.second);
                if (!back.first.agrees(z1, N) || !back.second.agrees(z2, N)) okrt = false;
            }
            S.add("iwasawa-transform-basis", okb, okb ? N : 0);
            S.add("iwasawa-transform-round-trip", okrt, okrt ? N : 0);
            // decomposition round trip
            MellinContext mc(p, D, budget.X, N + 2);
            bool okd = true;
            for (int i = 0; i < std::max(1, instances / 16); ++i) {
                IwasawaElement z1 = random_bounded(rng, p, budget.X - 1, wp);
                IwasawaElement z2 = random_bounded(rng, p, budget.X - 1, wp);
                PiSeries L1 = mc.mellin(z1);
                PiSeries L2 = mc.mellin(z2);
                auto fwd = forward_decomposition(ctx, L1, L2);
                QuadIw La{mc.inv_mellin(fwd.first.r, false), mc.inv_mellin(fwd.first.a, false)};
                QuadIw Lb{mc.inv_mellin(fwd.second.r, false), mc.inv_mellin(fwd.second.a, false)};
                auto rec = decompose(ctx, mc, La, Lb);
                PiSeries e1 = reduce_mod_phi_pi_pow(rec.first - L1, budget.X);
                PiSeries e2 = reduce_mod_phi_pi_pow(rec.second - L2, budget.X);
                if (!e1.is_zero_at(N - 4) || !e2.is_zero_at(N - 4)) okd = false;
            }
            S.add("decomposition-round-trip", okd, okd ? N - 4 : 0);
        }
        if (ctx.p == 3 && ctx.k == 2 && ctx.ap_is_zero()) {
            PiSeries y = random_psi0(rng, p, D, 2 * ctx.wprec, 1);
            ModuleVec x = plus_image_preimage(y, ctx);
            auto col = coleman(x, ctx);
            bool ok = col.first.agrees(y, N - 2);
            S.add("plus-image-preimage", ok, ok ? N - 2 : 0);
            // Delta-invariant reduction
            PiSeries pi0 = series_pi0(p, D, ctx.wprec);
            bool okd = true;
            for (int i = 0; i < 4; ++i) {
                PiSeries f = random_series(rng, p, D / 2, ctx.wprec);
                PiSeries y2 = project_psi0(compose_series(f, pi0));
                if (!delta_invariant_reduction(y2, N).second) okd = false;
            }
            S.add("delta-invariant-reduction", okd, okd ? N : 0);
        }
    } catch (const Error& e) {
        S.add("context-identities", false, 0, e.what());
    }

    return S.out;
}

} // namespace wach
