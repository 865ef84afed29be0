#include "wach/wach_module.hpp"

#include <algorithm>

namespace wach {

MatSeries mat_frobenius(const MatSeries& x) {
    return {frobenius(x.a), frobenius(x.b), frobenius(x.c), frobenius(x.d)};
}

MatSeries mat_apply(const GammaAction& g, const MatSeries& x) {
    return {g.apply(x.a), g.apply(x.b), g.apply(x.c), g.apply(x.d)};
}

MatSeries mat_scaled(const MatSeries& x, const PAdic& c) {
    return {x.a.scaled(c), x.b.scaled(c), x.c.scaled(c), x.d.scaled(c)};
}

bool mat_agrees(const MatSeries& x, const MatSeries& y, int abs_prec) {
    return x.a.agrees(y.a, abs_prec) && x.b.agrees(y.b, abs_prec) &&
           x.c.agrees(y.c, abs_prec) && x.d.agrees(y.d, abs_prec);
}

namespace {

MatScalar mat_inv_scalar(const MatScalar& x) {
    PAdic det = mat_det(x);
    PAdic dinv = det.inv();
    return {x.d * dinv, -x.b * dinv, -x.c * dinv, x.a * dinv};
}

MatSeries mat_scalar_mul(const MatScalar& s, const MatSeries& m) {
    return {m.a.scaled(s.a) + m.c.scaled(s.b), m.b.scaled(s.a) + m.d.scaled(s.b),
            m.a.scaled(s.c) + m.c.scaled(s.d), m.b.scaled(s.c) + m.d.scaled(s.d)};
}

MatSeries mat_identity_series(int64_t p, int D, int prec) {
    return {PiSeries::one(p, D, prec), PiSeries::zero(p, D),
            PiSeries::zero(p, D), PiSeries::one(p, D, prec)};
}

MatSeries mat_div_series(const MatSeries& x, const PiSeries& den) {
    return {divide_series(x.a, den), divide_series(x.b, den),
            divide_series(x.c, den), divide_series(x.d, den)};
}

PiSeries qk1(const WachContext& ctx) { return ctx.q.pow(ctx.k - 1); }

// Gauss-type order for the ideal (p, pi^{p-1}): multiplication by q raises
// it by p-1, which is the natural scale of the phi-contraction.
int mixed_order(const PiSeries& f, int abs_cap) {
    int64_t p = f.prime();
    int best = kExactPrec;
    for (int d = 0; d <= f.reliable_deg(); ++d) {
        const PAdic& c = f.coeff(d);
        if (c.is_zero() || c.vanishes(abs_cap)) continue;
        best = std::min(best, (static_cast<int>(p) - 1) * c.valuation() + d);
    }
    return best;
}

} // namespace

PiSeries WachContext::lambda_plus_pow() const { return lambda_plus.pow(k - 1); }
PiSeries WachContext::lambda_minus_pow() const { return lambda_minus.pow(k - 1); }

static void fill_common_series(WachContext& c) {
    c.q = series_q(c.p, c.budget.D, c.wprec);
    c.phi_pi = series_phi_pi(c.p, c.budget.D, c.wprec);
    int cutoff = std::max(c.budget.n_max, lambda_auto_cutoff(c.p, c.budget.D, c.wprec - 6));
    c.lambda_plus = series_lambda_plus(c.p, c.budget.D, c.wprec - 6, cutoff);
    c.lambda_minus = series_lambda_minus(c.p, c.budget.D, c.wprec - 6, cutoff + 1);
    c.t_over_pi = series_t_over_pi(c.p, c.budget.D, c.wprec);
}

static void fill_flags(WachContext& c) {
    c.flags.a = (c.k >= 3) || c.ap_is_zero();
    c.flags.d = c.p >= c.k - 1;
    c.flags.b = true;
    for (int j = 1; j <= c.k - 3; ++j) {
        PAdic probe = PAdic::from_int(c.p, 1, c.wprec).shift(j) +
                      PAdic::from_int(c.p, 1, c.wprec).shift(c.k - 2 - j);
        if (c.ap.agrees(probe, std::min(c.ap.abs_prec(), probe.abs_prec()))) c.flags.b = false;
    }
}

WachContext build_context(int64_t p, int k, const PAdic& ap, const PrecisionBudget& budget) {
    if (!ap.is_zero() && ap.valuation() == 0)
        return build_context_ordinary(p, k, ap, budget, nullptr, nullptr);
    WachContext c;
    c.p = p;
    c.k = k;
    c.ap = ap;
    c.mode = WachMode::supersingular;
    c.budget = budget;
    c.wprec = 2 * budget.N + 3 * k + 28 + budget.extra_digits;
    c.m = (k - 2) / (static_cast<int>(p) - 1);
    fill_flags(c);
    c.flags.c = ap.is_zero() || ap.valuation() > c.m;
    if (!c.flags.c)
        throw AssumptionViolated("supersingular context needs v(ap) > floor((k-2)/(p-1))");
    fill_common_series(c);
    c.delta = c.ap.is_zero() ? PAdic::zero(p) : c.ap.shift(-c.m);

    // z: degree <= k-2 truncation of p^m (lambda-/lambda+)^{k-1}, integral
    PiSeries ratio = divide_series(c.lambda_minus, c.lambda_plus);
    PiSeries zfull = ratio.pow(k - 1).scal_shift(c.m);
    c.z = PiSeries(p, budget.D);
    for (int j = 0; j <= k - 2 && j <= budget.D; ++j) {
        PAdic zc = zfull.coeff(j);
        if (!zc.is_zero() && zc.valuation() < 0)
            throw AssumptionViolated("z-polynomial coefficient " + std::to_string(j) + " is not integral");
        c.z.set_coeff(j, zc);
    }

    int D = budget.D;
    PiSeries qq = qk1(c);
    c.P = {PiSeries::zero(p, D), -PiSeries::one(p, D, c.wprec),
           qq, c.z.scaled(c.delta)};
    PAdic one = PAdic::from_int(p, 1, c.wprec);
    c.Aphi = {PAdic::zero(p), -one, one.shift(k - 1), c.ap};
    c.roots = quad_roots(c.ap, k, c.wprec);
    c.Mprime = solve_Mprime(c);
    c.M = matrix_M(c, c.Mprime);
    return c;
}

WachContext build_context_ordinary(int64_t p, int k, const PAdic& ap, const PrecisionBudget& budget,
                                   const PiSeries* star, const PiSeries* unit) {
    if (ap.is_zero() || ap.valuation() != 0)
        throw ConfigError("ordinary context needs a unit ap");
    WachContext c;
    c.p = p;
    c.k = k;
    c.ap = ap;
    c.mode = WachMode::ordinary;
    c.budget = budget;
    c.wprec = 2 * budget.N + 3 * k + 28 + budget.extra_digits;
    c.m = (k - 2) / (static_cast<int>(p) - 1);
    fill_flags(c);
    c.flags.c = true;
    fill_common_series(c);
    c.delta = PAdic::zero(p);
    c.z = PiSeries::zero(p, budget.D);

    int D = budget.D;
    c.roots = quad_roots(ap, k, c.wprec);
    PAdic alpha = c.roots.alpha_padic;
    PAdic beta = c.roots.beta_padic;
    PiSeries star_s = star ? *star : PiSeries::zero(p, D);
    PiSeries unit_s = unit ? *unit : PiSeries::one(p, D, c.wprec);
    if (!eval_at_zero(unit_s).agrees(PAdic::from_int(p, 1, 4), 2))
        throw ConfigError("ordinary context: the supplied unit must have constant term 1");
    // scale the unit so that P(0) equals the crystalline phi-matrix
    PiSeries u_eff = unit_s.scaled(beta.shift(1 - k));
    c.P = {PiSeries::constant(alpha, D), star_s,
           PiSeries::zero(p, D), u_eff * qk1(c)};
    c.Aphi = {alpha, PAdic::zero(p), PAdic::zero(p), beta};
    c.Mprime = solve_Mprime(c);
    c.M = matrix_M(c, c.Mprime);
    return c;
}

std::pair<PiSeries, PiSeries> coleman_generic(const PiSeries& x1, const PiSeries& x2,
                                              const MatSeries& P) {
    MatSeries adjPt = mat_adj(mat_transpose(P));
    PiSeries c1 = x1 * adjPt.a + x2 * adjPt.c - frobenius(x1);
    PiSeries c2 = x1 * adjPt.b + x2 * adjPt.d - frobenius(x2);
    return {c1, c2};
}

std::pair<PiSeries, PiSeries> coleman(const ModuleVec& x, const WachContext& ctx) {
    return coleman_generic(x.x1, x.x2, ctx.P);
}

ModuleVec psi_coords(const ModuleVec& x, const WachContext& ctx) {
    MatSeries adjPt = mat_adj(mat_transpose(ctx.P));
    return {psi(x.x1 * adjPt.a + x.x2 * adjPt.c), psi(x.x1 * adjPt.b + x.x2 * adjPt.d), x.twist};
}

ModuleVec phi_coords(const ModuleVec& x, const WachContext& ctx) {
    MatSeries Pt = mat_transpose(ctx.P);
    PiSeries f1 = frobenius(x.x1), f2 = frobenius(x.x2);
    PiSeries qq = qk1(ctx);
    PiSeries v1 = divide_series(f1 * Pt.a + f2 * Pt.c, qq);
    PiSeries v2 = divide_series(f1 * Pt.b + f2 * Pt.d, qq);
    return {v1, v2, x.twist};
}

ModuleVec nprime_to_coords(const PiSeries& y1, const PiSeries& y2, const WachContext& ctx) {
    MatSeries Pt = mat_transpose(ctx.P);
    PiSeries qq = qk1(ctx);
    PiSeries v1 = divide_series(y1 * Pt.a + y2 * Pt.c, qq);
    PiSeries v2 = divide_series(y1 * Pt.b + y2 * Pt.d, qq);
    return {v1, v2, 0};
}

ModuleVec fixed_point(const PiSeries& y1, const PiSeries& y2, const WachContext& ctx) {
    int tol = ctx.budget.N + 2;
    if (!psi(y1).is_zero_at(tol) || !psi(y2).is_zero_at(tol))
        throw NotInKernelPsi("fixed_point: both inputs must be killed by psi");
    // Work with the pi^{k-1}-rescaled coordinates: for x = pi^{k-1} xt the
    // phi map is xt -> phi(xt-row) P^T with no division at all, so the
    // iteration does not erode tracked precision. The one-time division of
    // the seed by phi(pi)^{k-1} encodes the contraction-domain requirement.
    int wfp = std::min(ctx.wprec, ctx.budget.N + 14);
    int64_t p = ctx.p;
    MatSeries Pt = mat_transpose(ctx.P);
    PiSeries s1 = (y1.cap_rel(wfp) * Pt.a + y2.cap_rel(wfp) * Pt.c).cap_rel(wfp);
    PiSeries s2 = (y1.cap_rel(wfp) * Pt.b + y2.cap_rel(wfp) * Pt.d).cap_rel(wfp);
    PiSeries phik = ctx.phi_pi.pow(ctx.k - 1);
    ModuleVec y0;
    try {
        y0 = ModuleVec{divide_series(s1, phik), divide_series(s2, phik), 0};
    } catch (const NotDivisible&) {
        throw NoConvergence("fixed_point: input lies outside the contraction domain");
    }
    // the iterates contract in the (p, pi^{p-1})-adic sense; stop once the
    // increments reach this order and record the induced coefficient
    // precision of the dropped tail
    int ptail = static_cast<int>(p) - 1;
    int stop_order = (ctx.budget.N + 8) * ptail;
    bool blz = ctx.mode == WachMode::supersingular;
    PiSeries qk1s = ctx.q.pow(ctx.k - 1).cap_rel(wfp);
    PiSeries dz = ctx.z.scaled(ctx.delta).cap_rel(wfp);
    ModuleVec x = y0;
    int cap = (2 * stop_order) / std::max(1, (ctx.k - 1) * ptail) + 48;
    int last_score = -kExactPrec;
    int stall = 0;
    for (int it = 0; it < cap; ++it) {
        PiSeries f1 = frobenius(x.x1), f2 = frobenius(x.x2);
        ModuleVec xn;
        if (blz) {
            // P^T = [[0, q^{k-1}], [-1, delta z]]
            xn = ModuleVec{y0.x1 - f2, y0.x2 + f1 * qk1s + f2 * dz, 0};
        } else {
            xn = ModuleVec{y0.x1 + f1 * Pt.a + f2 * Pt.c, y0.x2 + f1 * Pt.b + f2 * Pt.d, 0};
        }
        PiSeries d1 = xn.x1 - x.x1;
        PiSeries d2 = xn.x2 - x.x2;
        int score = std::min(mixed_order(d1, ctx.budget.N + 6), mixed_order(d2, ctx.budget.N + 6));
        if (score >= stop_order) {
            // cap coefficient precision by the size of the dropped tail
            for (ModuleVec* v : {&xn}) {
                for (PiSeries* comp : {&v->x1, &v->x2}) {
                    for (int d = 0; d <= comp->trunc_deg(); ++d) {
                        int bound = (stop_order - d) / ptail;
                        if (comp->coeff(d).abs_prec() > bound)
                            comp->set_coeff(d, comp->coeff(d).cap_abs(bound));
                    }
                }
            }
            return {xn.x1.shifted(ctx.k - 1), xn.x2.shifted(ctx.k - 1), 0};
        }
        if (score <= last_score) {
            if (++stall > 2 * ptail + 12)
                throw NoConvergence("fixed_point: increment norms stopped decreasing (order " +
                                    std::to_string(score) + ")");
        } else {
            stall = 0;
            last_score = score;
        }
        x = xn;
    }
    throw NoConvergence("fixed_point: iteration cap reached");
}

MatSeries solve_Mprime_ordinary(const WachContext& ctx) {
    int64_t p = ctx.p;
    int D = ctx.budget.D;
    PAdic alpha = ctx.Aphi.a, beta = ctx.Aphi.d;
    const PiSeries& s = ctx.P.b;
    if (!eval_at_zero(s).vanishes(ctx.budget.N))
        throw ConfigError("ordinary star entry must vanish at pi = 0");
    // m22 = prod_j phi^j(u q^{k-1}) / beta
    PiSeries factor = ctx.P.d.scaled(beta.inv());
    PiSeries m22 = factor;
    for (int j = 1; j < 2 * ctx.wprec + 16; ++j) {
        factor = frobenius(factor);
        PiSeries nxt = m22 * factor;
        if (nxt.agrees(m22, ctx.wprec - 4)) { m22 = nxt; break; }
        m22 = nxt;
    }
    // degreewise solve for m21
    PiSeries rhs = s * frobenius(m22);
    PiSeries m21(p, D);
    // K[e] = coefficients of phi(pi)^e
    std::vector<PiSeries> K;
    K.push_back(PiSeries::one(p, D, ctx.wprec));
    for (int e = 1; e <= D; ++e) K.push_back(K.back() * ctx.phi_pi);
    std::vector<PAdic> c(static_cast<size_t>(D) + 1, PAdic::zero(p));
    for (int d = 0; d <= D; ++d) {
        PAdic acc = rhs.coeff(d);
        for (int e = 0; e < d; ++e) {
            const PAdic& ce = c[static_cast<size_t>(e)];
            if (ce.is_zero() && ce.abs_prec() >= kExactPrec) continue;
            acc = acc + alpha * ce * K[static_cast<size_t>(e)].coeff(d);
        }
        PAdic den = beta - alpha * PAdic::from_int(p, 1, ctx.wprec).shift(d);
        if (den.is_zero())
            throw SolveFailed("ordinary Mprime: resonant denominator at degree " + std::to_string(d));
        c[static_cast<size_t>(d)] = acc / den;
        m21.set_coeff(d, c[static_cast<size_t>(d)]);
    }
    return {PiSeries::one(p, D, ctx.wprec), PiSeries::zero(p, D), m21, m22};
}

MatSeries solve_Mprime(const WachContext& ctx) {
    int64_t p = ctx.p;
    int tol = ctx.budget.N + 4;
    if (ctx.mode == WachMode::ordinary) {
        MatSeries cur = solve_Mprime_ordinary(ctx);
        MatSeries lhs = mat_mul(mat_frobenius(cur), mat_transpose(ctx.P));
        MatSeries rhs = mat_scalar_mul(mat_transpose(ctx.Aphi), cur);
        if (!mat_agrees(lhs, rhs, ctx.budget.N))
            throw SolveFailed("solve_Mprime: intertwining relation fails (ordinary)");
        PiSeries det = mat_det(cur);
        PiSeries unitpart = divide_series(det, ctx.t_over_pi.pow(ctx.k - 1));
        PAdic u0 = eval_at_zero(unitpart);
        if (u0.is_zero() || u0.valuation() != 0)
            throw SolveFailed("solve_Mprime: determinant has the wrong elementary divisors (ordinary)");
        return cur;
    }
    MatSeries Pt = mat_transpose(ctx.P);
    MatScalar AinvT = mat_inv_scalar(mat_transpose(ctx.Aphi));
    MatSeries R = Pt;       // phi^{n-1}(P^T) ... P^T
    MatSeries W = Pt;       // phi^{n-1}(P^T)
    MatScalar An = AinvT;   // (A^T)^{-n}
    MatSeries cur = mat_scalar_mul(An, R);
    int ptail = static_cast<int>(p) - 1;
    // enough mixed-order resolution for the class reductions mod
    // phi(pi)^X and the tower evaluations downstream
    int stop_order = (ctx.budget.N + 6 + 2 * ctx.budget.X) * ptail + 2 * (ctx.k - 1) + 8;
    int cap = 2 * stop_order / std::max(1, ctx.k - 1) + 40;
    for (int n = 1; n <= cap; ++n) {
        W = mat_frobenius(W);
        R = mat_mul(W, R);
        An = mat_mul(AinvT, An);
        MatSeries nxt = mat_scalar_mul(An, R);
        MatSeries diff{nxt.a - cur.a, nxt.b - cur.b, nxt.c - cur.c, nxt.d - cur.d};
        int score = std::min(std::min(mixed_order(diff.a, tol), mixed_order(diff.b, tol)),
                             std::min(mixed_order(diff.c, tol), mixed_order(diff.d, tol)));
        if (score >= stop_order) {
            // cap coefficient precision by the size of the dropped tail
            for (PiSeries* e : {&nxt.a, &nxt.b, &nxt.c, &nxt.d})
                for (int d = 0; d <= e->trunc_deg(); ++d) {
                    int bound = (stop_order - d) / ptail;
                    if (e->coeff(d).abs_prec() > bound) e->set_coeff(d, e->coeff(d).cap_abs(bound));
                }
            cur = nxt;
            PAdic one = PAdic::from_int(p, 1, ctx.wprec);
            if (!eval_at_zero(cur.a).agrees(one, ctx.budget.N) ||
                !eval_at_zero(cur.d).agrees(one, ctx.budget.N) ||
                !eval_at_zero(cur.b).vanishes(ctx.budget.N) ||
                !eval_at_zero(cur.c).vanishes(ctx.budget.N))
                throw SolveFailed("solve_Mprime: limit is not normalized at pi = 0");
            MatSeries lhs = mat_mul(mat_frobenius(cur), Pt);
            MatSeries rhs = mat_scalar_mul(mat_transpose(ctx.Aphi), cur);
            if (!mat_agrees(lhs, rhs, ctx.budget.N))
                throw SolveFailed("solve_Mprime: intertwining relation fails at the requested precision");
            PiSeries det = mat_det(cur);
            PiSeries unit = divide_series(det, ctx.t_over_pi.pow(ctx.k - 1));
            PAdic u0 = eval_at_zero(unit);
            if (u0.is_zero() || u0.valuation() != 0)
                throw SolveFailed("solve_Mprime: determinant has the wrong elementary divisors");
            return cur;
        }
        cur = nxt;
    }
    throw NoConvergence("solve_Mprime: no stabilization after " + std::to_string(cap) +
                        " iterations (each step costs about k-1 digits)");
}

MatSeries matrix_M(const WachContext& ctx, const MatSeries& Mprime) {
    PiSeries det = mat_det(Mprime);
    MatSeries adj = mat_adj(Mprime);
    PiSeries s = divide_series(ctx.t_over_pi, ctx.q).pow(ctx.k - 1);
    MatSeries num = mat_mul(mat_transpose(ctx.P), adj);
    MatSeries M = mat_div_series({num.a * s, num.b * s, num.c * s, num.d * s}, det);
    // congruence: p^{k-1} M = Aphi^T mod phi(pi); vanishing at pi = 0 and at
    // the primitive level-1 points detects divisibility by phi(pi)
    MatScalar At = mat_transpose(ctx.Aphi);
    int tol = ctx.budget.N - 2;
    auto check_entry = [&](const PiSeries& e, const PAdic& target) {
        PiSeries scaled = e.scal_shift(ctx.k - 1);
        if (!eval_at_zero(scaled).agrees(target, tol))
            throw SolveFailed("matrix_M: congruence fails at pi = 0");
        CycElt ev = eval_series_balanced(scaled, 1, std::max(1, ctx.budget.tower));
        CycElt tgt = CycElt::scalar(ctx.p, 1, target);
        int etol = tol;
        for (const auto& cc : ev.coords())
            if (cc.abs_prec() < kExactPrec) etol = std::min(etol, cc.abs_prec() - 1);
        if (!ev.agrees(tgt, std::max(2, etol)))
            throw SolveFailed("matrix_M: congruence fails at the level-1 points");
    };
    check_entry(M.a, At.a);
    check_entry(M.b, At.b);
    if (ctx.mode == WachMode::supersingular) {
        // user-supplied ordinary (star, u) data does not pin the (2,1)
        // entry, so the congruence is only a theorem in this mode
        check_entry(M.c, At.c);
    }
    check_entry(M.d, At.d);
    return M;
}

MatSeries wach_gamma_matrix(const WachContext& ctx, const GammaAction& g) {
    if (!ctx.family_supported())
        throw UnsupportedFamily("gamma matrix only available for ap = 0 or k = 2");
    // solve g(Mprime) G^T = Mprime degreewise; the constant term of g(Mprime)
    // is the identity, so the recursion never divides
    MatSeries gM = mat_apply(g, ctx.Mprime);
    int64_t p = ctx.p;
    int D = ctx.budget.D;
    int dr = std::min({gM.a.reliable_deg(), gM.d.reliable_deg(), ctx.Mprime.a.reliable_deg()});
    auto at = [&](const MatSeries& m, int d) {
        return MatScalar{m.a.coeff(d), m.b.coeff(d), m.c.coeff(d), m.d.coeff(d)};
    };
    std::vector<MatScalar> G(static_cast<size_t>(dr) + 1);
    for (int d = 0; d <= dr; ++d) {
        MatScalar acc = at(ctx.Mprime, d);
        for (int e = 0; e < d; ++e) {
            MatScalar prod = mat_mul(at(gM, d - e), G[static_cast<size_t>(e)]);
            acc = {acc.a - prod.a, acc.b - prod.b, acc.c - prod.c, acc.d - prod.d};
        }
        G[static_cast<size_t>(d)] = acc;
    }
    MatSeries Gt{PiSeries(p, D), PiSeries(p, D), PiSeries(p, D), PiSeries(p, D)};
    for (int d = 0; d <= dr; ++d) {
        Gt.a.set_coeff(d, G[static_cast<size_t>(d)].a);
        Gt.b.set_coeff(d, G[static_cast<size_t>(d)].b);
        Gt.c.set_coeff(d, G[static_cast<size_t>(d)].c);
        Gt.d.set_coeff(d, G[static_cast<size_t>(d)].d);
    }
    Gt.a = Gt.a.with_reliable(dr);
    Gt.b = Gt.b.with_reliable(dr);
    Gt.c = Gt.c.with_reliable(dr);
    Gt.d = Gt.d.with_reliable(dr);
    return mat_transpose(Gt);
}

ModuleVec gamma_on_module(const ModuleVec& x, const WachContext& ctx, const GammaAction& g) {
    // coords(g x) = (g x1, g x2) * chi^{k-1} (pi/g(pi))^{k-1} G_g^T
    MatSeries G = wach_gamma_matrix(ctx, g);
    MatSeries Gt = mat_transpose(G);
    int64_t p = ctx.p;
    int D = ctx.budget.D;
    PiSeries gpi = g.apply(PiSeries::pi(p, D, ctx.wprec));
    PiSeries ratio = divide_series(PiSeries::pi(p, D, ctx.wprec), gpi).pow(ctx.k - 1);
    PAdic chik = g.chi().pow(ctx.k - 1);
    PiSeries g1 = g.apply(x.x1), g2 = g.apply(x.x2);
    PiSeries v1 = (g1 * Gt.a + g2 * Gt.c) * ratio;
    PiSeries v2 = (g1 * Gt.b + g2 * Gt.d) * ratio;
    return {v1.scaled(chik), v2.scaled(chik), x.twist};
}

MatSeries nprime_gamma_matrix(const WachContext& ctx, const GammaAction& g) {
    // H_g = chi^{k-1} phi((pi/g(pi))^{k-1} G_g^T): the action on coordinates
    // against the phi-twisted basis
    MatSeries G = wach_gamma_matrix(ctx, g);
    MatSeries Gt = mat_transpose(G);
    int64_t p = ctx.p;
    int D = ctx.budget.D;
    PiSeries gpi = g.apply(PiSeries::pi(p, D, ctx.wprec));
    PiSeries ratio = divide_series(PiSeries::pi(p, D, ctx.wprec), gpi).pow(ctx.k - 1);
    MatSeries scaled{Gt.a * ratio, Gt.b * ratio, Gt.c * ratio, Gt.d * ratio};
    MatSeries H = mat_frobenius(scaled);
    return mat_scaled(H, g.chi().pow(ctx.k - 1));
}

MatIwasawa sprung_product_A(const WachContext& ctx, int n, int i, int X) {
    if (ctx.k != 2) throw UnsupportedFamily("Sprung matrices are a weight-2 construction");
    int64_t p = ctx.p;
    int prec = ctx.wprec;
    auto cnst = [&](const PAdic& c) {
        IwasawaElement e(p, X, c.is_zero() || c.valuation() >= 0);
        e.set_coeff(0, 0, c);
        return e;
    };
    MatIwasawa acc{cnst(PAdic::from_int(p, 1, prec)), cnst(PAdic::zero(p)),
                   cnst(PAdic::zero(p)), cnst(PAdic::from_int(p, 1, prec))};
    for (int m = 1; m <= n; ++m) {
        MatIwasawa F{cnst(PAdic::zero(p)), cyc_poly_gamma(p, m, X, prec),
                     cnst(PAdic::from_int(p, -1, prec)), cnst(ctx.ap)};
        acc = mat_mul(F, acc);
    }
    MatScalar C{PAdic::zero(p), PAdic::from_int(p, 1, prec).shift(1),
                PAdic::from_int(p, -1, prec), ctx.ap};
    MatScalar Cpow{PAdic::from_int(p, 1, prec), PAdic::zero(p), PAdic::zero(p), PAdic::from_int(p, 1, prec)};
    MatScalar Cbase = i >= 0 ? C : mat_inv_scalar(C);
    for (int t = 0; t < std::abs(i); ++t) Cpow = mat_mul(Cpow, Cbase);
    MatIwasawa Cm{cnst(Cpow.a), cnst(Cpow.b), cnst(Cpow.c), cnst(Cpow.d)};
    return mat_mul(Cm, acc);
}

static MatSeries sprung_B_impl(const WachContext& ctx, int n, int i) {
    int64_t p = ctx.p;
    int D = ctx.budget.D;
    int prec = ctx.wprec;
    MatSeries acc = mat_identity_series(p, D, prec);
    for (int m = 1; m <= n; ++m) {
        MatSeries F{PiSeries::zero(p, D), series_cyc_poly(p, m, D, prec),
                    -PiSeries::one(p, D, prec), PiSeries::constant(ctx.ap, D)};
        acc = mat_mul(F, acc);
    }
    MatScalar C{PAdic::zero(p), PAdic::from_int(p, 1, prec).shift(1),
                PAdic::from_int(p, -1, prec), ctx.ap};
    MatScalar Cpow{PAdic::from_int(p, 1, prec), PAdic::zero(p), PAdic::zero(p), PAdic::from_int(p, 1, prec)};
    MatScalar Cbase = i >= 0 ? C : mat_inv_scalar(C);
    for (int t = 0; t < std::abs(i); ++t) Cpow = mat_mul(Cpow, Cbase);
    return mat_scalar_mul(Cpow, acc);
}

MatSeries sprung_product_B(const WachContext& ctx, int n, int i) {
    if (ctx.k != 2) throw UnsupportedFamily("Sprung matrices are a weight-2 construction");
    return sprung_B_impl(ctx, n, i);
}

MatSeries sprung_limit_B(const WachContext& ctx, int i) {
    if (ctx.k != 2) throw UnsupportedFamily("Sprung matrices are a weight-2 construction");
    int64_t p = ctx.p;
    int D = ctx.budget.D;
    int prec = ctx.wprec;
    int tol = ctx.budget.N + 2;
    MatScalar C{PAdic::zero(p), PAdic::from_int(p, 1, prec).shift(1),
                PAdic::from_int(p, -1, prec), ctx.ap};
    MatScalar Cinv = mat_inv_scalar(C);
    MatScalar Cpow{PAdic::from_int(p, 1, prec), PAdic::zero(p), PAdic::zero(p), PAdic::from_int(p, 1, prec)};
    MatScalar Cbase = i >= 1 ? C : Cinv;
    for (int t = 0; t < std::abs(i - 1); ++t) Cpow = mat_mul(Cpow, Cbase);
    // running product F_n ... F_1 and normalization C^{i-n}
    MatSeries prod = mat_identity_series(p, D, prec);
    MatSeries cur = prod;
    int ptail = static_cast<int>(p) - 1;
    int stop_order = (ctx.budget.N + 6 + 2 * ctx.budget.X) * ptail + 10;
    int cap = 2 * stop_order + 40;
    for (int n = 1; n <= cap; ++n) {
        MatSeries F{PiSeries::zero(p, D), series_cyc_poly(p, n, D, prec),
                    -PiSeries::one(p, D, prec), PiSeries::constant(ctx.ap, D)};
        prod = mat_mul(F, prod);
        if (n > 1) Cpow = mat_mul(Cpow, Cinv);
        MatSeries nxt = mat_scalar_mul(Cpow, prod);
        if (n > 1) {
            MatSeries diff{nxt.a - cur.a, nxt.b - cur.b, nxt.c - cur.c, nxt.d - cur.d};
            int score = std::min(std::min(mixed_order(diff.a, tol), mixed_order(diff.b, tol)),
                                 std::min(mixed_order(diff.c, tol), mixed_order(diff.d, tol)));
            if (score >= stop_order) {
                for (PiSeries* e : {&nxt.a, &nxt.b, &nxt.c, &nxt.d})
                    for (int d = 0; d <= e->trunc_deg(); ++d) {
                        int bound = (stop_order - d) / ptail;
                        if (e->coeff(d).abs_prec() > bound) e->set_coeff(d, e->coeff(d).cap_abs(bound));
                    }
                return nxt;
            }
        }
        cur = nxt;
    }
    throw NoConvergence("sprung_limit_B: no stabilization");
}

KernelReport kernel_conditions(const ModuleVec& x, const WachContext& ctx, int which, int n) {
    if (!ctx.ap_is_zero()) throw UnsupportedFamily("kernel conditions are stated for ap = 0");
    if (n > ctx.budget.tower) throw LevelTooLarge("kernel_conditions: level beyond tower height");
    int64_t p = ctx.p;
    PiSeries f = which == 1 ? x.x1 * ctx.lambda_minus_pow() : x.x2 * ctx.lambda_plus_pow();
    PAdic pk2 = PAdic::from_int(p, 1, ctx.wprec).shift(2 - ctx.k);
    KernelReport rep;
    for (int lev = 1; lev <= n; ++lev) {
        bool ok;
        if (lev == 1) {
            CycElt tr = rel_trace(eval_series_balanced(f, 1, ctx.budget.tower), 0, ctx.budget.tower);
            PAdic lhs = tr.coord(0);
            PAdic rhs = -(PAdic::from_int(p, 1, ctx.wprec) + pk2) * eval_at_zero(f);
            int tol = std::max(2, std::min({ctx.budget.N, lhs.abs_prec(), rhs.abs_prec()}) - 1);
            ok = lhs.agrees(rhs, tol);
        } else {
            CycElt lhs = rel_trace(eval_series_balanced(f, lev, ctx.budget.tower), lev - 1, ctx.budget.tower);
            CycElt low = lev - 2 == 0 ? CycElt::scalar(p, 0, eval_at_zero(f))
                                      : eval_series_balanced(f, lev - 2, ctx.budget.tower);
            CycElt rhs = low.embed(lev - 1).scaled(-pk2);
            int tol = ctx.budget.N;
            for (const auto& c : lhs.coords())
                if (c.abs_prec() < kExactPrec) tol = std::min(tol, c.abs_prec() - 1);
            for (const auto& c : rhs.coords())
                if (c.abs_prec() < kExactPrec) tol = std::min(tol, c.abs_prec() - 1);
            ok = lhs.agrees(rhs, std::max(2, tol));
        }
        rep.levels.emplace_back(lev, ok);
        rep.all = rep.all && ok;
    }
    return rep;
}

OrdinaryPackage ordinary_package(const WachContext& ctx, const PiSeries& star, const PiSeries& unit) {
    if (ctx.mode != WachMode::ordinary) throw ConfigError("ordinary_package needs an ordinary context");
    WachContext c2 = build_context_ordinary(ctx.p, ctx.k, ctx.ap, ctx.budget, &star, &unit);
    int tol = ctx.budget.N - 2;
    // Mprime lower triangular with diagonal (1, (t/pi)^{k-1} * unit)
    if (!c2.Mprime.b.is_zero_at(tol))
        throw ShapeViolation("ordinary package: Mprime is not lower triangular at precision");
    if (!c2.Mprime.a.agrees(PiSeries::one(ctx.p, ctx.budget.D, c2.wprec), tol))
        throw ShapeViolation("ordinary package: Mprime(1,1) is not 1");
    PiSeries unit22 = divide_series(c2.Mprime.d, c2.t_over_pi.pow(ctx.k - 1));
    PAdic u0 = eval_at_zero(unit22);
    if (u0.is_zero() || u0.valuation() != 0)
        throw ShapeViolation("ordinary package: Mprime(2,2) is not a unit multiple of (t/pi)^{k-1}");
    // M = [[alpha (t/(pi q))^{k-1}, 0], [*, u]]
    if (!c2.M.b.is_zero_at(tol))
        throw ShapeViolation("ordinary package: M(1,2) does not vanish");
    PiSeries expect11 = divide_series(c2.t_over_pi, c2.q).pow(ctx.k - 1).scaled(c2.roots.alpha_padic);
    if (!c2.M.a.agrees(expect11, tol - (ctx.k - 1)))
        throw ShapeViolation("ordinary package: M(1,1) is not alpha (t/(pi q))^{k-1}");
    return {c2.P, c2.Mprime, c2.M};
}

// x1 = sum_{i>=1} (-1)^i phi^{2i-1}(w)/(q phi^2(q)...phi^{2i-2}(q)),
// x2 = w + sum phi(terms of x1); the denominators telescope so that
// x2 - phi(x1) = w. Needs pi | w only.
static ModuleVec telescope_series(const PiSeries& w, const WachContext& ctx) {
    if (!eval_at_zero(w).vanishes(ctx.budget.N + 2))
        throw ConfigError("telescoping series: input must be divisible by pi");
    // With w = pi wt and t^{(i)} = pi tt^{(i)} the recursion
    // t^{(i+1)} = -phi^2(t^{(i)})/q becomes tt -> -phi(q) phi^2(tt),
    // which needs no division at all.
    int wfp = std::min(ctx.wprec, ctx.budget.N + 14);
    int64_t p = ctx.p;
    int ptail = static_cast<int>(p) - 1;
    int stop_order = (ctx.budget.N + 8) * ptail;
    PiSeries wt = divide_series(w.cap_rel(wfp), PiSeries::pi(ctx.p, ctx.budget.D, wfp));
    PiSeries phiq = frobenius(ctx.q).cap_rel(wfp);
    PiSeries tt = -frobenius(wt);
    PiSeries sum_t = tt;
    PiSeries sum_phi_t = frobenius(tt);
    int cap = 2 * stop_order + 48;
    for (int i = 1; i <= cap; ++i) {
        if (i == cap) throw NoConvergence("telescoping series did not settle");
        tt = -(phiq * frobenius(frobenius(tt)));
        if (mixed_order(tt, ctx.budget.N + 6) >= stop_order) break;
        sum_t = sum_t + tt;
        sum_phi_t = sum_phi_t + frobenius(tt);
    }
    auto cap_tail = [&](PiSeries f) {
        for (int d = 0; d <= f.trunc_deg(); ++d) {
            int bound = (stop_order - d) / ptail;
            if (f.coeff(d).abs_prec() > bound) f.set_coeff(d, f.coeff(d).cap_abs(bound));
        }
        return f;
    };
    PiSeries x1 = cap_tail(sum_t.shifted(1));
    PiSeries x2 = cap_tail(w.cap_rel(wfp) + (ctx.q * sum_phi_t).shifted(1));
    return {x1, x2, 0};
}

ModuleVec plus_image_preimage(const PiSeries& y, const WachContext& ctx) {
    if (ctx.k != 2 || !ctx.ap_is_zero())
        throw UnsupportedFamily("plus_image_preimage is the k = 2, ap = 0 construction");
    if (!psi(y).is_zero_at(ctx.budget.N + 2))
        throw NotInKernelPsi("plus_image_preimage: input must be killed by psi");
    return telescope_series(y, ctx);
}

std::pair<ModuleVec, PiSeries> plus_image_unit_preimage(const WachContext& ctx, const PiSeries& g) {
    if (ctx.k != 2 || !ctx.ap_is_zero())
        throw UnsupportedFamily("plus_image_unit_preimage is the k = 2, ap = 0 construction");
    int64_t p = ctx.p;
    int D = ctx.budget.D;
    PiSeries oneplus = PiSeries::one(p, D, ctx.wprec) + PiSeries::pi(p, D, ctx.wprec);
    PiSeries y = -oneplus.pow(static_cast<int>(p) + 1) +
                 oneplus * frobenius(PiSeries::pi(p, D, ctx.wprec) * g);
    // w = (1+pi)^p + y is divisible by pi; psi(w) = 1+pi feeds the
    // half-correction terms below
    PiSeries w = oneplus.pow(static_cast<int>(p)) + y;
    ModuleVec base = telescope_series(w, ctx);
    PAdic half = PAdic::from_ratio(p, 1, 2, ctx.wprec);
    PiSeries z1 = (oneplus + base.x1).scaled(half);
    PiSeries z2 = (-oneplus + base.x2).scaled(half);
    PiSeries col1 = (y - oneplus).scaled(half);
    return {ModuleVec{z1, z2, 0}, col1};
}

std::pair<PAdic, bool> delta_invariant_reduction(const PiSeries& y, int prec) {
    int64_t p = y.prime();
    PAdic c = eval_at_zero(y) / PAdic::from_int(p, static_cast<int>(p) - 1, prec + 4);
    CycElt ev = eval_series_at_level(y, 1);
    CycElt expect = CycElt::scalar(p, 1, -c);
    int tol = prec;
    for (const auto& x : ev.coords())
        if (x.abs_prec() < kExactPrec) tol = std::min(tol, x.abs_prec() - 1);
    return {c, ev.agrees(expect, std::max(2, tol))};
}

bool in_graded_ideal(const PiSeries& h, int r, int abs_prec) {
    if (!h.coeff(0).vanishes(abs_prec)) return false;
    for (int s = 1; s <= r - 1; ++s)
        if (!h.coeff(s).vanishes(std::min(abs_prec, r - s))) return false;
    if (r <= h.trunc_deg() && !h.coeff(r).vanishes(std::min(abs_prec, 1))) return false;
    return true;
}

} // namespace wach
