#include "wach/transform.hpp"

#include <algorithm>

namespace wach {

namespace {

PiSeries extract_grade_h(const PiSeries& y, int grade, int prec) {
    // y's grade-j part is (1+pi)^j phi(h); psi((1+pi)^{p-j} y) = h
    int64_t p = y.prime();
    PiSeries oneplus = PiSeries::one(p, y.trunc_deg(), prec) + PiSeries::pi(p, y.trunc_deg(), prec);
    return psi(oneplus.pow(static_cast<int>(p) - grade) * y);
}

} // namespace

IwasawaTransform::IwasawaTransform(const WachContext& ctx, int X, int prec)
    : ctx_(&ctx), X_(X), prec_(prec) {
    if (!ctx.family_supported())
        throw UnsupportedFamily("Iwasawa transform needs ap = 0 or k = 2");
    int64_t p = ctx.p;
    if (ctx.budget.D < static_cast<int>(p) * (X + 3))
        throw ConfigError("IwasawaTransform: series degree too small for the truncation");
    // the order reduction only reads low pi-degrees, so work in a short,
    // extra-precise copy of the context (the gamma-matrix recursion
    // amplifies coefficient denominators degree by degree)
    PrecisionBudget b2 = ctx.budget;
    b2.D = std::min(ctx.budget.D, static_cast<int>(p) * (X + 6));
    b2.extra_digits = ctx.budget.extra_digits + b2.D + 16;
    ctx2_ = std::make_shared<WachContext>(build_context(p, ctx.k, ctx.ap, b2));
    int D = b2.D;
    hdeg_ = X + 2;
    int out_prec = ctx2_->wprec;
    int nbig = out_prec + factorial_valuation(p, D) + 8;
    gamma_ = std::make_shared<GammaAction>(p, D, PAdic::from_int(p, 1 + static_cast<int>(p), nbig), out_prec);
    delta_ = std::make_shared<GammaAction>(p, D, teichmuller(p, delta_generator(p), nbig), out_prec);
    MatSeries Hg = nprime_gamma_matrix(*ctx2_, *gamma_);
    MatSeries Hd = nprime_gamma_matrix(*ctx2_, *delta_);

    uint32_t r = delta_generator(p);
    grade_of_a_.assign(static_cast<size_t>(p - 1), 1);
    uint32_t cur = 1;
    for (int a = 0; a < static_cast<int>(p) - 1; ++a) {
        grade_of_a_[static_cast<size_t>(a)] = static_cast<int>(cur);
        cur = static_cast<uint32_t>((static_cast<uint64_t>(cur) * r) % static_cast<uint64_t>(p));
    }

    PiSeries oneplus = PiSeries::one(p, D, out_prec) + PiSeries::pi(p, D, out_prec);
    e_.assign(2, std::vector<std::vector<Entry>>(static_cast<size_t>(p - 1)));
    for (int i = 0; i < 2; ++i) {
        // Gamma-orbit first: (gamma-1)^l of the basis seed
        std::vector<std::pair<PiSeries, PiSeries>> orbit;
        PiSeries c1 = i == 0 ? oneplus : PiSeries::zero(p, D);
        PiSeries c2 = i == 0 ? PiSeries::zero(p, D) : oneplus;
        orbit.emplace_back(c1, c2);
        for (int l = 1; l < X; ++l) {
            PiSeries g1 = gamma_->apply(c1), g2 = gamma_->apply(c2);
            PiSeries n1 = g1 * Hg.a + g2 * Hg.c - c1;
            PiSeries n2 = g1 * Hg.b + g2 * Hg.d - c2;
            c1 = n1;
            c2 = n2;
            orbit.emplace_back(c1, c2);
        }
        // then the delta-orbit of each
        for (int a = 0; a < static_cast<int>(p) - 1; ++a) {
            auto& slot = e_[static_cast<size_t>(i)][static_cast<size_t>(a)];
            slot.resize(static_cast<size_t>(X));
            for (int l = 0; l < X; ++l) {
                Entry en;
                en.c1 = orbit[static_cast<size_t>(l)].first;
                en.c2 = orbit[static_cast<size_t>(l)].second;
                en.h1 = extract_grade_h(en.c1, grade_of_a_[static_cast<size_t>(a)], out_prec).poly_truncate(hdeg_).resized(hdeg_);
                en.h2 = extract_grade_h(en.c2, grade_of_a_[static_cast<size_t>(a)], out_prec).poly_truncate(hdeg_).resized(hdeg_);
                // the twisted leading coefficient is tau^l times a unit
                PAdic lead = (i == 0 ? en.h1 : en.h2).coeff(l);
                if (lead.is_zero() || lead.valuation() != 0)
                    throw SolveFailed("IwasawaTransform: basis entry has a non-unit leading coefficient");
                en.lead_inv = lead.inv();
                slot[static_cast<size_t>(l)] = std::move(en);
            }
            if (a + 1 < static_cast<int>(p) - 1) {
                // advance the orbit by one delta
                for (int l = 0; l < X; ++l) {
                    PiSeries g1 = delta_->apply(orbit[static_cast<size_t>(l)].first);
                    PiSeries g2 = delta_->apply(orbit[static_cast<size_t>(l)].second);
                    orbit[static_cast<size_t>(l)].first = g1 * Hd.a + g2 * Hd.c;
                    orbit[static_cast<size_t>(l)].second = g1 * Hd.b + g2 * Hd.d;
                }
            }
        }
    }
}

const PiSeries& IwasawaTransform::basis_coord(int i, int a, int l, int component) const {
    const Entry& en = e_[static_cast<size_t>(i)][static_cast<size_t>(a)][static_cast<size_t>(l)];
    return component == 0 ? en.c1 : en.c2;
}

std::pair<PiSeries, PiSeries> IwasawaTransform::apply_basis(const IwasawaElement& z1,
                                                            const IwasawaElement& z2) const {
    int64_t p = ctx_->p;
    int D = ctx2_->budget.D;
    PiSeries Y1(p, D), Y2(p, D);
    const IwasawaElement* zs[2] = {&z1, &z2};
    for (int i = 0; i < 2; ++i) {
        for (int a = 0; a < static_cast<int>(p) - 1; ++a) {
            for (int l = 0; l < std::min(X_, zs[i]->trunc() + 1); ++l) {
                const PAdic& c = zs[i]->coeff(a, l);
                if (c.is_zero() && c.abs_prec() >= kExactPrec) continue;
                const Entry& en = e_[static_cast<size_t>(i)][static_cast<size_t>(a)][static_cast<size_t>(l)];
                Y1 = Y1 + en.c1.scaled(c);
                Y2 = Y2 + en.c2.scaled(c);
            }
        }
    }
    return {Y1, Y2};
}

std::pair<IwasawaElement, IwasawaElement> IwasawaTransform::transform(const PiSeries& Yin1,
                                                                      const PiSeries& Yin2) const {
    int64_t p = ctx_->p;
    int tolpsi = prec_;
    PiSeries Y1 = Yin1.resized(ctx2_->budget.D);
    PiSeries Y2 = Yin2.resized(ctx2_->budget.D);
    if (!psi(Y1).is_zero_at(tolpsi) || !psi(Y2).is_zero_at(tolpsi))
        throw NotInKernelPsi("iwasawa transform: coordinates must be killed by psi");
    int content = std::min({0, Y1.min_coeff_valuation(), Y2.min_coeff_valuation()});
    PiSeries W1 = content < 0 ? Y1.scal_shift(-content) : Y1;
    PiSeries W2 = content < 0 ? Y2.scal_shift(-content) : Y2;

    // graded state: h[i][a], short series in pi
    std::vector<std::vector<PiSeries>> h(2, std::vector<PiSeries>(static_cast<size_t>(p - 1)));
    for (int a = 0; a < static_cast<int>(p) - 1; ++a) {
        h[0][static_cast<size_t>(a)] =
            extract_grade_h(W1, grade_of_a_[static_cast<size_t>(a)], prec_ + 10).poly_truncate(hdeg_).resized(hdeg_);
        h[1][static_cast<size_t>(a)] =
            extract_grade_h(W2, grade_of_a_[static_cast<size_t>(a)], prec_ + 10).poly_truncate(hdeg_).resized(hdeg_);
    }

    IwasawaElement z1(p, X_ - 1, true), z2(p, X_ - 1, true);
    int passes = prec_ + std::max(0, -content) + 2;
    for (int s = 0; s < passes; ++s) {
        bool all_dead = true;
        for (auto& row : h)
            for (auto& hs : row)
                if (!hs.is_zero_at(prec_ + 2)) all_dead = false;
        if (all_dead) break;
        for (int l = 0; l < X_; ++l) {
            for (int i = 0; i < 2; ++i) {
                for (int a = 0; a < static_cast<int>(p) - 1; ++a) {
                    PAdic craw = h[static_cast<size_t>(i)][static_cast<size_t>(a)].coeff(l);
                    if (craw.is_zero() || craw.vanishes(prec_ + 2)) continue;
                    // subtract c * e_{i,a,l} from the graded state, with c
                    // normalized by the entry's own leading coefficient
                    const Entry& en = e_[static_cast<size_t>(i)][static_cast<size_t>(a)][static_cast<size_t>(l)];
                    PAdic c = craw * en.lead_inv;
                    h[0][static_cast<size_t>(a)] = h[0][static_cast<size_t>(a)] - en.h1.scaled(c);
                    h[1][static_cast<size_t>(a)] = h[1][static_cast<size_t>(a)] - en.h2.scaled(c);
                    (i == 0 ? z1 : z2).add_term(a, l, c.shift(s));
                }
            }
        }
        // everything of order < X must now be divisible by p
        for (int i = 0; i < 2; ++i)
            for (int a = 0; a < static_cast<int>(p) - 1; ++a) {
                PiSeries& hs = h[static_cast<size_t>(i)][static_cast<size_t>(a)];
                for (int l = 0; l < std::min(X_, hs.trunc_deg() + 1); ++l) {
                    const PAdic& c = hs.coeff(l);
                    if (!c.vanishes(1))
                        throw SolveFailed("iwasawa transform: order reduction made no progress at (i=" +
                                          std::to_string(i) + ",a=" + std::to_string(a) + ",l=" +
                                          std::to_string(l) + ",pass=" + std::to_string(s) +
                                          "): " + c.to_string());
                }
                hs = hs.scal_shift(-1);
            }
    }
    if (content < 0) {
        z1 = z1.scal_shift(content);
        z2 = z2.scal_shift(content);
    }
    return {z1, z2};
}

std::pair<IwasawaElement, IwasawaElement> IwasawaTransform::ucol(const ModuleVec& x) const {
    auto col = coleman(x, *ctx_);
    return transform(col.first, col.second);
}

MatIwasawa underline_M_matrix(const WachContext& ctx, const MellinContext& mc) {
    PiSeries oneplus = PiSeries::one(ctx.p, ctx.budget.D, ctx.wprec) + PiSeries::pi(ctx.p, ctx.budget.D, ctx.wprec);
    auto lift = [&](const PiSeries& m) { return mc.inv_mellin(oneplus * m, false); };
    return {lift(ctx.M.a), lift(ctx.M.b), lift(ctx.M.c), lift(ctx.M.d)};
}

namespace {

QuadIw quad_scale(const QuadExtElt& s, const IwasawaElement& u) {
    return {u.scaled(s.rational_part()), u.scaled(s.alpha_part())};
}

QuadIw quad_add(const QuadIw& x, const QuadIw& y) { return {x.r + y.r, x.a + y.a}; }

QuadSeries qs_add(const QuadSeries& x, const QuadSeries& y) { return {x.r + y.r, x.a + y.a}; }

// x * s for a quadratic scalar s, using alpha^2 = ap alpha - p^{k-1}
QuadSeries qs_scale_quad(const QuadExtElt& s, const QuadSeries& x) {
    const QuadContext& qc = s.ctx();
    PiSeries rr = x.r.scaled(s.rational_part()) - x.a.scaled(s.alpha_part()).scal_shift(qc.k - 1);
    PiSeries aa = x.r.scaled(s.alpha_part()) + x.a.scaled(s.rational_part()) +
                  x.a.scaled(s.alpha_part() * qc.ap);
    return {rr, aa};
}

QuadSeries qs_combine(const QuadExtElt& s, const PiSeries& m_off, const PiSeries& m_diag,
                      const QuadSeries& L) {
    // (m_diag + s * m_off) * L with alpha^2 = ap alpha - p^{k-1}
    const QuadContext& qc = s.ctx();
    PiSeries cr = m_diag + m_off.scaled(s.rational_part());
    PiSeries ca = m_off.scaled(s.alpha_part());
    PiSeries rr = cr * L.r - (ca * L.a).scal_shift(qc.k - 1);
    PiSeries aa = cr * L.a + ca * L.r + (ca * L.a).scaled(qc.ap);
    return {rr, aa};
}

} // namespace

DecompositionMatrix decomposition_matrix(const WachContext& ctx, const MatIwasawa& uM) {
    QuadExtElt ai = ctx.roots.alpha.inv();
    QuadExtElt bi = ctx.roots.beta.inv();
    return {quad_add(quad_scale(ai, uM.b), QuadIw{uM.a, IwasawaElement::zero(ctx.p, uM.a.trunc(), false)}),
            quad_add(quad_scale(ai, uM.d), QuadIw{uM.c, IwasawaElement::zero(ctx.p, uM.c.trunc(), false)}),
            quad_add(quad_scale(bi, uM.b), QuadIw{uM.a, IwasawaElement::zero(ctx.p, uM.a.trunc(), false)}),
            quad_add(quad_scale(bi, uM.d), QuadIw{uM.c, IwasawaElement::zero(ctx.p, uM.c.trunc(), false)})};
}

QuadSeries mellin_quad(const MellinContext& mc, const QuadIw& x) {
    return {mc.mellin(x.r), mc.mellin(x.a)};
}

std::pair<QuadSeries, QuadSeries> forward_decomposition(const WachContext& ctx,
                                                        const PiSeries& L1, const PiSeries& L2) {
    QuadExtElt ai = ctx.roots.alpha.inv();
    QuadExtElt bi = ctx.roots.beta.inv();
    QuadSeries l1{L1, PiSeries::zero(ctx.p, L1.trunc_deg())};
    QuadSeries l2{L2, PiSeries::zero(ctx.p, L2.trunc_deg())};
    QuadSeries Fa = qs_add(qs_combine(ai, ctx.M.b, ctx.M.a, l1), qs_combine(ai, ctx.M.d, ctx.M.c, l2));
    QuadSeries Fb = qs_add(qs_combine(bi, ctx.M.b, ctx.M.a, l1), qs_combine(bi, ctx.M.d, ctx.M.c, l2));
    return {Fa, Fb};
}

std::pair<PiSeries, PiSeries> decompose(const WachContext& ctx, const MellinContext& mc,
                                        const QuadIw& L_alpha, const QuadIw& L_beta) {
    QuadExtElt ai = ctx.roots.alpha.inv();
    QuadExtElt bi = ctx.roots.beta.inv();
    QuadSeries Fa = mellin_quad(mc, L_alpha);
    QuadSeries Fb = mellin_quad(mc, L_beta);
    PiSeries detM = mat_det(ctx.M);
    // L1 = [(beta^{-1}m22 + m21) Fa - (alpha^{-1}m22 + m21) Fb] / ((beta^{-1}-alpha^{-1}) det M)
    QuadSeries n1 = qs_add(qs_combine(bi, ctx.M.d, ctx.M.c, Fa),
                           qs_combine(ai, ctx.M.d, ctx.M.c, QuadSeries{-Fb.r, -Fb.a}));
    QuadSeries n2 = qs_add(qs_combine(bi, ctx.M.b, ctx.M.a, Fa),
                           qs_combine(ai, ctx.M.b, ctx.M.a, QuadSeries{-Fb.r, -Fb.a}));
    QuadExtElt d1 = bi - ai;
    QuadExtElt d2 = ai - bi;
    auto resolve = [&](const QuadSeries& n, const QuadExtElt& dscalar) {
        QuadSeries scaled = qs_scale_quad(dscalar.inv(), n);
        if (!scaled.a.is_zero_at(std::max(2, ctx.budget.N - 2)))
            throw NotDivisible("decompose: the alpha-part fails to cancel");
        return divide_series(scaled.r, detM);
    };
    PiSeries L1 = resolve(n1, d1);
    PiSeries L2 = resolve(n2, d2);
    // recomposition check
    auto fwd = forward_decomposition(ctx, L1, L2);
    int tol = std::max(2, ctx.budget.N - 2 - (ctx.k - 1));
    if (!fwd.first.r.agrees(Fa.r, tol) || !fwd.first.a.agrees(Fa.a, tol) ||
        !fwd.second.r.agrees(Fb.r, tol) || !fwd.second.a.agrees(Fb.a, tol))
        throw NotDivisible("decompose: recomposition defect exceeds the precision budget");
    return {L1, L2};
}

IwasawaElement iwasawa_divide_g0(const IwasawaElement& num, const IwasawaElement& den) {
    int64_t p = num.prime();
    int X = num.trunc();
    for (int a = 1; a < den.grades(); ++a)
        for (int l = 0; l <= den.trunc(); ++l)
            if (!den.coeff(a, l).vanishes(2))
                throw ConfigError("iwasawa_divide_g0: divisor must live in grade 0");
    const auto& d0 = den.grade(0);
    if (d0[0].is_zero()) throw DivisionByZero("iwasawa_divide_g0: divisor constant term vanishes");
    IwasawaElement out(p, X, num.bounded() && den.bounded());
    for (int a = 0; a < num.grades(); ++a) {
        for (int l = 0; l <= X; ++l) {
            PAdic acc = num.coeff(a, l);
            for (int i = 1; i <= l && i <= den.trunc(); ++i)
                acc = acc - d0[static_cast<size_t>(i)] * out.coeff(a, l - i);
            out.set_coeff(a, l, acc / d0[0]);
        }
    }
    return out;
}

std::pair<IwasawaElement, IwasawaElement> ordinary_decompose(const WachContext& ctx,
                                                             const IwasawaElement& L1,
                                                             const IwasawaElement& L2,
                                                             const IwasawaElement& star,
                                                             const IwasawaElement& u) {
    if (ctx.mode != WachMode::ordinary) throw ConfigError("ordinary_decompose needs an ordinary context");
    int X = L1.trunc();
    IwasawaElement logk = pollack_log(ctx.p, ctx.k, LogVariant::ord, X, ctx.budget.N + 6);
    IwasawaElement Lbeta = -(L1 * logk.scaled(ctx.roots.alpha_padic) + L2 * star);
    IwasawaElement Lalpha = L2 * u;
    return {Lbeta, Lalpha};
}

std::pair<IwasawaElement, IwasawaElement> ordinary_recover(const WachContext& ctx,
                                                           const IwasawaElement& L_beta,
                                                           const IwasawaElement& L_alpha,
                                                           const IwasawaElement& star,
                                                           const IwasawaElement& u) {
    if (ctx.mode != WachMode::ordinary) throw ConfigError("ordinary_recover needs an ordinary context");
    int X = L_beta.trunc();
    IwasawaElement logk = pollack_log(ctx.p, ctx.k, LogVariant::ord, X, ctx.budget.N + 6);
    IwasawaElement L2 = iwasawa_divide_g0(L_alpha, u);
    IwasawaElement num = -L_beta - L2 * star;
    IwasawaElement L1 = iwasawa_divide_g0(num, logk.scaled(ctx.roots.alpha_padic));
    return {L1, L2};
}

} // namespace wach
