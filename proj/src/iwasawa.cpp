#include "wach/iwasawa.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

namespace wach {

namespace {

int floor_div(int a, int b) {
    int q = a / b, r = a % b;
    return (r != 0 && (r < 0) != (b < 0)) ? q - 1 : q;
}

std::vector<PAdic> tpoly_zero(int64_t p, int X) {
    return std::vector<PAdic>(static_cast<size_t>(X) + 1, PAdic::zero(p));
}

std::vector<PAdic> tpoly_mul(int64_t p, const std::vector<PAdic>& a, const std::vector<PAdic>& b, int X) {
    auto out = tpoly_zero(p, X);
    for (int i = 0; i <= X && i < static_cast<int>(a.size()); ++i) {
        const PAdic& ai = a[static_cast<size_t>(i)];
        if (ai.is_zero() && ai.abs_prec() >= kExactPrec) continue;
        for (int j = 0; i + j <= X && j < static_cast<int>(b.size()); ++j) {
            const PAdic& bj = b[static_cast<size_t>(j)];
            if (bj.is_zero() && bj.abs_prec() >= kExactPrec) continue;
            out[static_cast<size_t>(i + j)] = out[static_cast<size_t>(i + j)] + ai * bj;
        }
    }
    return out;
}

// divide by a T-polynomial with invertible lowest coefficient (after an
// exact T-power shift)
std::vector<PAdic> tpoly_div(int64_t p, std::vector<PAdic> f, const std::vector<PAdic>& g, int X) {
    int s = -1;
    for (int j = 0; j < static_cast<int>(g.size()); ++j)
        if (!g[static_cast<size_t>(j)].is_zero()) { s = j; break; }
    if (s < 0) throw DivisionByZero("tpoly_div: zero divisor");
    for (int j = 0; j < s; ++j)
        if (!f[static_cast<size_t>(j)].vanishes(2))
            throw NotDivisible("tpoly_div: T-order obstruction");
    auto out = tpoly_zero(p, X);
    for (int j = 0; j + s <= X; ++j) {
        PAdic acc = j + s < static_cast<int>(f.size()) ? f[static_cast<size_t>(j + s)] : PAdic::zero(p);
        for (int i = 1; i <= j && s + i < static_cast<int>(g.size()); ++i)
            acc = acc - g[static_cast<size_t>(s + i)] * out[static_cast<size_t>(j - i)];
        out[static_cast<size_t>(j)] = acc / g[static_cast<size_t>(s)];
    }
    return out;
}

// Phi_m(u^{-j} gamma) as a T-polynomial (truncated at X): sum over i of
// u^{-j i p^{m-1}} (1+T)^{i p^{m-1}}.
std::vector<PAdic> tpoly_cyc_gamma(int64_t p, int m, int j, int X, int prec) {
    auto out = tpoly_zero(p, X);
    int nbig = prec + factorial_valuation(p, X) + 8;
    PAdic u = PAdic::from_int(p, 1 + p, nbig);
    for (int i = 0; i < static_cast<int>(p); ++i) {
        PAdic s = PAdic::from_int(p, i, nbig).shift(m - 1); // i p^{m-1}
        // u^{-j*s}: the exponent is a p-adic integer, so go through binomials
        PAdic expo = s * PAdic::from_int(p, -j, nbig);
        PAdic scal = one_plus_p_pow(expo, prec + 4);
        auto row = binom_row(s, X, prec + 4);
        for (int l = 0; l <= X; ++l)
            out[static_cast<size_t>(l)] = out[static_cast<size_t>(l)] + scal * row[static_cast<size_t>(l)];
    }
    return out;
}

} // namespace

uint32_t delta_generator(int64_t p) {
    for (uint32_t r = 2; r < static_cast<uint32_t>(p); ++r) {
        uint32_t x = r, order = 1;
        while (x != 1) { x = static_cast<uint32_t>((static_cast<uint64_t>(x) * r) % static_cast<uint64_t>(p)); ++order; }
        if (order == static_cast<uint32_t>(p) - 1) return r;
    }
    throw ConfigError("no primitive root (p not prime?)");
}

IwasawaElement::IwasawaElement(int64_t p, int X, bool bounded) : p_(p), X_(X), bounded_(bounded) {
    g_.assign(static_cast<size_t>(p - 1), tpoly_zero(p, X));
}

IwasawaElement IwasawaElement::zero(int64_t p, int X, bool bounded) { return IwasawaElement(p, X, bounded); }

IwasawaElement IwasawaElement::one(int64_t p, int X, int prec, bool bounded) {
    IwasawaElement x(p, X, bounded);
    x.g_[0][0] = PAdic::from_int(p, 1, prec);
    return x;
}

IwasawaElement IwasawaElement::group_elt(int64_t p, int X, int a, long long c, int prec) {
    IwasawaElement x(p, X);
    int am = ((a % (static_cast<int>(p) - 1)) + static_cast<int>(p) - 1) % (static_cast<int>(p) - 1);
    // gamma^c = (1+T)^c expanded in T
    auto row = binom_row(PAdic::from_int(p, c, prec + factorial_valuation(p, X) + 6), X, prec + 2);
    for (int l = 0; l <= X; ++l) x.g_[static_cast<size_t>(am)][static_cast<size_t>(l)] = row[static_cast<size_t>(l)];
    return x;
}

IwasawaElement IwasawaElement::from_tpoly(int64_t p, int X, int a, std::vector<PAdic> tcoeffs, bool bounded) {
    IwasawaElement x(p, X, bounded);
    int am = ((a % (static_cast<int>(p) - 1)) + static_cast<int>(p) - 1) % (static_cast<int>(p) - 1);
    for (int l = 0; l <= X && l < static_cast<int>(tcoeffs.size()); ++l)
        x.g_[static_cast<size_t>(am)][static_cast<size_t>(l)] = tcoeffs[static_cast<size_t>(l)];
    return x;
}

IwasawaElement IwasawaElement::resized(int X) const {
    IwasawaElement out(p_, X, bounded_);
    for (int a = 0; a < grades(); ++a)
        for (int l = 0; l <= std::min(X, X_); ++l)
            out.g_[static_cast<size_t>(a)][static_cast<size_t>(l)] = coeff(a, l);
    return out;
}

void IwasawaElement::set_coeff(int a, int l, PAdic c) { g_[static_cast<size_t>(a)][static_cast<size_t>(l)] = std::move(c); }

void IwasawaElement::add_term(int a, int l, const PAdic& c) {
    g_[static_cast<size_t>(a)][static_cast<size_t>(l)] = g_[static_cast<size_t>(a)][static_cast<size_t>(l)] + c;
}

IwasawaElement IwasawaElement::operator+(const IwasawaElement& o) const {
    if (p_ != o.p_ || X_ != o.X_) throw ConfigError("IwasawaElement add: shape mismatch");
    IwasawaElement x(p_, X_, bounded_ && o.bounded_);
    for (int a = 0; a < grades(); ++a)
        for (int l = 0; l <= X_; ++l)
            x.g_[static_cast<size_t>(a)][static_cast<size_t>(l)] = coeff(a, l) + o.coeff(a, l);
    return x;
}

IwasawaElement IwasawaElement::operator-() const {
    IwasawaElement x = *this;
    for (auto& g : x.g_)
        for (auto& c : g) c = -c;
    return x;
}

IwasawaElement IwasawaElement::operator-(const IwasawaElement& o) const { return *this + (-o); }

IwasawaElement IwasawaElement::operator*(const IwasawaElement& o) const {
    if (p_ != o.p_ || X_ != o.X_) throw ConfigError("IwasawaElement mul: shape mismatch");
    IwasawaElement x(p_, X_, bounded_ && o.bounded_);
    int G = grades();
    for (int a = 0; a < G; ++a) {
        bool any = false;
        for (const auto& c : g_[static_cast<size_t>(a)])
            if (!(c.is_zero() && c.abs_prec() >= kExactPrec)) { any = true; break; }
        if (!any) continue;
        for (int b = 0; b < G; ++b) {
            auto prod = tpoly_mul(p_, g_[static_cast<size_t>(a)], o.g_[static_cast<size_t>(b)], X_);
            int ab = (a + b) % G;
            for (int l = 0; l <= X_; ++l)
                x.g_[static_cast<size_t>(ab)][static_cast<size_t>(l)] =
                    x.g_[static_cast<size_t>(ab)][static_cast<size_t>(l)] + prod[static_cast<size_t>(l)];
        }
    }
    return x;
}

IwasawaElement IwasawaElement::scaled(const PAdic& c) const {
    IwasawaElement x = *this;
    for (auto& g : x.g_)
        for (auto& y : g) y = y * c;
    return x;
}

IwasawaElement IwasawaElement::scal_shift(int k) const {
    IwasawaElement x = *this;
    if (k < 0) x.bounded_ = false;
    for (auto& g : x.g_)
        for (auto& y : g) y = y.shift(k);
    return x;
}

bool IwasawaElement::is_zero_at(int abs_prec) const {
    for (const auto& g : g_)
        for (const auto& c : g)
            if (!c.vanishes(abs_prec)) return false;
    return true;
}

bool IwasawaElement::agrees(const IwasawaElement& o, int abs_prec) const {
    if (p_ != o.p_ || X_ != o.X_) return false;
    for (int a = 0; a < grades(); ++a)
        for (int l = 0; l <= X_; ++l)
            if (!coeff(a, l).agrees(o.coeff(a, l), abs_prec)) return false;
    return true;
}

int IwasawaElement::min_coeff_valuation() const {
    int m = 0;
    bool seen = false;
    for (const auto& g : g_)
        for (const auto& c : g) {
            if (c.is_zero()) continue;
            if (!seen || c.valuation() < m) m = c.valuation();
            seen = true;
        }
    return seen ? m : 0;
}

double IwasawaElement::growth_hint() const {
    double h = 0.0;
    for (const auto& g : g_)
        for (int l = 1; l < static_cast<int>(g.size()); ++l) {
            const PAdic& c = g[static_cast<size_t>(l)];
            if (c.is_zero() || c.valuation() >= 0) continue;
            double r = -static_cast<double>(c.valuation()) /
                       (std::log(static_cast<double>(l + 1)) / std::log(static_cast<double>(p_)));
            h = std::max(h, r);
        }
    return h;
}

IwasawaElement pk_element(int64_t p, int k, int X, int prec) {
    IwasawaElement acc = IwasawaElement::one(p, X, prec);
    PAdic u = PAdic::from_int(p, 1 + p, prec + 4);
    for (int j = 0; j < k; ++j) {
        // 1 - u^{-j} gamma = (1 - u^{-j}) - u^{-j} T
        PAdic uj = u.pow(-j);
        IwasawaElement f(p, X);
        f.set_coeff(0, 0, PAdic::from_int(p, 1, prec + 4) - uj);
        f.set_coeff(0, 1, -uj);
        acc = acc * f;
    }
    return acc;
}

IwasawaElement pollack_log(int64_t p, int k, LogVariant variant, int X, int prec, int cutoff) {
    int work = prec + 6;
    if (variant == LogVariant::ord) {
        // prod_j log_p(u^{-j}gamma) / (u^{-j}gamma - 1)
        IwasawaElement acc = IwasawaElement::one(p, X, work, false);
        PAdic u = PAdic::from_int(p, 1 + p, work + X + 8);
        for (int j = 0; j <= k - 2; ++j) {
            // log_p(u^{-j}(1+T)) = -j log_p(u) + log(1+T)
            auto num = tpoly_zero(p, X);
            PAdic logu = PAdic::zero(p);
            for (int i = 1; i <= work + 4; ++i) {
                PAdic term = PAdic::from_ratio(p, (i % 2) ? 1 : -1, i, work + 4).shift(i);
                logu = logu + term;
            }
            num[0] = logu * PAdic::from_int(p, -j, work + 4);
            for (int l = 1; l <= X; ++l) num[static_cast<size_t>(l)] = PAdic::from_ratio(p, (l % 2) ? 1 : -1, l, work + 4);
            // u^{-j}(1+T) - 1 = (u^{-j} - 1) + u^{-j} T
            auto den = tpoly_zero(p, X);
            PAdic uj = u.pow(-j).cap_rel(work + 4);
            den[0] = uj - PAdic::from_int(p, 1, work + 4);
            den[1] = uj;
            auto quot = tpoly_div(p, num, den, X);
            acc = acc * IwasawaElement::from_tpoly(p, X, 0, quot, false);
        }
        return acc;
    }
    if (cutoff <= 0) {
        int logx = 0;
        long long q = 1;
        while (q < std::max(X, 2)) { q *= p; ++logx; }
        cutoff = prec + logx + 6;
    }
    int parity = variant == LogVariant::plus ? 0 : 1;
    IwasawaElement acc = IwasawaElement::one(p, X, work, false);
    for (int j = 0; j <= k - 2; ++j) {
        acc = acc.scal_shift(-1); // the 1/p prefactor per j
        for (int m = 1; m <= cutoff; ++m) {
            if (m % 2 != parity) continue;
            auto f = tpoly_cyc_gamma(p, m, j, X, work);
            for (auto& c : f) c = c.shift(-1); // divide the factor by p
            acc = acc * IwasawaElement::from_tpoly(p, X, 0, f, false);
        }
    }
    return acc;
}

IwasawaElement cyc_poly_gamma(int64_t p, int m, int X, int prec) {
    return IwasawaElement::from_tpoly(p, X, 0, tpoly_cyc_gamma(p, m, 0, X, prec));
}

IwasawaElement reduce_mod_pk(const IwasawaElement& x, int k, int prec) {
    int64_t p = x.prime();
    if (k > x.trunc() + 1) return x;
    IwasawaElement pk = pk_element(p, k, std::max(x.trunc(), k), prec + 4);
    const auto& mod = pk.grade(0);
    PAdic lead = mod[static_cast<size_t>(k)];
    if (lead.is_zero() || lead.valuation() != 0)
        throw SolveFailed("reduce_mod_pk: leading coefficient is not a unit");
    PAdic leadinv = lead.inv();
    IwasawaElement out(p, x.trunc(), x.bounded());
    for (int a = 0; a < x.grades(); ++a) {
        std::vector<PAdic> rem(x.grade(a));
        for (int deg = x.trunc(); deg >= k; --deg) {
            PAdic c = rem[static_cast<size_t>(deg)] * leadinv;
            if (c.is_zero() && c.abs_prec() >= kExactPrec) continue;
            for (int i = 0; i <= k; ++i)
                rem[static_cast<size_t>(deg - k + i)] =
                    rem[static_cast<size_t>(deg - k + i)] - c * mod[static_cast<size_t>(i)];
        }
        for (int l = 0; l < k; ++l) out.set_coeff(a, l, rem[static_cast<size_t>(l)]);
    }
    return out;
}

CycElt eval_char(const IwasawaElement& lambda, const DirichletChar& chi, int prec, int tower) {
    int64_t p = lambda.prime();
    int glevel = std::max(chi.cond_exp - 1, 0);
    if (glevel > tower) throw LevelTooLarge("eval_char: character beyond tower height");
    CycElt x = chi.gamma_value - CycElt::scalar(p, glevel, PAdic::from_int(p, 1, prec)); // T value
    uint32_t r = delta_generator(p);
    CycElt acc(p, glevel);
    for (int a = 0; a < lambda.grades(); ++a) {
        // chi(delta^a) = tau(r)^{e a}
        PAdic dv = teichmuller(p, r, prec).pow(static_cast<long long>(chi.delta_exp) * a);
        // grade polynomial at T = x
        CycElt ge(p, glevel);
        for (int l = lambda.trunc(); l >= 0; --l)
            ge = ge * x + CycElt::scalar(p, glevel, lambda.coeff(a, l));
        acc = acc + ge.scaled(dv);
    }
    return acc;
}

PAdic eval_weight(const IwasawaElement& lambda, long long j, int prec) {
    int64_t p = lambda.prime();
    PAdic u = PAdic::from_int(p, 1 + p, prec + 4);
    PAdic x = u.pow(j) - PAdic::from_int(p, 1, prec + 4);
    uint32_t r = delta_generator(p);
    PAdic tr = teichmuller(p, r, prec + 4);
    PAdic acc = PAdic::zero(p);
    for (int a = 0; a < lambda.grades(); ++a) {
        PAdic ge = PAdic::zero(p);
        for (int l = lambda.trunc(); l >= 0; --l) ge = ge * x + lambda.coeff(a, l);
        acc = acc + ge * tr.pow(j * a);
    }
    return acc;
}

// ---- Mellin machinery ------------------------------------------------------

PiSeries reduce_mod_phi_pi_pow(const PiSeries& f, int X) {
    int64_t p = f.prime();
    int deg_mod = static_cast<int>(p) * X;
    int d = f.reliable_deg();
    if (d < deg_mod - 1) throw ConfigError("reduce_mod_phi_pi_pow: series too short");
    int mprec = 4;
    for (int j = 0; j <= d; ++j) mprec = std::max(mprec, f.coeff(j).rel_prec());
    PiSeries M = series_phi_pi(p, deg_mod, mprec + X + 4).pow(X); // monic, exact integers
    // balance the truncation degree against degree-dependent caps: folding a
    // later coefficient into the remainder costs its own precision, while
    // dropping it costs about (d+1-pX)/p digits
    int contentb = std::min(0, f.min_coeff_valuation());
    {
        int prefix = kExactPrec, best_d = d, best_score = -kExactPrec;
        for (int j = 0; j <= d; ++j) {
            int a = f.coeff(j).abs_prec();
            if (a < prefix) prefix = a;
            if (j < deg_mod - 1) continue;
            int score = std::min(prefix, (j + 1 - deg_mod) / static_cast<int>(p) + contentb);
            if (score >= best_score) { best_score = score; best_d = j; }
        }
        d = best_d;
    }
    PiSeries rem = f.poly_truncate(d);
    std::vector<PAdic> w(static_cast<size_t>(d) + 1);
    for (int j = 0; j <= d; ++j) w[static_cast<size_t>(j)] = rem.coeff(j);
    for (int deg = d; deg >= deg_mod; --deg) {
        PAdic c = w[static_cast<size_t>(deg)];
        if (c.is_zero() && c.abs_prec() >= kExactPrec) continue;
        w[static_cast<size_t>(deg)] = PAdic::zero(p);
        for (int i = 0; i < deg_mod; ++i) {
            const PAdic& mi = M.coeff(i);
            if (mi.is_zero()) continue;
            w[static_cast<size_t>(deg - deg_mod + i)] = w[static_cast<size_t>(deg - deg_mod + i)] - c * mi;
        }
    }
    // the dropped tail of f reaches the remainder with p-adically small
    // multipliers: record the induced precision
    int content = std::min(0, f.min_coeff_valuation());
    int bound = floor_div(d + 1 - deg_mod, static_cast<int>(p)) + content;
    PiSeries out(p, deg_mod - 1);
    for (int j = 0; j < deg_mod; ++j) {
        PAdic c = w[static_cast<size_t>(j)];
        if (c.abs_prec() > bound) c = c.cap_abs(bound);
        out.set_coeff(j, c);
    }
    return out;
}

struct MellinContext::Solver {
    int nrows = 0, ncols = 0;
    std::vector<std::vector<PAdic>> trans; // nrows x nrows row-transform
    std::vector<int> pivot_row;            // per column
    std::vector<char> row_used;

    // columns: the reduced basis images
    void build(int64_t p, const std::vector<std::vector<PAdic>>& cols, int prec) {
        nrows = static_cast<int>(cols[0].size());
        ncols = static_cast<int>(cols.size());
        std::vector<std::vector<PAdic>> R(static_cast<size_t>(nrows));
        trans.assign(static_cast<size_t>(nrows), {});
        for (int i = 0; i < nrows; ++i) {
            R[static_cast<size_t>(i)].resize(static_cast<size_t>(ncols));
            for (int j = 0; j < ncols; ++j) R[static_cast<size_t>(i)][static_cast<size_t>(j)] = cols[static_cast<size_t>(j)][static_cast<size_t>(i)];
            trans[static_cast<size_t>(i)].assign(static_cast<size_t>(nrows), PAdic::zero(p));
            trans[static_cast<size_t>(i)][static_cast<size_t>(i)] = PAdic::from_int(p, 1, prec + 6);
        }
        pivot_row.assign(static_cast<size_t>(ncols), -1);
        row_used.assign(static_cast<size_t>(nrows), 0);
        for (int j = 0; j < ncols; ++j) {
            int pr = -1;
            for (int i = 0; i < nrows; ++i) {
                if (row_used[static_cast<size_t>(i)]) continue;
                const PAdic& e = R[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (!e.is_zero() && e.valuation() == 0) { pr = i; break; }
            }
            if (pr < 0) throw SolveFailed("mellin solve: no unit pivot in column " + std::to_string(j));
            row_used[static_cast<size_t>(pr)] = 1;
            pivot_row[static_cast<size_t>(j)] = pr;
            PAdic inv = R[static_cast<size_t>(pr)][static_cast<size_t>(j)].inv();
            for (int c = 0; c < ncols; ++c) R[static_cast<size_t>(pr)][static_cast<size_t>(c)] = R[static_cast<size_t>(pr)][static_cast<size_t>(c)] * inv;
            for (int c = 0; c < nrows; ++c) trans[static_cast<size_t>(pr)][static_cast<size_t>(c)] = trans[static_cast<size_t>(pr)][static_cast<size_t>(c)] * inv;
            for (int i = 0; i < nrows; ++i) {
                if (i == pr) continue;
                PAdic f = R[static_cast<size_t>(i)][static_cast<size_t>(j)];
                if (f.is_zero() && f.abs_prec() >= kExactPrec) continue;
                for (int c = 0; c < ncols; ++c)
                    R[static_cast<size_t>(i)][static_cast<size_t>(c)] = R[static_cast<size_t>(i)][static_cast<size_t>(c)] - f * R[static_cast<size_t>(pr)][static_cast<size_t>(c)];
                for (int c = 0; c < nrows; ++c)
                    trans[static_cast<size_t>(i)][static_cast<size_t>(c)] = trans[static_cast<size_t>(i)][static_cast<size_t>(c)] - f * trans[static_cast<size_t>(pr)][static_cast<size_t>(c)];
            }
        }
    }

    // returns coefficients per column; residual rows must vanish at res_tol
    std::vector<PAdic> solve(int64_t p, const std::vector<PAdic>& rhs, int res_tol) const {
        std::vector<PAdic> c(static_cast<size_t>(nrows), PAdic::zero(p));
        for (int i = 0; i < nrows; ++i) {
            PAdic acc = PAdic::zero(p);
            for (int r = 0; r < nrows; ++r) {
                const PAdic& t = trans[static_cast<size_t>(i)][static_cast<size_t>(r)];
                if (t.is_zero() && t.abs_prec() >= kExactPrec) continue;
                acc = acc + t * rhs[static_cast<size_t>(r)];
            }
            c[static_cast<size_t>(i)] = acc;
        }
        for (int i = 0; i < nrows; ++i) {
            if (row_used[static_cast<size_t>(i)]) continue;
            if (!c[static_cast<size_t>(i)].vanishes(res_tol))
                throw NotInKernelPsi("mellin solve: inconsistent right-hand side (residual at row " +
                                     std::to_string(i) + ")");
        }
        std::vector<PAdic> out(static_cast<size_t>(ncols));
        for (int j = 0; j < ncols; ++j) out[static_cast<size_t>(j)] = c[static_cast<size_t>(pivot_row[static_cast<size_t>(j)])];
        return out;
    }
};

MellinContext::MellinContext(int64_t p, int D, int X, int prec)
    : p_(p), D_(D), X_(X), prec_(prec) {
    if (D < static_cast<int>(p) * X) throw ConfigError("MellinContext: need D >= p*X");
    int out_prec = prec + 10;
    int nbig = out_prec + factorial_valuation(p, D) + 8;
    gamma_ = std::make_shared<GammaAction>(p, D, PAdic::from_int(p, 1 + p, nbig), out_prec);
    delta_ = std::make_shared<GammaAction>(p, D, teichmuller(p, delta_generator(p), nbig), out_prec);
    // images_[a][l] = delta^a (gamma-1)^l (1+pi)
    images_.assign(static_cast<size_t>(p - 1), {});
    std::vector<PiSeries> v;
    PiSeries cur = PiSeries::one(p, D, out_prec) + PiSeries::pi(p, D, out_prec);
    v.push_back(cur);
    for (int l = 1; l <= X; ++l) {
        cur = gamma_->apply(cur) - cur;
        v.push_back(cur);
    }
    images_[0] = v;
    for (int a = 1; a <= static_cast<int>(p) - 2; ++a) {
        std::vector<PiSeries> w;
        w.reserve(v.size());
        for (const auto& f : images_[static_cast<size_t>(a - 1)]) w.push_back(delta_->apply(f));
        images_[static_cast<size_t>(a)] = std::move(w);
    }
}

const PiSeries& MellinContext::basis_image(int a, int l) const {
    return images_[static_cast<size_t>(a)][static_cast<size_t>(l)];
}

PiSeries MellinContext::mellin(const IwasawaElement& lambda) const {
    if (lambda.trunc() > X_) throw ConfigError("mellin: lambda truncated beyond context");
    PiSeries acc(p_, D_);
    for (int a = 0; a < lambda.grades(); ++a)
        for (int l = 0; l <= lambda.trunc(); ++l) {
            const PAdic& c = lambda.coeff(a, l);
            if (c.is_zero() && c.abs_prec() >= kExactPrec) continue;
            acc = acc + basis_image(a, l).scaled(c);
        }
    return acc;
}

PiSeries MellinContext::apply_iwasawa(const IwasawaElement& lambda, const PiSeries& f) const {
    // sum_a delta^a ( sum_l c_{a,l} (gamma-1)^l f ), Horner in delta
    std::vector<PiSeries> w;
    PiSeries cur = f;
    w.push_back(cur);
    for (int l = 1; l <= lambda.trunc(); ++l) {
        cur = gamma_->apply(cur) - cur;
        w.push_back(cur);
    }
    int G = lambda.grades();
    PiSeries acc(p_, f.trunc_deg());
    for (int a = G - 1; a >= 0; --a) {
        if (a < G - 1) acc = delta_->apply(acc);
        PiSeries s(p_, f.trunc_deg());
        for (int l = 0; l <= lambda.trunc(); ++l) {
            const PAdic& c = lambda.coeff(a, l);
            if (c.is_zero() && c.abs_prec() >= kExactPrec) continue;
            s = s + w[static_cast<size_t>(l)].scaled(c);
        }
        acc = acc + s;
    }
    return acc;
}

void MellinContext::build_solver() const {
    if (solver_) return;
    auto s = std::make_shared<Solver>();
    std::vector<std::vector<PAdic>> cols;
    for (int a = 0; a < static_cast<int>(p_) - 1; ++a)
        for (int l = 0; l < X_; ++l) {
            PiSeries r = reduce_mod_phi_pi_pow(basis_image(a, l), X_);
            std::vector<PAdic> col(static_cast<size_t>(r.trunc_deg()) + 1);
            for (int j = 0; j <= r.trunc_deg(); ++j) col[static_cast<size_t>(j)] = r.coeff(j);
            cols.push_back(std::move(col));
        }
    s->build(p_, cols, prec_);
    solver_ = std::move(s);
}

IwasawaElement MellinContext::inv_mellin(const PiSeries& F, bool bounded) const {
    if (F.prime() != p_) throw ConfigError("inv_mellin: prime mismatch");
    // scale to integral coefficients; the solution scales back linearly
    int content = std::min(0, F.min_coeff_valuation());
    PiSeries Fn = content < 0 ? F.scal_shift(-content) : F;
    if (!psi(Fn).is_zero_at(prec_))
        throw NotInKernelPsi("inv_mellin: input is not in the kernel of psi");
    build_solver();
    PiSeries rem = reduce_mod_phi_pi_pow(Fn, X_);
    std::vector<PAdic> rhs(static_cast<size_t>(rem.trunc_deg()) + 1);
    int res_tol = prec_;
    for (int j = 0; j <= rem.trunc_deg(); ++j) {
        rhs[static_cast<size_t>(j)] = rem.coeff(j);
        if (rem.coeff(j).abs_prec() < kExactPrec)
            res_tol = std::min(res_tol, std::max(2, rem.coeff(j).abs_prec()));
    }
    auto sol = solver_->solve(p_, rhs, std::max(2, res_tol - 2));
    IwasawaElement out(p_, X_, bounded && content == 0);
    int idx = 0;
    for (int a = 0; a < static_cast<int>(p_) - 1; ++a)
        for (int l = 0; l < X_; ++l, ++idx)
            out.set_coeff(a, l, sol[static_cast<size_t>(idx)].shift(content));
    return out;
}

bool MellinContext::quotient_bijective(int k) const {
    if (k > X_) throw ConfigError("quotient_bijective: k beyond truncation");
    if (k == 0) return true;
    // columns: images of delta^a (gamma-1)^l, l < k, reduced mod phi(pi)^k
    std::vector<std::vector<PAdic>> cols;
    for (int a = 0; a < static_cast<int>(p_) - 1; ++a)
        for (int l = 0; l < k; ++l) {
            PiSeries r = reduce_mod_phi_pi_pow(basis_image(a, l), k);
            std::vector<PAdic> col(static_cast<size_t>(r.trunc_deg()) + 1);
            for (int j = 0; j <= r.trunc_deg(); ++j) col[static_cast<size_t>(j)] = r.coeff(j);
            cols.push_back(std::move(col));
        }
    Solver s;
    try {
        s.build(p_, cols, prec_);
    } catch (const SolveFailed&) {
        return false;
    }
    // the psi=0 sublattice mod phi(pi)^k is spanned by (1+pi)^j phi(pi^i);
    // each of these must be in the image
    PiSeries oneplus = PiSeries::one(p_, D_, prec_ + 8) + PiSeries::pi(p_, D_, prec_ + 8);
    for (int j = 1; j <= static_cast<int>(p_) - 1; ++j) {
        for (int i = 0; i < k; ++i) {
            PiSeries probe = oneplus.pow(j) * frobenius(PiSeries::monomial(PAdic::from_int(p_, 1, prec_ + 8), i, D_));
            PiSeries r = reduce_mod_phi_pi_pow(probe, k);
            std::vector<PAdic> rhs(static_cast<size_t>(r.trunc_deg()) + 1);
            for (int m = 0; m <= r.trunc_deg(); ++m) rhs[static_cast<size_t>(m)] = r.coeff(m);
            try {
                s.solve(p_, rhs, std::max(2, prec_ - 4));
            } catch (const NotInKernelPsi&) {
                return false;
            }
        }
    }
    return true;
}

// ---- the Fourier-theory checker --------------------------------------------

FourierChecker::FourierChecker(int64_t p, int D, int prec, int X, int tower)
    : tower_(tower),
      ctx_(p,
           std::max(D, static_cast<int>(p) * X + static_cast<int>(p) * (std::min(prec, X) + 4) + 4),
           X, prec) {}

FourierReport FourierChecker::run(const PiSeries& F, int n) const {
    int64_t p = ctx_.prime();
    if (n < 1 || n > tower_) throw LevelTooLarge("fourier check: level outside tower");
    int X = ctx_.trunc();
    int prec = ctx_.prec();
    int degphi = 1;
    for (int i = 0; i < n - 2; ++i) degphi *= static_cast<int>(p);
    degphi *= n >= 2 ? static_cast<int>(p) - 1 : 1;
    if (n >= 2 && degphi > X) throw LevelTooLarge("fourier check: T-side polynomial beyond truncation");

    FourierReport rep;
    rep.level = n;
    int content = std::min(0, F.min_coeff_valuation());
    PiSeries Fn = content < 0 ? F.scal_shift(-content) : F;

    // (1) series-side divisibility via evaluation at level n (balanced
    // against any degree-dependent caps the input carries)
    CycElt ev = eval_series_balanced(Fn, n, tower_);
    int tol1 = prec - 2;
    for (const auto& c : ev.coords())
        if (c.abs_prec() < kExactPrec) tol1 = std::min(tol1, c.abs_prec());
    tol1 = std::max(tol1 - 1, 2);
    rep.tol_series = tol1;
    rep.val_series = std::min(ev.min_valuation(tol1), tol1);
    rep.div_series = ev.is_zero_at(tol1);

    IwasawaElement mu = ctx_.inv_mellin(Fn, true);

    // character-side tolerance: the representative is only defined modulo
    // p_X, whose value at the relevant points has valuation ~ X / deg
    int tol45;
    if (n == 1) {
        tol45 = prec - 2;
    } else {
        tol45 = X / degphi - 1;
        tol45 = std::max(2, std::min(tol45, prec - 2));
    }
    rep.tol_char = tol45;
    rep.tol_tside = tol45;

    // (4)/(4'): character values
    {
        int glevel = n - 1;
        CycElt T = glevel == 0
                       ? CycElt::scalar(p, 0, PAdic::zero(p))
                       : CycElt::zeta(p, glevel, prec + 4) - CycElt::scalar(p, glevel, PAdic::from_int(p, 1, prec + 4));
        // per-grade values G_a(T)
        std::vector<CycElt> gv;
        for (int a = 0; a < mu.grades(); ++a) {
            CycElt acc(p, glevel);
            for (int l = mu.trunc(); l >= 0; --l)
                acc = acc * T + CycElt::scalar(p, glevel, mu.coeff(a, l));
            gv.push_back(acc);
        }
        uint32_t r = delta_generator(p);
        PAdic tr = teichmuller(p, r, prec + 4);
        bool all = true;
        int minval = tol45;
        int e0 = (n == 1) ? 0 : 0; // n=1 checks all characters (the primed variant)
        for (int e = e0; e <= static_cast<int>(p) - 2; ++e) {
            CycElt acc(p, glevel);
            for (int a = 0; a < mu.grades(); ++a) acc = acc + gv[static_cast<size_t>(a)].scaled(tr.pow(static_cast<long long>(e) * a));
            if (!acc.is_zero_at(tol45)) all = false;
            minval = std::min(minval, acc.min_valuation(tol45));
        }
        rep.char_vanish = all;
        rep.val_char = minval;
    }

    // (5)/(5'): T-side divisibility per grade
    {
        bool all = true;
        int minval = tol45;
        if (n == 1) {
            for (int a = 0; a < mu.grades(); ++a) {
                const PAdic& c0 = mu.coeff(a, 0);
                if (!c0.vanishes(tol45)) all = false;
                if (!c0.is_zero() && !c0.vanishes(tol45)) minval = std::min(minval, c0.valuation());
            }
        } else {
            // divide each grade by Phi_{n-1}(1+T) and look at the remainder
            auto phi_poly = tpoly_cyc_gamma(p, n - 1, 0, X, prec + 4);
            for (int a = 0; a < mu.grades(); ++a) {
                std::vector<PAdic> rem(mu.grade(a));
                for (int deg = X; deg >= degphi; --deg) {
                    PAdic c = rem[static_cast<size_t>(deg)] / phi_poly[static_cast<size_t>(degphi)];
                    if (c.is_zero() && c.abs_prec() >= kExactPrec) continue;
                    for (int i = 0; i <= degphi; ++i)
                        rem[static_cast<size_t>(deg - degphi + i)] =
                            rem[static_cast<size_t>(deg - degphi + i)] - c * phi_poly[static_cast<size_t>(i)];
                }
                for (int i = 0; i < degphi; ++i) {
                    const PAdic& c = rem[static_cast<size_t>(i)];
                    if (!c.vanishes(tol45)) all = false;
                    if (!c.is_zero() && !c.vanishes(tol45)) minval = std::min(minval, c.valuation());
                }
            }
        }
        rep.div_tside = all;
        rep.val_tside = minval;
    }

    rep.unanimous = (rep.div_series == rep.char_vanish) && (rep.char_vanish == rep.div_tside);
    return rep;
}

} // namespace wach
