#include "wach/pi_series.hpp"

#include <algorithm>
#include <cmath>

namespace wach {

namespace {

int max_rel_prec(const PiSeries& f) {
    int n = 1;
    for (int j = 0; j <= f.trunc_deg(); ++j) n = std::max(n, f.coeff(j).rel_prec());
    return n;
}

// Pascal triangle C(n, j) for n <= nmax, j <= min(n, width); entries exact
// integers carried to `prec` digits.
std::vector<std::vector<PAdic>> pascal_rows(int64_t p, int nmax, int width, int prec) {
    std::vector<std::vector<PAdic>> rows(static_cast<size_t>(nmax) + 1);
    PAdic one = PAdic::from_int(p, 1, prec);
    rows[0] = {one};
    for (int n = 1; n <= nmax; ++n) {
        const auto& prev = rows[static_cast<size_t>(n - 1)];
        int w = std::min(n, width);
        std::vector<PAdic> cur(static_cast<size_t>(w) + 1);
        cur[0] = one;
        for (int j = 1; j <= w; ++j) {
            PAdic left = j - 1 < static_cast<int>(prev.size()) ? prev[static_cast<size_t>(j - 1)] : PAdic::zero(p);
            PAdic up = j < static_cast<int>(prev.size()) ? prev[static_cast<size_t>(j)] : PAdic::zero(p);
            cur[static_cast<size_t>(j)] = left + up;
        }
        rows[static_cast<size_t>(n)] = std::move(cur);
    }
    return rows;
}

} // namespace

int factorial_valuation(int64_t p, int n) {
    int v = 0;
    long long q = n;
    while (q > 0) { q /= p; v += static_cast<int>(q); }
    return v;
}

static int floor_div(int a, int b) {
    int q = a / b, r = a % b;
    return (r != 0 && (r < 0) != (b < 0)) ? q - 1 : q;
}

static PAdic cap_to(const PAdic& c, int a) {
    if (c.abs_prec() <= a) return c;
    return c.cap_abs(a);
}

// Per-coefficient absolute precision of the input, and the prefix minimum
// (the operators below have integral transition coefficients that vanish
// exactly where a dependency is absent, so the output coefficient j is
// determined modulo the min over its true dependencies; computing on a
// zero-filled promotion and capping afterwards keeps that sharp).
static std::vector<int> coeff_abs(const PiSeries& f, int up_to) {
    std::vector<int> a(static_cast<size_t>(up_to) + 1, kExactPrec);
    for (int j = 0; j <= up_to; ++j) a[static_cast<size_t>(j)] = f.coeff(j).abs_prec();
    return a;
}

static PiSeries promote_series(const PiSeries& f, int abs, int up_to) {
    PiSeries g = f;
    for (int j = 0; j <= up_to; ++j) g.set_coeff(j, f.coeff(j).promoted_to(abs));
    return g;
}

PiSeries::PiSeries(int64_t p, int trunc_deg) : p_(p), D_(trunc_deg), drel_(trunc_deg) {
    c_.assign(static_cast<size_t>(trunc_deg) + 1, PAdic::zero(p));
}

PiSeries PiSeries::constant(const PAdic& c, int trunc_deg) {
    PiSeries f(c.prime(), trunc_deg);
    f.c_[0] = c;
    return f;
}

PiSeries PiSeries::monomial(const PAdic& c, int deg, int trunc_deg) {
    PiSeries f(c.prime(), trunc_deg);
    if (deg <= trunc_deg) f.c_[static_cast<size_t>(deg)] = c;
    return f;
}

PiSeries PiSeries::one(int64_t p, int trunc_deg, int prec) {
    return constant(PAdic::from_int(p, 1, prec), trunc_deg);
}

PiSeries PiSeries::pi(int64_t p, int trunc_deg, int prec) {
    return monomial(PAdic::from_int(p, 1, prec), 1, trunc_deg);
}

PiSeries PiSeries::from_coeffs(int64_t p, std::vector<PAdic> coeffs, int reliable_deg) {
    PiSeries f;
    f.p_ = p;
    f.D_ = static_cast<int>(coeffs.size()) - 1;
    f.drel_ = reliable_deg < 0 ? f.D_ : std::min(reliable_deg, f.D_);
    f.c_ = std::move(coeffs);
    for (auto& c : f.c_) if (!c.valid()) c = PAdic::zero(p);
    return f;
}

const PAdic& PiSeries::coeff(int j) const {
    static const PAdic null{};
    if (j < 0 || j > D_) return null;
    return c_[static_cast<size_t>(j)];
}

void PiSeries::set_coeff(int j, PAdic c) {
    if (j < 0 || j > D_) throw ConfigError("set_coeff out of range");
    c_[static_cast<size_t>(j)] = std::move(c);
}

PiSeries PiSeries::with_reliable(int d) const {
    PiSeries f = *this;
    f.drel_ = std::min(d, D_);
    return f;
}

PiSeries PiSeries::poly_truncate(int d) const {
    PiSeries f = *this;
    for (int j = d + 1; j <= D_; ++j) f.c_[static_cast<size_t>(j)] = PAdic::zero(p_);
    return f;
}

PiSeries PiSeries::resized(int new_D) const {
    PiSeries f(p_, new_D);
    f.drel_ = std::min(drel_, new_D);
    for (int j = 0; j <= std::min(D_, new_D); ++j) f.c_[static_cast<size_t>(j)] = c_[static_cast<size_t>(j)];
    return f;
}

void PiSeries::check_compat(const PiSeries& o) const {
    if (p_ != o.p_) throw ConfigError("mixed primes in series arithmetic");
}

PiSeries PiSeries::operator+(const PiSeries& o) const {
    check_compat(o);
    int D = std::min(D_, o.D_);
    PiSeries f(p_, D);
    f.drel_ = std::min({drel_, o.drel_, D});
    for (int j = 0; j <= D; ++j) f.c_[static_cast<size_t>(j)] = coeff(j) + o.coeff(j);
    return f;
}

PiSeries PiSeries::operator-(const PiSeries& o) const { return *this + (-o); }

PiSeries PiSeries::operator-() const {
    PiSeries f = *this;
    for (auto& c : f.c_) c = -c;
    return f;
}

PiSeries PiSeries::operator*(const PiSeries& o) const {
    check_compat(o);
    int D = std::min(D_, o.D_);
    PiSeries f(p_, D);
    f.drel_ = std::min({drel_, o.drel_, D});
    for (int i = 0; i <= std::min(D_, D); ++i) {
        const PAdic& a = c_[static_cast<size_t>(i)];
        if (a.is_zero() && a.abs_prec() >= kExactPrec) continue;
        for (int j = 0; j + i <= D && j <= o.D_; ++j) {
            const PAdic& b = o.c_[static_cast<size_t>(j)];
            if (b.is_zero() && b.abs_prec() >= kExactPrec) continue;
            f.c_[static_cast<size_t>(i + j)] = f.c_[static_cast<size_t>(i + j)] + a * b;
        }
    }
    return f;
}

PiSeries PiSeries::scaled(const PAdic& c) const {
    PiSeries f = *this;
    for (auto& x : f.c_) x = x * c;
    return f;
}

PiSeries PiSeries::shifted(int k) const {
    PiSeries f(p_, D_);
    f.drel_ = std::min(D_, drel_ + k);
    for (int j = D_; j >= k; --j) f.c_[static_cast<size_t>(j)] = coeff(j - k);
    return f;
}

PiSeries PiSeries::scal_shift(int k) const {
    PiSeries f = *this;
    for (auto& x : f.c_) x = x.shift(k);
    return f;
}

PiSeries PiSeries::pow(int e) const {
    PiSeries acc = PiSeries::one(p_, D_, max_rel_prec(*this));
    acc.drel_ = drel_;
    PiSeries base = *this;
    int k = e;
    while (k > 0) {
        if (k & 1) acc = acc * base;
        k >>= 1;
        if (k) base = base * base;
    }
    return acc;
}

int PiSeries::min_coeff_valuation() const {
    int m = 0;
    bool seen = false;
    for (int j = 0; j <= drel_; ++j) {
        const PAdic& c = c_[static_cast<size_t>(j)];
        if (c.is_zero()) continue;
        if (!seen || c.valuation() < m) m = c.valuation();
        seen = true;
    }
    return seen ? m : 0;
}

bool PiSeries::is_zero_at(int abs_prec, int up_to_deg) const {
    int d = up_to_deg < 0 ? drel_ : std::min(up_to_deg, drel_);
    for (int j = 0; j <= d; ++j)
        if (!c_[static_cast<size_t>(j)].vanishes(abs_prec)) return false;
    return true;
}

bool PiSeries::agrees(const PiSeries& o, int abs_prec, int up_to_deg) const {
    int d = std::min(drel_, o.drel_);
    if (up_to_deg >= 0) d = std::min(d, up_to_deg);
    for (int j = 0; j <= d; ++j)
        if (!coeff(j).agrees(o.coeff(j), abs_prec)) return false;
    return true;
}

PiSeries PiSeries::cap_rel(int n) const {
    PiSeries f = *this;
    for (auto& c : f.c_) if (!c.is_zero()) c = c.cap_rel(std::min(n, c.rel_prec()));
    return f;
}

// ---- binomial basis ------------------------------------------------------

std::vector<PAdic> to_binomial(const PiSeries& f) {
    int64_t p = f.prime();
    int d = f.reliable_deg();
    int prec = max_rel_prec(f) + 2;
    auto pas = pascal_rows(p, d, d, prec);
    std::vector<PAdic> b(static_cast<size_t>(d) + 1, PAdic::zero(p));
    for (int m = 0; m <= d; ++m) {
        PAdic acc = PAdic::zero(p);
        for (int j = m; j <= d; ++j) {
            const PAdic& c = f.coeff(j);
            if (c.is_zero() && c.abs_prec() >= kExactPrec) continue;
            PAdic term = c * pas[static_cast<size_t>(j)][static_cast<size_t>(m)];
            acc = ((j - m) % 2 == 0) ? acc + term : acc - term;
        }
        b[static_cast<size_t>(m)] = acc;
    }
    return b;
}

PiSeries from_binomial(int64_t p, int trunc_deg, const std::vector<PAdic>& b, int reliable_deg) {
    int L = static_cast<int>(b.size()) - 1;
    int prec = 1;
    for (const auto& x : b) prec = std::max(prec, x.rel_prec());
    auto pas = pascal_rows(p, L, std::min(L, trunc_deg), prec + 2);
    PiSeries f(p, trunc_deg);
    for (int j = 0; j <= std::min(L, trunc_deg); ++j) {
        PAdic acc = PAdic::zero(p);
        for (int m = j; m <= L; ++m) {
            const PAdic& x = b[static_cast<size_t>(m)];
            if (x.is_zero() && x.abs_prec() >= kExactPrec) continue;
            acc = acc + x * pas[static_cast<size_t>(m)][static_cast<size_t>(j)];
        }
        f.set_coeff(j, acc);
    }
    return f.with_reliable(reliable_deg);
}

std::vector<PAdic> binom_row(const PAdic& e, int deg, int out_prec) {
    int64_t p = e.prime();
    std::vector<PAdic> row(static_cast<size_t>(deg) + 1);
    int nbig = out_prec + factorial_valuation(p, deg) + 4;
    PAdic cur = PAdic::from_int(p, 1, nbig);
    row[0] = cur;
    for (int j = 1; j <= deg; ++j) {
        PAdic factor = e - PAdic::from_int(p, j - 1, nbig + 4);
        cur = cur * factor / PAdic::from_int(p, j, nbig + 4);
        row[static_cast<size_t>(j)] = cur.cap_rel(out_prec + 2);
    }
    return row;
}

PiSeries one_plus_pi_pow(int64_t p, const PAdic& e, int trunc_deg, int out_prec) {
    auto row = binom_row(e, trunc_deg, out_prec);
    return PiSeries::from_coeffs(p, std::move(row));
}

PAdic one_plus_p_pow(const PAdic& c, int out_prec) {
    int64_t p = c.prime();
    // sum_j C(c, j) p^j; terms beyond out_prec are invisible
    int terms = out_prec + 2;
    auto row = binom_row(c, terms, out_prec + 2);
    PAdic acc = PAdic::zero(p);
    for (int j = 0; j <= terms; ++j) acc = acc + row[static_cast<size_t>(j)].shift(j);
    return acc.cap_abs(out_prec);
}

// ---- operators -----------------------------------------------------------

PiSeries frobenius(const PiSeries& f) {
    int64_t p = f.prime();
    int d = f.reliable_deg();
    int D = f.trunc_deg();
    auto in_abs = coeff_abs(f, d);
    int wabs = 4;
    for (int j = 0; j <= d; ++j)
        if (in_abs[static_cast<size_t>(j)] < kExactPrec / 4)
            wabs = std::max(wabs, in_abs[static_cast<size_t>(j)]);
    auto b = to_binomial(promote_series(f, wabs + 2, d).poly_truncate(d));
    int prec = 1;
    for (const auto& x : b) prec = std::max(prec, x.rel_prec());
    auto pas = pascal_rows(p, static_cast<int>(p) * d, D, prec + 2);
    PiSeries out(p, D);
    int prefix = kExactPrec;
    std::vector<int> caps(static_cast<size_t>(D) + 1, kExactPrec);
    for (int j = 0; j <= D; ++j) {
        if (j <= d) prefix = std::min(prefix, in_abs[static_cast<size_t>(j)]);
        caps[static_cast<size_t>(j)] = prefix;
    }
    for (int j = 0; j <= D; ++j) {
        PAdic acc = PAdic::zero(p);
        for (int m = 0; m <= d; ++m) {
            const PAdic& x = b[static_cast<size_t>(m)];
            if (x.is_zero() && x.abs_prec() >= kExactPrec) continue;
            const auto& row = pas[static_cast<size_t>(p * m)];
            if (j < static_cast<int>(row.size())) acc = acc + x * row[static_cast<size_t>(j)];
        }
        out.set_coeff(j, cap_to(acc, caps[static_cast<size_t>(j)]));
    }
    // Coefficients above the input's reliable degree only see the dropped
    // tail through p-adically small terms; record the induced precision.
    int content = std::min(0, f.min_coeff_valuation());
    for (int j = d + 1; j <= D; ++j) {
        int bound = d + 1 - (j - d - 1 + static_cast<int>(p) - 2) / (static_cast<int>(p) - 1) + content;
        out.set_coeff(j, cap_to(out.coeff(j), bound));
    }
    int drel = std::min(D, static_cast<int>(p) * d + static_cast<int>(p) - 1);
    return out.with_reliable(drel);
}

PiSeries frobenius_iter(const PiSeries& f, int n) {
    PiSeries g = f;
    for (int i = 0; i < n; ++i) g = frobenius(g);
    return g;
}

PiSeries psi(const PiSeries& f) {
    int64_t p = f.prime();
    int d = f.reliable_deg();
    auto in_abs = coeff_abs(f, d);
    int wabs = 4;
    for (int j = 0; j <= d; ++j)
        if (in_abs[static_cast<size_t>(j)] < kExactPrec / 4)
            wabs = std::max(wabs, in_abs[static_cast<size_t>(j)]);
    auto b = to_binomial(promote_series(f, wabs + 2, d).poly_truncate(d));
    int L = d / static_cast<int>(p);
    std::vector<PAdic> bp(static_cast<size_t>(L) + 1, PAdic::zero(p));
    for (int m = 0; m <= L; ++m) bp[static_cast<size_t>(m)] = b[static_cast<size_t>(p * m)];
    PiSeries out = from_binomial(p, f.trunc_deg(), bp, L);
    // pi^e contributes to the degree-j output with valuation at least
    // (e - pj)/(p-1) - 1, and the dropped tail beyond the reliable degree
    // behaves like an e = d+1 term
    int content = std::min(0, f.min_coeff_valuation());
    for (int j = 0; j <= L; ++j) {
        int tail = floor_div(d - static_cast<int>(p) * j, static_cast<int>(p) - 1) + content;
        int dep_min = kExactPrec;
        for (int e = 0; e <= d; ++e) {
            if (in_abs[static_cast<size_t>(e)] >= kExactPrec) continue;
            int gain = std::max(0, floor_div(e - static_cast<int>(p) * j, static_cast<int>(p) - 1) - 1);
            dep_min = std::min(dep_min, in_abs[static_cast<size_t>(e)] + gain);
        }
        out.set_coeff(j, cap_to(out.coeff(j), std::min(tail, dep_min)));
    }
    return out;
}

PiSeries project_psi0(const PiSeries& f) {
    PiSeries proj = f - frobenius(psi(f));
    return proj.with_reliable(f.reliable_deg());
}

PiSeries derivation(const PiSeries& f) {
    int64_t p = f.prime();
    int D = f.trunc_deg();
    PiSeries out(p, D);
    int prec = max_rel_prec(f) + 2;
    for (int j = 0; j < D; ++j) {
        PAdic t = PAdic::from_int(p, j + 1, prec) * f.coeff(j + 1);
        if (j > 0) t = t + PAdic::from_int(p, j, prec) * f.coeff(j);
        out.set_coeff(j, t);
    }
    return out.with_reliable(std::min(f.reliable_deg(), D) - 1);
}

GammaAction::GammaAction(int64_t p, int trunc_deg, PAdic chi, int out_prec)
    : p_(p), D_(trunc_deg), chi_(std::move(chi)), out_prec_(out_prec) {
    rows_.resize(static_cast<size_t>(D_) + 1);
    for (int m = 0; m <= D_; ++m) {
        PAdic e = chi_ * PAdic::from_int(p_, m, chi_.rel_prec() + 4);
        rows_[static_cast<size_t>(m)] = binom_row(e, D_, out_prec_ + 2);
    }
}

PiSeries GammaAction::apply(const PiSeries& f) const {
    if (f.prime() != p_) throw ConfigError("GammaAction: prime mismatch");
    int D = std::min(D_, f.trunc_deg());
    int d = std::min(f.reliable_deg(), D);
    auto in_abs = coeff_abs(f, d);
    int wabs = 4;
    for (int j = 0; j <= d; ++j)
        if (in_abs[static_cast<size_t>(j)] < kExactPrec / 4)
            wabs = std::max(wabs, in_abs[static_cast<size_t>(j)]);
    auto b = to_binomial(promote_series(f, wabs + 2, d).poly_truncate(d));
    PiSeries out(p_, f.trunc_deg());
    int prefix = kExactPrec;
    for (int j = 0; j <= D; ++j) {
        if (j <= d) prefix = std::min(prefix, in_abs[static_cast<size_t>(j)]);
        PAdic acc = PAdic::zero(p_);
        for (int m = 0; m <= d; ++m) {
            const PAdic& x = b[static_cast<size_t>(m)];
            if (x.is_zero() && x.abs_prec() >= kExactPrec) continue;
            acc = acc + x * rows_[static_cast<size_t>(m)][static_cast<size_t>(j)];
        }
        out.set_coeff(j, cap_to(acc, std::min(prefix, out_prec_ + 2)));
    }
    return out.with_reliable(d);
}

PiSeries gamma_act(const PiSeries& f, uint32_t delta_index, const PAdic& gamma_exp, int out_prec) {
    int64_t p = f.prime();
    int nbig = out_prec + factorial_valuation(p, f.trunc_deg()) + 8;
    PAdic chi = one_plus_p_pow(gamma_exp, nbig);
    uint32_t am = delta_index % static_cast<uint32_t>(p);
    if (am >= 2) chi = chi * teichmuller(p, am, nbig);
    GammaAction g(p, f.trunc_deg(), chi, out_prec);
    return g.apply(f);
}

PiSeries divide_series_impl(const PiSeries& f, const PiSeries& g, bool integral_rule) {
    if (f.prime() != g.prime()) throw ConfigError("divide: prime mismatch");
    int64_t p = f.prime();
    int abs_work = std::max(1, std::min(max_rel_prec(f), max_rel_prec(g)));
    // pi-order of g
    int s = -1;
    for (int j = 0; j <= g.reliable_deg(); ++j) {
        if (!g.coeff(j).is_zero()) { s = j; break; }
    }
    if (s < 0) throw DivisionByZero("divide: divisor vanishes at tracked precision");
    for (int j = 0; j < s; ++j)
        if (!f.coeff(j).vanishes(abs_work))
            throw NotDivisible("divide: pi-order obstruction at degree " + std::to_string(j));
    bool require_integral = integral_rule && f.min_coeff_valuation() >= 0 && g.min_coeff_valuation() >= 0;
    int D = std::min(f.trunc_deg(), g.trunc_deg());
    int dout = std::min(f.reliable_deg(), g.reliable_deg()) - s;
    dout = std::min(dout, D - s);
    if (dout < 0) throw NotDivisible("divide: nothing reliable left after the shift");
    PAdic g0 = g.coeff(s);
    PiSeries h(p, D);
    for (int j = 0; j <= dout; ++j) {
        PAdic acc = f.coeff(j + s);
        for (int i = 1; i <= j; ++i) acc = acc - g.coeff(s + i) * h.coeff(j - i);
        PAdic q = acc / g0;
        if (require_integral && !q.is_zero() && q.valuation() < 0 && !q.vanishes(0))
            throw NotDivisible("divide: quotient coefficient " + std::to_string(j) + " is not integral");
        h.set_coeff(j, q);
    }
    return h.with_reliable(dout);
}

PiSeries divide_exact(const PiSeries& f, const PiSeries& g) { return divide_series_impl(f, g, true); }
PiSeries divide_series(const PiSeries& f, const PiSeries& g) { return divide_series_impl(f, g, false); }

PiSeries invert_series(const PiSeries& g) {
    PiSeries one = PiSeries::one(g.prime(), g.trunc_deg(), max_rel_prec(g));
    return divide_series_impl(one, g, false);
}

PAdic eval_at_zero(const PiSeries& f) { return f.coeff(0); }

int lowest_order(const PiSeries& f, int abs_prec) {
    bool any = false;
    int m = 0;
    for (int j = 0; j <= f.reliable_deg(); ++j) {
        const PAdic& c = f.coeff(j);
        if (c.is_zero() || c.vanishes(abs_prec)) continue;
        if (!any || c.valuation() < m) m = c.valuation();
        any = true;
    }
    if (!any) throw AllZero("lowest_order: series vanishes at tracked precision");
    for (int j = 0; j <= f.reliable_deg(); ++j) {
        const PAdic& c = f.coeff(j);
        if (!c.is_zero() && !c.vanishes(abs_prec) && c.valuation() == m) return j;
    }
    throw AllZero("lowest_order: unreachable");
}

// ---- distinguished series -------------------------------------------------

PiSeries series_q(int64_t p, int trunc_deg, int prec) {
    auto pas = pascal_rows(p, static_cast<int>(p) - 1, static_cast<int>(p) - 1, prec);
    PiSeries f(p, trunc_deg);
    for (int j = 0; j <= std::min<int>(trunc_deg, static_cast<int>(p) - 1); ++j) {
        PAdic acc = PAdic::zero(p);
        for (int i = j; i <= static_cast<int>(p) - 1; ++i)
            acc = acc + pas[static_cast<size_t>(i)][static_cast<size_t>(j)];
        f.set_coeff(j, acc);
    }
    return f;
}

PiSeries series_phi_pi(int64_t p, int trunc_deg, int prec) {
    auto pas = pascal_rows(p, static_cast<int>(p), static_cast<int>(p), prec);
    PiSeries f(p, trunc_deg);
    for (int j = 1; j <= std::min<int>(trunc_deg, static_cast<int>(p)); ++j)
        f.set_coeff(j, pas[static_cast<size_t>(p)][static_cast<size_t>(j)]);
    return f;
}

PiSeries series_cyc_poly(int64_t p, int m, int trunc_deg, int prec) {
    if (m < 1) throw ConfigError("series_cyc_poly: m >= 1");
    PiSeries acc(p, trunc_deg);
    int nbig = prec + factorial_valuation(p, trunc_deg) + 8;
    for (int i = 0; i < static_cast<int>(p); ++i) {
        PAdic e = PAdic::from_int(p, i, nbig).shift(m - 1);
        acc = acc + one_plus_pi_pow(p, e, trunc_deg, prec + 2);
    }
    return acc;
}

PiSeries series_t(int64_t p, int trunc_deg, int prec) {
    PiSeries f(p, trunc_deg);
    for (int j = 1; j <= trunc_deg; ++j)
        f.set_coeff(j, PAdic::from_ratio(p, (j % 2 == 1) ? 1 : -1, j, prec + 2));
    return f;
}

PiSeries series_t_over_pi(int64_t p, int trunc_deg, int prec) {
    PiSeries f(p, trunc_deg);
    for (int j = 0; j <= trunc_deg; ++j)
        f.set_coeff(j, PAdic::from_ratio(p, (j % 2 == 0) ? 1 : -1, j + 1, prec + 2));
    return f;
}

int lambda_auto_cutoff(int64_t p, int trunc_deg, int prec) {
    int logd = 0;
    long long q = 1;
    while (q < trunc_deg) { q *= p; ++logd; }
    return prec + 2 * logd + 4;
}

static PiSeries lambda_product(int64_t p, int trunc_deg, int prec, int cutoff, int parity) {
    if (cutoff <= 0) cutoff = lambda_auto_cutoff(p, trunc_deg, prec);
    int work = prec + 8;
    PiSeries acc = PiSeries::one(p, trunc_deg, work);
    for (int m = 1; m <= cutoff; ++m) {
        if (m % 2 != parity) continue;
        acc = acc * series_cyc_poly(p, m, trunc_deg, work).scal_shift(-1);
    }
    return acc;
}

PiSeries series_lambda_plus(int64_t p, int trunc_deg, int prec, int cutoff) {
    return lambda_product(p, trunc_deg, prec, cutoff, 0);
}

PiSeries series_lambda_minus(int64_t p, int trunc_deg, int prec, int cutoff) {
    return lambda_product(p, trunc_deg, prec, cutoff, 1);
}

PiSeries series_pi0(int64_t p, int trunc_deg, int prec) {
    int nbig = prec + factorial_valuation(p, trunc_deg) + 8;
    PiSeries acc = PiSeries::constant(PAdic::from_int(p, 1 - p, prec + 2), trunc_deg);
    for (uint32_t a = 1; a < static_cast<uint32_t>(p); ++a)
        acc = acc + one_plus_pi_pow(p, teichmuller(p, a, nbig), trunc_deg, prec + 2);
    return acc;
}

PAdic eval_poly(const std::vector<PAdic>& coeffs, const PAdic& x) {
    PAdic acc = PAdic::zero(x.prime());
    for (size_t i = coeffs.size(); i-- > 0;) acc = acc * x + coeffs[i];
    return acc;
}

PiSeries compose_series(const PiSeries& f, const PiSeries& g) {
    PiSeries acc(g.prime(), g.trunc_deg());
    for (int j = f.reliable_deg(); j >= 0; --j)
        acc = acc * g + PiSeries::constant(f.coeff(j), g.trunc_deg());
    return acc.with_reliable(g.reliable_deg());
}

} // namespace wach
