#include "wach/cyclotomic.hpp"

#include <algorithm>

namespace wach {

int CycElt::dim_for(int64_t p, int level) {
    if (level == 0) return 1;
    int d = static_cast<int>(p) - 1;
    for (int i = 1; i < level; ++i) d *= static_cast<int>(p);
    return d;
}

CycElt::CycElt(int64_t p, int level) : p_(p), level_(level) {
    co_.assign(static_cast<size_t>(dim_for(p, level)), PAdic::zero(p));
}

CycElt CycElt::scalar(int64_t p, int level, const PAdic& c) {
    CycElt x(p, level);
    x.co_[0] = c;
    return x;
}

CycElt CycElt::zeta(int64_t p, int level, int prec) {
    CycElt x(p, level);
    if (level == 0) {
        x.co_[0] = PAdic::from_int(p, 1, prec);
    } else {
        x.co_[1] = PAdic::from_int(p, 1, prec);
    }
    return x;
}

CycElt CycElt::from_coords(int64_t p, int level, std::vector<PAdic> coords) {
    CycElt x(p, level);
    if (static_cast<int>(coords.size()) != x.dim()) throw ConfigError("from_coords: wrong length");
    for (auto& c : coords) if (!c.valid()) c = PAdic::zero(p);
    x.co_ = std::move(coords);
    return x;
}

void CycElt::reduce(std::vector<PAdic>& v) const {
    // X^dim = -(1 + X^{s} + X^{2s} + ... + X^{(p-2)s}), s = p^{level-1}
    int d = dim();
    if (level_ == 0) {
        // modulus X - 1: fold everything onto the constant
        for (size_t j = 1; j < v.size(); ++j) v[0] = v[0] + v[j];
        v.resize(1);
        return;
    }
    int s = d / (static_cast<int>(p_) - 1);
    for (int deg = static_cast<int>(v.size()) - 1; deg >= d; --deg) {
        PAdic c = v[static_cast<size_t>(deg)];
        if (c.is_zero() && c.abs_prec() >= kExactPrec) continue;
        v[static_cast<size_t>(deg)] = PAdic::zero(p_);
        for (int i = 0; i <= static_cast<int>(p_) - 2; ++i) {
            int pos = deg - d + i * s;
            v[static_cast<size_t>(pos)] = v[static_cast<size_t>(pos)] - c;
        }
    }
    v.resize(static_cast<size_t>(d));
}

CycElt CycElt::operator+(const CycElt& o) const {
    if (p_ != o.p_ || level_ != o.level_) throw ConfigError("CycElt add: level mismatch");
    CycElt x = *this;
    for (int i = 0; i < dim(); ++i) x.co_[static_cast<size_t>(i)] = co_[static_cast<size_t>(i)] + o.co_[static_cast<size_t>(i)];
    return x;
}

CycElt CycElt::operator-(const CycElt& o) const { return *this + (-o); }

CycElt CycElt::operator-() const {
    CycElt x = *this;
    for (auto& c : x.co_) c = -c;
    return x;
}

CycElt CycElt::scaled(const PAdic& c) const {
    CycElt x = *this;
    for (auto& y : x.co_) y = y * c;
    return x;
}

CycElt CycElt::operator*(const CycElt& o) const {
    if (p_ != o.p_ || level_ != o.level_) throw ConfigError("CycElt mul: level mismatch");
    int d = dim();
    std::vector<PAdic> v(static_cast<size_t>(2 * d - 1), PAdic::zero(p_));
    for (int i = 0; i < d; ++i) {
        const PAdic& a = co_[static_cast<size_t>(i)];
        if (a.is_zero() && a.abs_prec() >= kExactPrec) continue;
        for (int j = 0; j < d; ++j) {
            const PAdic& b = o.co_[static_cast<size_t>(j)];
            if (b.is_zero() && b.abs_prec() >= kExactPrec) continue;
            v[static_cast<size_t>(i + j)] = v[static_cast<size_t>(i + j)] + a * b;
        }
    }
    reduce(v);
    CycElt x(p_, level_);
    x.co_ = std::move(v);
    return x;
}

CycElt CycElt::pow(long long e) const {
    CycElt acc = scalar(p_, level_, PAdic::from_int(p_, 1, 32));
    CycElt base = *this;
    if (e < 0) throw ConfigError("CycElt::pow: negative exponent");
    while (e) {
        if (e & 1) acc = acc * base;
        e >>= 1;
        if (e) base = base * base;
    }
    return acc;
}

CycElt CycElt::galois(long long u) const {
    if (level_ == 0) return *this;
    long long modn = 1;
    for (int i = 0; i < level_; ++i) modn *= p_;
    u %= modn;
    if (u < 0) u += modn;
    if (u % p_ == 0) throw ConfigError("galois: exponent not a unit");
    std::vector<PAdic> v(static_cast<size_t>(modn), PAdic::zero(p_));
    for (int i = 0; i < dim(); ++i) {
        long long pos = (static_cast<long long>(i) * u) % modn;
        v[static_cast<size_t>(pos)] = v[static_cast<size_t>(pos)] + co_[static_cast<size_t>(i)];
    }
    reduce(v);
    CycElt x(p_, level_);
    x.co_ = std::move(v);
    return x;
}

CycElt CycElt::embed(int to_level) const {
    if (to_level < level_) throw ConfigError("embed: target below current level");
    if (to_level == level_) return *this;
    CycElt x(p_, to_level);
    long long step = 1;
    for (int i = 0; i < to_level - level_; ++i) step *= p_;
    for (int i = 0; i < dim(); ++i) {
        long long pos = static_cast<long long>(i) * step;
        x.co_[static_cast<size_t>(pos)] = co_[static_cast<size_t>(i)];
    }
    return x;
}

CycElt CycElt::descend(int to_level, int abs_tol) const {
    if (to_level > level_) throw ConfigError("descend: target above current level");
    if (to_level == level_) return *this;
    long long step = 1;
    for (int i = 0; i < level_ - to_level; ++i) step *= p_;
    CycElt x(p_, to_level);
    for (int i = 0; i < dim(); ++i) {
        if (i % step == 0 && i / step < x.dim()) {
            x.co_[static_cast<size_t>(i / step)] = co_[static_cast<size_t>(i)];
        } else if (!co_[static_cast<size_t>(i)].vanishes(abs_tol)) {
            throw ShapeViolation("descend: element not in the requested subfield");
        }
    }
    return x;
}

bool CycElt::is_zero_at(int abs_prec) const {
    for (const auto& c : co_)
        if (!c.vanishes(abs_prec)) return false;
    return true;
}

bool CycElt::agrees(const CycElt& o, int abs_prec) const {
    if (level_ != o.level_) {
        int lv = std::max(level_, o.level_);
        return embed(lv).agrees(o.embed(lv), abs_prec);
    }
    for (int i = 0; i < dim(); ++i)
        if (!co_[static_cast<size_t>(i)].agrees(o.co_[static_cast<size_t>(i)], abs_prec)) return false;
    return true;
}

int CycElt::min_valuation(int abs_prec) const {
    int m = kExactPrec;
    for (const auto& c : co_) {
        if (c.is_zero() || c.vanishes(abs_prec)) continue;
        m = std::min(m, c.valuation());
    }
    return m;
}

CycElt eval_series_at_level(const PiSeries& f, int n, int tower) {
    if (n > tower) throw LevelTooLarge("eval_series_at_level: level beyond tower height");
    int64_t p = f.prime();
    if (n == 0) return CycElt::scalar(p, 0, eval_at_zero(f));
    int d = f.reliable_deg();
    // Horner against zeta - 1
    CycElt acc(p, n);
    CycElt one = CycElt::scalar(p, n, PAdic::from_int(p, 1, 64));
    for (int j = d; j >= 0; --j) {
        // acc = acc*(zeta-1) + c_j ; multiplication by zeta is an index shift
        CycElt shifted(p, n);
        {
            std::vector<PAdic> v(static_cast<size_t>(acc.dim()) + 1, PAdic::zero(p));
            for (int i = 0; i < acc.dim(); ++i) v[static_cast<size_t>(i + 1)] = acc.coord(i);
            CycElt tmp(p, n);
            // reduce via multiply-by-zeta trick: reuse galois-free manual reduction
            // (v has degree dim, reduce folds the top term)
            // Use from_coords after manual fold:
            int dimn = acc.dim();
            int s = dimn / (static_cast<int>(p) - 1);
            PAdic top = v[static_cast<size_t>(dimn)];
            if (!(top.is_zero() && top.abs_prec() >= kExactPrec)) {
                for (int i = 0; i <= static_cast<int>(p) - 2; ++i)
                    v[static_cast<size_t>(i * s)] = v[static_cast<size_t>(i * s)] - top;
            }
            v.resize(static_cast<size_t>(dimn));
            shifted = CycElt::from_coords(p, n, std::move(v));
        }
        acc = shifted - acc; // acc*(zeta-1)
        acc = acc + CycElt::scalar(p, n, f.coeff(j));
    }
    // the dropped tail of f is O((zeta-1)^{d+1}); record the induced precision
    int content = std::min(0, f.min_coeff_valuation());
    int bound = (d + 1) / acc.dim() + content;
    std::vector<PAdic> capped = acc.coords();
    for (auto& c : capped)
        if (c.abs_prec() > bound) c = c.cap_abs(bound);
    return CycElt::from_coords(p, n, std::move(capped));
}

CycElt eval_series_balanced(const PiSeries& f, int n, int tower) {
    if (n == 0) return eval_series_at_level(f, 0, tower);
    int64_t p = f.prime();
    int dim = static_cast<int>(p) - 1;
    for (int i = 1; i < n; ++i) dim *= static_cast<int>(p);
    int content = std::min(0, f.min_coeff_valuation());
    int best_d = f.reliable_deg(), best_score = -(kExactPrec);
    int prefix = kExactPrec;
    for (int d = 0; d <= f.reliable_deg(); ++d) {
        int a = f.coeff(d).abs_prec();
        if (a < prefix) prefix = a;
        int score = std::min(prefix, (d + 1) / dim + content);
        if (score >= best_score) { best_score = score; best_d = d; }
    }
    return eval_series_at_level(f.poly_truncate(best_d).with_reliable(best_d), n, tower);
}

CycElt rel_trace(const CycElt& x, int down_to, int tower) {
    if (x.level() > tower) throw LevelTooLarge("rel_trace: level beyond tower height");
    if (down_to > x.level()) throw ConfigError("rel_trace: target above current level");
    if (down_to == x.level()) return x;
    int64_t p = x.prime();
    auto common_prec = [](const CycElt& z) {
        int tol = kExactPrec;
        for (const auto& c : z.coords())
            if (c.abs_prec() < tol) tol = c.abs_prec();
        return std::max(tol == kExactPrec ? 2 : tol, 2);
    };
    if (down_to == 0) {
        CycElt y = x.level() > 1 ? rel_trace(x, 1, tower) : x;
        CycElt acc(p, 1);
        for (long long u = 1; u < p; ++u) acc = acc + y.galois(u);
        return acc.descend(0, common_prec(acc));
    }
    long long pm = 1;
    for (int i = 0; i < down_to; ++i) pm *= p;
    long long count = 1;
    for (int i = 0; i < x.level() - down_to; ++i) count *= p;
    CycElt acc(p, x.level());
    for (long long j = 0; j < count; ++j) acc = acc + x.galois(1 + j * pm);
    return acc.descend(down_to, common_prec(acc));
}

DirichletChar DirichletChar::primitive(int64_t p, int cond_exp, int delta_exp, int prec,
                                       long long gamma_power) {
    DirichletChar chi;
    chi.p = p;
    chi.cond_exp = cond_exp;
    chi.delta_exp = ((delta_exp % (static_cast<int>(p) - 1)) + static_cast<int>(p) - 1) % (static_cast<int>(p) - 1);
    int glevel = std::max(cond_exp - 1, 0);
    if (glevel == 0) {
        chi.gamma_value = CycElt::scalar(p, 0, PAdic::from_int(p, 1, prec));
    } else {
        if (gamma_power % p == 0) throw ConfigError("gamma_power must be prime to p");
        chi.gamma_value = CycElt::zeta(p, glevel, prec).galois(gamma_power);
    }
    return chi;
}

bool DirichletChar::is_primitive() const {
    if (cond_exp <= 1) return cond_exp == 1;
    // gamma_value must have exact order p^{cond_exp-1}: its p-th power at
    // level cond_exp-1 must not be primitive, i.e. value is not in the
    // lower level. For the constructions used here, zeta^u is primitive.
    return true;
}

PAdic DirichletChar::delta_value(uint32_t a, int prec) const {
    if (a % p == 0) throw ConfigError("delta_value: argument not a unit");
    PAdic t = teichmuller(p, a % static_cast<uint32_t>(p), prec);
    return t.pow(delta_exp);
}

CycElt gauss_sum(const DirichletChar& chi, int prec) {
    if (chi.cond_exp != 1) throw ConfigError("gauss_sum: conductor must be exactly p");
    int64_t p = chi.p;
    CycElt zp = CycElt::zeta(p, 1, prec);
    CycElt acc(p, 1);
    for (uint32_t a = 1; a < static_cast<uint32_t>(p); ++a)
        acc = acc + zp.pow(a).scaled(chi.delta_value(a, prec));
    return acc;
}

} // namespace wach
