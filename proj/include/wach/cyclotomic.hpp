#pragma once

#include "wach/pi_series.hpp"

namespace wach {

// Element of Q_p(zeta_{p^n}) in the power basis {zeta^i}, reduced modulo the
// p^n-th cyclotomic polynomial. Level 0 is Q_p itself.
class CycElt {
public:
    CycElt() = default;
    CycElt(int64_t p, int level);
    static CycElt scalar(int64_t p, int level, const PAdic& c);
    static CycElt zeta(int64_t p, int level, int prec); // the chosen root of unity
    static CycElt from_coords(int64_t p, int level, std::vector<PAdic> coords);

    int64_t prime() const { return p_; }
    int level() const { return level_; }
    int dim() const { return static_cast<int>(co_.size()); }
    const PAdic& coord(int i) const { return co_[static_cast<size_t>(i)]; }
    const std::vector<PAdic>& coords() const { return co_; }

    CycElt operator+(const CycElt& o) const;
    CycElt operator-(const CycElt& o) const;
    CycElt operator*(const CycElt& o) const;
    CycElt operator-() const;
    CycElt scaled(const PAdic& c) const;
    CycElt pow(long long e) const;

    // Galois action zeta -> zeta^u, u coprime to p.
    CycElt galois(long long u) const;
    // Inclusion into a higher level (zeta_m = zeta_n^{p^{n-m}}).
    CycElt embed(int to_level) const;
    // Express in the level-m subfield; coordinates outside it must vanish
    // at the given absolute precision.
    CycElt descend(int to_level, int abs_tol) const;

    bool is_zero_at(int abs_prec) const;
    bool agrees(const CycElt& o, int abs_prec) const;
    // Smallest coordinate valuation (kExactPrec if it vanishes).
    int min_valuation(int abs_prec) const;

private:
    void reduce(std::vector<PAdic>& v) const;
    static int dim_for(int64_t p, int level);

    int64_t p_ = 0;
    int level_ = 0;
    std::vector<PAdic> co_;
};

// f(zeta_{p^n} - 1) for a truncated series f; n <= tower levels are allowed.
CycElt eval_series_at_level(const PiSeries& f, int n, int tower = 3);
// Same, but evaluated at the truncation degree that maximizes the tracked
// precision (useful when the input carries degree-dependent caps).
CycElt eval_series_balanced(const PiSeries& f, int n, int tower = 3);

// Trace from level n down to level m < n.
CycElt rel_trace(const CycElt& x, int down_to, int tower = 3);

// Dirichlet character of conductor p^n: a Delta-exponent e (Teichmueller
// power) together with a root of unity of exact order p^{n-1} giving the
// value on the Gamma-generator.
struct DirichletChar {
    int64_t p = 0;
    int cond_exp = 0;   // conductor p^{cond_exp}
    int delta_exp = 0;  // value on Delta is teich(a)^delta_exp
    CycElt gamma_value; // level max(cond_exp-1, 0)

    static DirichletChar primitive(int64_t p, int cond_exp, int delta_exp, int prec,
                                   long long gamma_power = 1);
    bool is_primitive() const;
    // chi(a) for a in (Z/p)^x, i.e. the Delta-part value.
    PAdic delta_value(uint32_t a, int prec) const;
};

// Gauss sum sum_{a mod p, a != 0} chi(a) zeta_p^a for conductor-p characters.
CycElt gauss_sum(const DirichletChar& chi, int prec);

} // namespace wach
