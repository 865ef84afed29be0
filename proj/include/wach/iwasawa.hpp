#pragma once

#include <memory>

#include "wach/cyclotomic.hpp"
#include "wach/pi_series.hpp"

namespace wach {

// Element of the Iwasawa algebra of G_infty = Delta x Gamma (bounded = true)
// or of the distribution algebra (bounded = false), truncated in T = gamma-1
// at degree X. Grades index powers of a fixed generator of Delta.
class IwasawaElement {
public:
    IwasawaElement() = default;
    IwasawaElement(int64_t p, int X, bool bounded = true);

    static IwasawaElement zero(int64_t p, int X, bool bounded = true);
    static IwasawaElement one(int64_t p, int X, int prec, bool bounded = true);
    // The group element delta^a gamma^c (c a plain integer power).
    static IwasawaElement group_elt(int64_t p, int X, int a, long long c, int prec);
    // Gamma-part polynomial in T placed in grade a.
    static IwasawaElement from_tpoly(int64_t p, int X, int a, std::vector<PAdic> tcoeffs,
                                     bool bounded = true);

    int64_t prime() const { return p_; }
    int trunc() const { return X_; }
    bool bounded() const { return bounded_; }
    int grades() const { return static_cast<int>(g_.size()); }
    const std::vector<PAdic>& grade(int a) const { return g_[static_cast<size_t>(a)]; }
    const PAdic& coeff(int a, int l) const { return g_[static_cast<size_t>(a)][static_cast<size_t>(l)]; }
    void set_coeff(int a, int l, PAdic c);
    void add_term(int a, int l, const PAdic& c);

    IwasawaElement resized(int X) const;

    IwasawaElement operator+(const IwasawaElement& o) const;
    IwasawaElement operator-(const IwasawaElement& o) const;
    IwasawaElement operator*(const IwasawaElement& o) const;
    IwasawaElement operator-() const;
    IwasawaElement scaled(const PAdic& c) const;
    IwasawaElement scal_shift(int k) const;

    bool is_zero_at(int abs_prec) const;
    bool agrees(const IwasawaElement& o, int abs_prec) const;
    int min_coeff_valuation() const;
    // max over l of (-v(c_l))/log_p(l+1): an observed growth exponent,
    // reported but never asserted.
    double growth_hint() const;

private:
    int64_t p_ = 0;
    int X_ = -1;
    bool bounded_ = true;
    std::vector<std::vector<PAdic>> g_;
};

// Fixed primitive root used to index the Delta-grading.
uint32_t delta_generator(int64_t p);

// p_k = (1-gamma)(1-chi(gamma)^{-1}gamma)...(1-chi(gamma)^{1-k}gamma),
// chi(gamma) = 1+p.
IwasawaElement pk_element(int64_t p, int k, int X, int prec);

enum class LogVariant { plus, minus, ord };

// Pollack's log^{+/-}_{p,k} (truncated products of cyclotomic polynomials in
// gamma) and the ordinary log_{p,k} = prod_j log_p(u^{-j}gamma)/(u^{-j}gamma - 1).
IwasawaElement pollack_log(int64_t p, int k, LogVariant variant, int X, int prec, int cutoff = 0);

// Phi_m(gamma) = sum_i gamma^{i p^{m-1}} as a (truncated) element of the
// Gamma-part of the Iwasawa algebra.
IwasawaElement cyc_poly_gamma(int64_t p, int m, int X, int prec);

// Gradewise remainder modulo the degree-k polynomial p_k (unit leading
// coefficient, so the reduction is exact); the output has T-degree < k.
IwasawaElement reduce_mod_pk(const IwasawaElement& x, int k, int prec);

// Evaluate at a Dirichlet character: gamma -> gamma_value, delta^a -> tau^{ea}.
CycElt eval_char(const IwasawaElement& lambda, const DirichletChar& chi, int prec, int tower = 3);
// Evaluate at the weight-j point: gamma -> (1+p)^j, delta -> tau(r)^j.
PAdic eval_weight(const IwasawaElement& lambda, long long j, int prec);

// Mellin machinery for a fixed (p, D, X, precision) configuration: the
// group-algebra action on 1+pi, its inverse by exact linear solve, and the
// cached basis images both need.
class MellinContext {
public:
    MellinContext(int64_t p, int D, int X, int prec);

    int64_t prime() const { return p_; }
    int series_deg() const { return D_; }
    int trunc() const { return X_; }
    int prec() const { return prec_; }

    // lambda * (1+pi)
    PiSeries mellin(const IwasawaElement& lambda) const;
    // The unique lambda with mellin(lambda) = F modulo (p^prec, phi(pi)^X);
    // requires psi(F) = 0 at the working precision.
    IwasawaElement inv_mellin(const PiSeries& F, bool bounded = true) const;

    // delta^a (gamma-1)^l (1+pi)
    const PiSeries& basis_image(int a, int l) const;
    const GammaAction& gamma_action() const { return *gamma_; }
    const GammaAction& delta_action() const { return *delta_; }
    PiSeries apply_iwasawa(const IwasawaElement& lambda, const PiSeries& f) const;

    // Rank check: the induced map Lambda/p_k -> (psi=0)/phi(pi)^k is a
    // bijection of Z_p-modules of rank k(p-1).
    bool quotient_bijective(int k) const;

private:
    struct Solver;
    void build_solver() const;

    int64_t p_;
    int D_, X_, prec_;
    std::shared_ptr<GammaAction> gamma_, delta_;
    std::vector<std::vector<PiSeries>> images_; // [a][l]
    mutable std::shared_ptr<Solver> solver_;
};

// Reduce f modulo the monic polynomial phi(pi)^X (degree pX).
PiSeries reduce_mod_phi_pi_pow(const PiSeries& f, int X);

struct FourierReport {
    int level = 0;
    bool div_series = false;   // Phi_n(1+pi) divides F (evaluation test)
    bool char_vanish = false;  // all (primitive) character values of inv_mellin vanish
    bool div_tside = false;    // Phi_{n-1}(1+T) divides each grade (T at n=1)
    bool unanimous = false;
    int val_series = 0, val_char = 0, val_tside = 0; // observed zero-valuations
    int tol_series = 0, tol_char = 0, tol_tside = 0;
};

// The equivalent divisibility/vanishing predicates relating a psi=0 series
// to its measure-side transform, evaluated at finite truncation with
// explicit resolution thresholds.
class FourierChecker {
public:
    FourierChecker(int64_t p, int D, int prec, int X = 16, int tower = 3);
    FourierReport run(const PiSeries& F, int n) const;
    const MellinContext& mellin() const { return ctx_; }

private:
    int tower_;
    MellinContext ctx_;
};

} // namespace wach
