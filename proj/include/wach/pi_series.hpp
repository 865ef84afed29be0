#pragma once

#include <optional>
#include <vector>

#include "wach/padic.hpp"

namespace wach {

// Truncated power series in pi over PAdic. Coefficients are stored for
// degrees 0..trunc_deg; reliable_deg marks how far they can be trusted
// after operations (psi, substitution) that shrink the trustworthy range.
class PiSeries {
public:
    PiSeries() = default;
    PiSeries(int64_t p, int trunc_deg);

    static PiSeries zero(int64_t p, int trunc_deg) { return PiSeries(p, trunc_deg); }
    static PiSeries constant(const PAdic& c, int trunc_deg);
    static PiSeries monomial(const PAdic& c, int deg, int trunc_deg);
    static PiSeries one(int64_t p, int trunc_deg, int prec);
    static PiSeries pi(int64_t p, int trunc_deg, int prec);
    static PiSeries from_coeffs(int64_t p, std::vector<PAdic> coeffs, int reliable_deg = -1);

    int64_t prime() const { return p_; }
    int trunc_deg() const { return D_; }
    int reliable_deg() const { return drel_; }
    const PAdic& coeff(int j) const;
    void set_coeff(int j, PAdic c);

    PiSeries with_reliable(int d) const;
    // Zero out all coefficients above d (and mark them reliable as zeros of
    // the truncated polynomial).
    PiSeries poly_truncate(int d) const;
    // Change the physical truncation degree.
    PiSeries resized(int new_D) const;

    PiSeries operator+(const PiSeries& o) const;
    PiSeries operator-(const PiSeries& o) const;
    PiSeries operator*(const PiSeries& o) const;
    PiSeries operator-() const;
    PiSeries scaled(const PAdic& c) const;
    PiSeries shifted(int k) const;       // multiply by pi^k (k >= 0)
    PiSeries scal_shift(int k) const;    // multiply by p^k (any sign)
    PiSeries pow(int e) const;

    // Smallest valuation among reliable, non-vanishing coefficients
    // (0 for the zero series).
    int min_coeff_valuation() const;
    bool is_zero_at(int abs_prec, int up_to_deg = -1) const;
    bool agrees(const PiSeries& o, int abs_prec, int up_to_deg = -1) const;
    PiSeries cap_rel(int n) const;

private:
    void check_compat(const PiSeries& o) const;

    int64_t p_ = 0;
    int D_ = -1;
    int drel_ = -1;
    std::vector<PAdic> c_;
};

// ---- binomial (1+pi)-basis machinery ----------------------------------

// Coordinates of f modulo pi^{drel+1} in the basis (1+pi)^m, m = 0..drel.
std::vector<PAdic> to_binomial(const PiSeries& f);
PiSeries from_binomial(int64_t p, int trunc_deg, const std::vector<PAdic>& b, int reliable_deg);

// Row C(e, j), j = 0..deg, for a p-adic exponent e; exact integers.
std::vector<PAdic> binom_row(const PAdic& e, int deg, int out_prec);
// (1+pi)^e as a truncated series.
PiSeries one_plus_pi_pow(int64_t p, const PAdic& e, int trunc_deg, int out_prec);
// (1+p)^c for a p-adic exponent c.
PAdic one_plus_p_pow(const PAdic& c, int out_prec);

// ---- the operator calculus ---------------------------------------------

// f((1+pi)^p - 1)
PiSeries frobenius(const PiSeries& f);
PiSeries frobenius_iter(const PiSeries& f, int n);
// Canonical left inverse of frobenius: keeps every p-th coefficient in the
// (1+pi)-basis. Output reliable to floor(reliable/p).
PiSeries psi(const PiSeries& f);
// f - frobenius(psi(f)) : the projection onto the psi = 0 part.
PiSeries project_psi0(const PiSeries& f);
// (1+pi) * d/dpi
PiSeries derivation(const PiSeries& f);

// Substitution pi -> (1+pi)^chi - 1 for a unit exponent chi, with a
// precomputed binomial table (construction is the expensive part).
class GammaAction {
public:
    GammaAction(int64_t p, int trunc_deg, PAdic chi, int out_prec);
    PiSeries apply(const PiSeries& f) const;
    const PAdic& chi() const { return chi_; }
    int trunc_deg() const { return D_; }

private:
    int64_t p_;
    int D_;
    PAdic chi_;
    int out_prec_;
    std::vector<std::vector<PAdic>> rows_; // rows_[m][j] = C(m*chi, j)
};

// One-shot group action: chi = teichmuller(a) * (1+p)^c. Slow path; reuse a
// GammaAction when applying the same element repeatedly.
PiSeries gamma_act(const PiSeries& f, uint32_t delta_index, const PAdic& gamma_exp, int out_prec);

// Exact division: h with f = g*h up to truncation. When both inputs are
// integral the quotient must be too, otherwise NotDivisible.
PiSeries divide_exact(const PiSeries& f, const PiSeries& g);
PiSeries divide_series(const PiSeries& f, const PiSeries& g); // no integrality requirement
PiSeries invert_series(const PiSeries& g);

// Constant coefficient.
PAdic eval_at_zero(const PiSeries& f);
// Index of the first unit coefficient after dividing out the coefficient
// content p^{min valuation}; AllZero if the series vanishes at precision.
int lowest_order(const PiSeries& f, int abs_prec);

// ---- distinguished series ----------------------------------------------

// q = ((1+pi)^p - 1)/pi, the p-th cyclotomic polynomial at 1+pi.
PiSeries series_q(int64_t p, int trunc_deg, int prec);
PiSeries series_phi_pi(int64_t p, int trunc_deg, int prec);
// Phi_m(1+pi) = sum_i (1+pi)^{i p^{m-1}}, the p^m-th cyclotomic polynomial.
PiSeries series_cyc_poly(int64_t p, int m, int trunc_deg, int prec);
PiSeries series_t(int64_t p, int trunc_deg, int prec);
PiSeries series_t_over_pi(int64_t p, int trunc_deg, int prec);
// Half logarithms: products of Phi_m(1+pi)/p over even (plus) or odd
// (minus) m. cutoff 0 picks a cutoff from the precision budget.
PiSeries series_lambda_plus(int64_t p, int trunc_deg, int prec, int cutoff = 0);
PiSeries series_lambda_minus(int64_t p, int trunc_deg, int prec, int cutoff = 0);
// pi0 = -p + sum_a (1+pi)^{teich(a)}, generator of the Delta-invariants.
PiSeries series_pi0(int64_t p, int trunc_deg, int prec);

int lambda_auto_cutoff(int64_t p, int trunc_deg, int prec);

// sum over j <= deg of c_j x^j by Horner.
PAdic eval_poly(const std::vector<PAdic>& coeffs, const PAdic& x);

// f(g(pi)) for a polynomial f (coefficients of f read up to its reliable
// degree); plain Horner, O(deg(f)) series multiplications.
PiSeries compose_series(const PiSeries& f, const PiSeries& g);

// p-adic valuation of n! (Legendre).
int factorial_valuation(int64_t p, int n);

} // namespace wach
