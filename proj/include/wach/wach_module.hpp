#pragma once

#include "wach/iwasawa.hpp"
#include "wach/quadext.hpp"

namespace wach {

struct AssumptionViolated : Error {
    explicit AssumptionViolated(const std::string& msg) : Error(msg) {}
};

// Row-major 2x2 matrix over any coefficient type with ring operations.
template <class T>
struct Mat2x2 {
    T a, b, c, d; // [[a, b], [c, d]]
};

using MatScalar = Mat2x2<PAdic>;
using MatSeries = Mat2x2<PiSeries>;
using MatIwasawa = Mat2x2<IwasawaElement>;

template <class T>
Mat2x2<T> mat_mul(const Mat2x2<T>& x, const Mat2x2<T>& y) {
    return {x.a * y.a + x.b * y.c, x.a * y.b + x.b * y.d,
            x.c * y.a + x.d * y.c, x.c * y.b + x.d * y.d};
}

template <class T>
Mat2x2<T> mat_add(const Mat2x2<T>& x, const Mat2x2<T>& y) {
    return {x.a + y.a, x.b + y.b, x.c + y.c, x.d + y.d};
}

template <class T>
Mat2x2<T> mat_transpose(const Mat2x2<T>& x) { return {x.a, x.c, x.b, x.d}; }

// adjugate: det(M) M^{-1}
template <class T>
Mat2x2<T> mat_adj(const Mat2x2<T>& x) { return {x.d, -x.b, -x.c, x.a}; }

template <class T>
T mat_det(const Mat2x2<T>& x) { return x.a * x.d - x.b * x.c; }

MatSeries mat_frobenius(const MatSeries& x);
MatSeries mat_apply(const GammaAction& g, const MatSeries& x);
MatSeries mat_scaled(const MatSeries& x, const PAdic& c);
bool mat_agrees(const MatSeries& x, const MatSeries& y, int abs_prec);

struct PrecisionBudget {
    int N = 16;       // relative p-adic digits of the published results
    int D = 96;       // pi-truncation degree
    int X = 8;        // T-truncation degree
    int n_max = 3;    // minimum product cutoff for the half-logarithms
    int tower = 2;    // cyclotomic tower height used in evaluations
    int extra_digits = 0; // additional internal working digits
};

enum class WachMode { supersingular, ordinary };

struct AssumptionFlags {
    bool a = true; // k >= 3 or ap = 0
    bool b = true; // ap != p^j + p^{k-2-j}
    bool c = true; // v(ap) > floor((k-2)/(p-1))
    bool d = true; // p >= k - 1
};

// The full per-form package: the twisted z-polynomial, the phi-matrix P on
// the canonical basis, the crystalline phi-matrix, the half logarithms, the
// base-change matrix Mprime and the derived M, at one precision budget.
class WachContext {
public:
    int64_t p = 0;
    int k = 2;
    PAdic ap;
    WachMode mode = WachMode::supersingular;
    PrecisionBudget budget;
    AssumptionFlags flags;

    int m = 0;      // floor((k-2)/(p-1))
    PAdic delta;    // ap / p^m (supersingular)
    PiSeries z;     // integral polynomial of degree <= k-2

    MatSeries P;       // matrix of phi on the basis
    MatScalar Aphi;    // matrix of phi on the crystalline side
    RootPair roots;

    PiSeries q, phi_pi, lambda_plus, lambda_minus, t_over_pi;
    MatSeries Mprime;  // solved base-change matrix, Mprime(0) = I
    MatSeries M;       // (t/(pi q))^{k-1} P^T Mprime^{-1}

    int wprec = 0;     // internal working digits

    PiSeries lambda_plus_pow() const;  // lambda_+^{k-1}
    PiSeries lambda_minus_pow() const;
    bool ap_is_zero() const { return ap.is_zero(); }
    bool family_supported() const { return mode == WachMode::supersingular && (ap_is_zero() || k == 2); }
};

// Assembles the package. Supersingular mode needs v(ap) > m (fatal when
// violated); ordinary mode needs v(ap) = 0 and uses the split default
// P = diag(alpha, (beta/p^{k-1}) q^{k-1}) unless star/unit are supplied.
WachContext build_context(int64_t p, int k, const PAdic& ap, const PrecisionBudget& budget);
WachContext build_context_ordinary(int64_t p, int k, const PAdic& ap, const PrecisionBudget& budget,
                                   const PiSeries* star, const PiSeries* unit);

// Coordinates of a psi-fixed element of the module: x1, x2 in the expression
// against the canonical basis (twisted by the bookkeeping label).
struct ModuleVec {
    PiSeries x1, x2;
    int twist = 0;
};

// Coleman maps: Col_1 = x2 - phi(x1) + delta z x1, Col_2 = -q^{k-1}x1 - phi(x2).
std::pair<PiSeries, PiSeries> coleman(const ModuleVec& x, const WachContext& ctx);
// Generic form from an arbitrary phi-matrix with det = q^{k-1}:
// Col(x) = x-row * adj(P^T) - phi(x-row).
std::pair<PiSeries, PiSeries> coleman_generic(const PiSeries& x1, const PiSeries& x2,
                                              const MatSeries& P);

// psi in coordinates: (psi(x1 delta z + x2), -psi(q^{k-1} x1)).
ModuleVec psi_coords(const ModuleVec& x, const WachContext& ctx);
// phi in coordinates: q^{1-k} (phi x1, phi x2) P^T.
ModuleVec phi_coords(const ModuleVec& x, const WachContext& ctx);
// coordinates of y1 n1' + y2 n2' where n_i' is the phi-twisted basis.
ModuleVec nprime_to_coords(const PiSeries& y1, const PiSeries& y2, const WachContext& ctx);

// Solves (1-phi)x = y1 n1' + y2 n2' with psi(x) = x by summing the phi
// iterates; both y_i must be killed by psi and the iterates must contract.
ModuleVec fixed_point(const PiSeries& y1, const PiSeries& y2, const WachContext& ctx);

// The limit of (Aphi^T)^{-n} phi^{n-1}(P^T)...P^T, normalized by M'(0) = I.
MatSeries solve_Mprime(const WachContext& ctx);
MatSeries matrix_M(const WachContext& ctx, const MatSeries& Mprime);

// gamma-matrix on the basis: G_g^T = g(Mprime)^{-1} Mprime, available in the
// ap = 0 and k = 2 families.
MatSeries wach_gamma_matrix(const WachContext& ctx, const GammaAction& g);
// the induced group action on module coordinates, and on coordinates against
// the phi-twisted basis n_i' (used by the Iwasawa transform)
ModuleVec gamma_on_module(const ModuleVec& x, const WachContext& ctx, const GammaAction& g);
MatSeries nprime_gamma_matrix(const WachContext& ctx, const GammaAction& g);

enum class SprungVariant { A, B };

// C^i F_n ... F_1 with C = [[0,p],[-1,ap]] and F_m = [[0, Phi_m(gamma)],[-1, ap]]
// (variant A, entries in the distribution algebra) or Phi_m(gamma) replaced by
// phi^{m-1}(q) (variant B, series entries). Weight 2 only.
MatIwasawa sprung_product_A(const WachContext& ctx, int n, int i, int X);
MatSeries sprung_product_B(const WachContext& ctx, int n, int i);
// Stabilized C^{i-n} F_n ... F_1 as n grows (the normalized limit).
MatSeries sprung_limit_B(const WachContext& ctx, int i);

struct KernelReport {
    std::vector<std::pair<int, bool>> levels; // (level, condition holds)
    bool all = true;
};

// Trace conditions satisfied by the Dcris-side coordinate of a kernel
// element of Col_1 (which = 1) or Col_2 (which = 2); ap = 0 only.
KernelReport kernel_conditions(const ModuleVec& x, const WachContext& ctx, int which, int n);

// Ordinary package: assembles P from (star, unit), solves Mprime, checks the
// triangular shapes, and returns (P, Mprime, M).
struct OrdinaryPackage {
    MatSeries P, Mprime, M;
};
OrdinaryPackage ordinary_package(const WachContext& ctx, const PiSeries& star, const PiSeries& unit);

// Elliptic-case constructions (k = 2, ap = 0):
// preimage of y in (pi A+)^{psi=0} under Col_1 via the telescoping series.
ModuleVec plus_image_preimage(const PiSeries& y, const WachContext& ctx);
// preimage of a unit series: returns the module element together with the
// value of Col_1 on it (which is congruent to a unit mod pi).
std::pair<ModuleVec, PiSeries> plus_image_unit_preimage(const WachContext& ctx, const PiSeries& g);
// c with y = c (pi0 + p - 1) mod phi(pi) for Delta-invariant psi=0 input;
// the boolean reports whether the congruence verified at precision.
std::pair<PAdic, bool> delta_invariant_reduction(const PiSeries& y, int prec);

// membership of a grade series in (p^{r-1} pi, ..., p pi^{r-1}, pi^{r+1}).
bool in_graded_ideal(const PiSeries& h, int r, int abs_prec);

} // namespace wach
