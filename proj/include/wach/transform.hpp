#pragma once

#include "wach/wach_module.hpp"

namespace wach {

// r + a*alpha with Iwasawa-algebra components, alpha a root of the
// Frobenius quadratic.
struct QuadIw {
    IwasawaElement r, a;
};

struct QuadSeries {
    PiSeries r, a;
};

// The Iwasawa transform for a context in a family with computable
// gamma-matrices: inverts (z1, z2) -> z1[(1+pi)n1'] + z2[(1+pi)n2'] by
// graded order reduction, one unit coefficient at a time, with an outer
// p-division loop.
class IwasawaTransform {
public:
    IwasawaTransform(const WachContext& ctx, int X, int prec);

    const WachContext& context() const { return *ctx_; }
    // small-degree, high-precision context the transform works in
    const WachContext& refined_context() const { return *ctx2_; }
    int trunc() const { return X_; }
    int prec() const { return prec_; }

    // coordinates (against n_i') of z1[(1+pi)n1'] + z2[(1+pi)n2']
    std::pair<PiSeries, PiSeries> apply_basis(const IwasawaElement& z1,
                                              const IwasawaElement& z2) const;
    // the inverse map on psi=0 coordinate pairs
    std::pair<IwasawaElement, IwasawaElement> transform(const PiSeries& Y1,
                                                        const PiSeries& Y2) const;
    // Lambda-valued Coleman maps: transform of (1-phi)x = Col(x)
    std::pair<IwasawaElement, IwasawaElement> ucol(const ModuleVec& x) const;

    const GammaAction& gamma_action() const { return *gamma_; }
    const PiSeries& basis_coord(int i, int a, int l, int component) const;

private:
    const WachContext* ctx_;
    std::shared_ptr<WachContext> ctx2_;
    int X_, prec_;
    std::shared_ptr<GammaAction> gamma_, delta_;
    // e[i][a][l] = coords of delta^a (gamma-1)^l [(1+pi) n_{i+1}'], as a
    // coordinate pair together with its graded h-decomposition
    struct Entry {
        PiSeries c1, c2;   // full coordinates
        PiSeries h1, h2;   // h-series of the (single) grade, truncated short
        PAdic lead_inv;    // inverse of the entry's own order-l coefficient
    };
    std::vector<std::vector<std::vector<Entry>>> e_;
    std::vector<int> grade_of_a_; // series grade j = r^a mod p
    int hdeg_ = 0;
};

// Entrywise inverse Mellin transform of (1+pi) M.
MatIwasawa underline_M_matrix(const WachContext& ctx, const MellinContext& mc);

// [[alpha^{-1}u12 + u11, alpha^{-1}u22 + u21], [beta^{-1}..., ...]]
struct DecompositionMatrix {
    QuadIw a11, a12, a21, a22;
};
DecompositionMatrix decomposition_matrix(const WachContext& ctx, const MatIwasawa& uM);

QuadSeries mellin_quad(const MellinContext& mc, const QuadIw& x);

// Forward: (M(L_alpha), M(L_beta)) from bounded (L1, L2) through the
// series-side matrix M.
std::pair<QuadSeries, QuadSeries> forward_decomposition(const WachContext& ctx,
                                                        const PiSeries& L1, const PiSeries& L2);

// Inverse: the bounded pair recovered from the two unbounded transforms;
// the postcondition recomposes and compares. NotDivisible when the
// predicted det(M)-cancellation fails.
std::pair<PiSeries, PiSeries> decompose(const WachContext& ctx, const MellinContext& mc,
                                        const QuadIw& L_alpha, const QuadIw& L_beta);

// Weight-space decomposition in the ordinary case:
// (-L_beta, L_alpha) = (L1, L2) [[alpha log_{p,k}, 0], [star, u]].
std::pair<IwasawaElement, IwasawaElement> ordinary_decompose(const WachContext& ctx,
                                                             const IwasawaElement& L1,
                                                             const IwasawaElement& L2,
                                                             const IwasawaElement& star,
                                                             const IwasawaElement& u);
std::pair<IwasawaElement, IwasawaElement> ordinary_recover(const WachContext& ctx,
                                                           const IwasawaElement& L_beta,
                                                           const IwasawaElement& L_alpha,
                                                           const IwasawaElement& star,
                                                           const IwasawaElement& u);

// Division by an element concentrated in grade 0 with invertible constant
// term (truncated T-series division gradewise).
IwasawaElement iwasawa_divide_g0(const IwasawaElement& num, const IwasawaElement& den);

} // namespace wach
