#pragma once

#include "wach/padic.hpp"

namespace wach {

// Coefficient data for the quadratic X^2 - ap X + p^{k-1} whose roots are
// the two Frobenius eigenvalues.
struct QuadContext {
    PAdic ap;   // trace of the roots
    int k = 2;  // weight; product of the roots is p^{k-1}

    int64_t prime() const { return ap.prime(); }
};

// a + b*alpha where alpha is a fixed root of X^2 - ap X + p^{k-1}.
// Works uniformly whether or not the quadratic splits over Q_p.
class QuadExtElt {
public:
    QuadExtElt() = default;
    QuadExtElt(QuadContext ctx, PAdic a, PAdic b) : ctx_(std::move(ctx)), a_(std::move(a)), b_(std::move(b)) {}

    static QuadExtElt scalar(const QuadContext& ctx, PAdic a);
    static QuadExtElt alpha(const QuadContext& ctx, int prec);

    const QuadContext& ctx() const { return ctx_; }
    const PAdic& rational_part() const { return a_; }
    const PAdic& alpha_part() const { return b_; }
    bool is_rational(int abs) const { return b_.vanishes(abs); }

    QuadExtElt conj() const; // alpha -> ap - alpha
    PAdic norm() const;      // a^2 + ap*a*b + p^{k-1} b^2
    PAdic trace() const;

    QuadExtElt operator+(const QuadExtElt& o) const;
    QuadExtElt operator-(const QuadExtElt& o) const;
    QuadExtElt operator*(const QuadExtElt& o) const;
    QuadExtElt operator-() const;
    QuadExtElt inv() const;
    QuadExtElt operator/(const QuadExtElt& o) const;

    bool agrees(const QuadExtElt& o, int abs) const;
    std::string to_string() const;

private:
    QuadContext ctx_;
    PAdic a_, b_;
};

struct RootPair {
    bool split = false;       // true when both roots lie in Q_p
    QuadExtElt alpha, beta;   // beta = ap - alpha always
    PAdic alpha_padic, beta_padic; // populated when split
};

// Roots of X^2 - ap X + p^{k-1}. Ordinary ap (a unit) Hensel-splits with
// v(alpha)=0 and v(beta)=k-1; otherwise the roots stay symbolic.
RootPair quad_roots(const PAdic& ap, int k, int prec);

} // namespace wach
