#include "wach/quadext.hpp"

#include <sstream>

namespace wach {

QuadExtElt QuadExtElt::scalar(const QuadContext& ctx, PAdic a) {
    return QuadExtElt(ctx, std::move(a), PAdic::zero(ctx.prime()));
}

QuadExtElt QuadExtElt::alpha(const QuadContext& ctx, int prec) {
    return QuadExtElt(ctx, PAdic::zero(ctx.prime()), PAdic::from_int(ctx.prime(), 1, prec));
}

QuadExtElt QuadExtElt::conj() const {
    // a + b(ap - alpha)
    return QuadExtElt(ctx_, a_ + b_ * ctx_.ap, -b_);
}

PAdic QuadExtElt::norm() const {
    return a_ * a_ + ctx_.ap * a_ * b_ + (b_ * b_).shift(ctx_.k - 1);
}

PAdic QuadExtElt::trace() const {
    PAdic two = PAdic::from_int(ctx_.prime(), 2, std::max(1, a_.rel_prec()));
    return two * a_ + ctx_.ap * b_;
}

QuadExtElt QuadExtElt::operator+(const QuadExtElt& o) const {
    return QuadExtElt(ctx_, a_ + o.a_, b_ + o.b_);
}

QuadExtElt QuadExtElt::operator-(const QuadExtElt& o) const {
    return QuadExtElt(ctx_, a_ - o.a_, b_ - o.b_);
}

QuadExtElt QuadExtElt::operator-() const { return QuadExtElt(ctx_, -a_, -b_); }

QuadExtElt QuadExtElt::operator*(const QuadExtElt& o) const {
    // (a + b alpha)(c + d alpha), alpha^2 = ap*alpha - p^{k-1}
    const PAdic& a = a_;
    const PAdic& b = b_;
    const PAdic& c = o.a_;
    const PAdic& d = o.b_;
    PAdic bd = b * d;
    PAdic rat = a * c - bd.shift(ctx_.k - 1);
    PAdic al = a * d + b * c + bd * ctx_.ap;
    return QuadExtElt(ctx_, std::move(rat), std::move(al));
}

QuadExtElt QuadExtElt::inv() const {
    PAdic n = norm();
    if (n.is_zero()) throw DivisionByZero("inverse of quadratic element with vanishing norm");
    QuadExtElt c = conj();
    PAdic ninv = n.inv();
    return QuadExtElt(ctx_, c.a_ * ninv, c.b_ * ninv);
}

QuadExtElt QuadExtElt::operator/(const QuadExtElt& o) const { return *this * o.inv(); }

bool QuadExtElt::agrees(const QuadExtElt& o, int abs) const {
    return a_.agrees(o.a_, abs) && b_.agrees(o.b_, abs);
}

std::string QuadExtElt::to_string() const {
    std::ostringstream os;
    os << "(" << a_.to_string() << ") + (" << b_.to_string() << ")*alpha";
    return os.str();
}

RootPair quad_roots(const PAdic& ap, int k, int prec) {
    int64_t p = ap.prime();
    QuadContext ctx{ap, k};
    RootPair out;
    if (!ap.is_zero() && ap.valuation() == 0) {
        // ordinary: X^2 - ap X + p^{k-1} has a unit root, Hensel-lift it
        std::vector<PAdic> f = {
            PAdic::from_int(p, 1, prec).shift(k - 1),
            -ap,
            PAdic::from_int(p, 1, prec),
        };
        PAdic alpha = hensel_root(p, f, ap.residue_mod_p(), prec);
        PAdic beta = ap - alpha;
        out.split = true;
        out.alpha_padic = alpha;
        out.beta_padic = beta;
        out.alpha = QuadExtElt::scalar(ctx, alpha);
        out.beta = QuadExtElt::scalar(ctx, beta);
        return out;
    }
    out.split = false;
    out.alpha = QuadExtElt::alpha(ctx, prec);
    out.beta = QuadExtElt(ctx, ap, -PAdic::from_int(p, 1, prec));
    return out;
}

} // namespace wach
