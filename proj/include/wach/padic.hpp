#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "wach/errors.hpp"

namespace wach {

// Absolute-precision sentinel for values that are exactly zero (or exact
// small integers whose expansion terminated). Large enough that it never
// interferes with real precision bookkeeping, small enough that sums of a
// few of them cannot overflow an int.
inline constexpr int kExactPrec = 1 << 24;

// Valuations below this abort with PrecisionExhausted. Configurable so that
// runaway iterations fail fast instead of looping; the default is generous.
int valuation_floor();
void set_valuation_floor(int floor);

// A capped-precision p-adic number: u * p^v with u a unit known modulo
// p^N (N = rel_prec), or a zero known modulo p^{abs_prec}. All arithmetic
// is exact-then-truncate; precision never silently improves.
class PAdic {
public:
    PAdic() = default;

    static PAdic zero(int64_t p, int abs_prec = kExactPrec);
    static PAdic from_int(int64_t p, long long value, int prec);
    static PAdic from_ratio(int64_t p, long long num, long long den, int prec);
    // Decimal string, optionally "a/b".
    static PAdic from_decimal(int64_t p, const std::string& text, int prec);
    static PAdic from_unit_digits(int64_t p, int val, std::vector<uint32_t> digits);

    int64_t prime() const { return p_; }
    bool valid() const { return p_ != 0; }
    bool is_zero() const { return digits_.empty(); }
    bool is_unit() const { return !is_zero() && val_ == 0; }

    // Valuation of a nonzero value; for a zero this is the absolute
    // precision to which it is known to vanish.
    int valuation() const { return val_; }
    int rel_prec() const { return static_cast<int>(digits_.size()); }
    int abs_prec() const { return is_zero() ? val_ : val_ + rel_prec(); }

    // Base-p digit i of the unit part (0 if out of range).
    uint32_t digit(int i) const;
    const std::vector<uint32_t>& digits() const { return digits_; }

    PAdic operator-() const;
    PAdic operator+(const PAdic& o) const;
    PAdic operator-(const PAdic& o) const;
    PAdic operator*(const PAdic& o) const;
    PAdic operator/(const PAdic& o) const;

    PAdic inv() const;
    PAdic pow(long long e) const;
    // Multiply by p^k (exact valuation shift).
    PAdic shift(int k) const;
    // Restrict to absolute precision a (no-op if already coarser).
    PAdic cap_abs(int a) const;
    PAdic cap_rel(int n) const;
    // Extend the digit window to absolute precision a with zero filler;
    // used when exact-integer cancellations make the result independent of
    // the unknown digits.
    PAdic promoted_to(int a) const;

    // True if the two values agree at absolute precision n (differences
    // below the jointly known precision are ignored).
    bool agrees(const PAdic& o, int n) const;
    // True if the value vanishes at absolute precision n.
    bool vanishes(int n) const;

    // Value reduced modulo p (0..p-1); requires val >= 0 (else throws).
    uint32_t residue_mod_p() const;
    long long to_long(int max_digits = 60) const; // unit*p^val as long long, val >= 0

    std::string to_string() const;          // "p^v * u (mod p^(v+N))"
    std::string unit_decimal() const;       // unit part as decimal string
    std::string machine() const;            // "v u N" with u decimal

private:
    static void check_same_prime(const PAdic& a, const PAdic& b);

    int64_t p_ = 0;
    int val_ = 0;
    std::vector<uint32_t> digits_;
};

// Teichmueller representative: the (p-1)-st root of unity congruent to
// a mod p, to N digits.
PAdic teichmuller(int64_t p, uint32_t a, int prec);

// Hensel lift of a simple root: f given by coefficients (lowest first),
// x0 a root mod p with f'(x0) a unit.
PAdic hensel_root(int64_t p, const std::vector<PAdic>& coeffs, uint32_t x0, int prec);

std::string decimal_from_base_p(int64_t p, const std::vector<uint32_t>& digits);
std::vector<uint32_t> base_p_from_decimal(int64_t p, const std::string& dec, int max_digits);

} // namespace wach
