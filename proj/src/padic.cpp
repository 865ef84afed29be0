#include "wach/padic.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <sstream>

namespace wach {

namespace {
std::atomic<int> g_val_floor{-4096};

uint32_t inv_mod_small(uint64_t a, uint64_t p) {
    // extended gcd; p prime, a not divisible by p
    int64_t t = 0, newt = 1;
    int64_t r = static_cast<int64_t>(p), newr = static_cast<int64_t>(a % p);
    while (newr != 0) {
        int64_t q = r / newr;
        int64_t tmp = t - q * newt; t = newt; newt = tmp;
        tmp = r - q * newr; r = newr; newr = tmp;
    }
    if (r != 1) throw DivisionByZero("inv_mod_small: not invertible");
    if (t < 0) t += static_cast<int64_t>(p);
    return static_cast<uint32_t>(t);
}

// low n digits of a*b, both little-endian base p
std::vector<uint32_t> mul_digits(int64_t prime, const std::vector<uint32_t>& a,
                                 const std::vector<uint32_t>& b, size_t n) {
    std::vector<uint64_t> acc(n, 0);
    for (size_t i = 0; i < a.size() && i < n; ++i) {
        if (a[i] == 0) continue;
        uint64_t ai = a[i];
        size_t m = std::min(b.size(), n - i);
        for (size_t j = 0; j < m; ++j) acc[i + j] += ai * b[j];
    }
    uint64_t p = static_cast<uint64_t>(prime);
    uint64_t carry = 0;
    std::vector<uint32_t> out(n);
    for (size_t i = 0; i < n; ++i) {
        uint64_t t = acc[i] + carry;
        out[i] = static_cast<uint32_t>(t % p);
        carry = t / p;
    }
    return out;
}
} // namespace

int valuation_floor() { return g_val_floor.load(std::memory_order_relaxed); }
void set_valuation_floor(int floor) { g_val_floor.store(floor, std::memory_order_relaxed); }

static void check_floor(int val) {
    if (val < valuation_floor())
        throw PrecisionExhausted("valuation " + std::to_string(val) + " fell below the floor");
}

PAdic PAdic::zero(int64_t p, int abs_prec) {
    PAdic z;
    z.p_ = p;
    z.val_ = std::min(abs_prec, kExactPrec);
    return z;
}

PAdic PAdic::from_unit_digits(int64_t p, int val, std::vector<uint32_t> digits) {
    // strip leading (low-order) zeros
    size_t i = 0;
    while (i < digits.size() && digits[i] == 0) ++i;
    if (i == digits.size()) return zero(p, val + static_cast<int>(digits.size()));
    PAdic x;
    x.p_ = p;
    x.val_ = val + static_cast<int>(i);
    x.digits_.assign(digits.begin() + static_cast<long>(i), digits.end());
    check_floor(x.val_);
    return x;
}

PAdic PAdic::from_int(int64_t p, long long value, int prec) {
    if (prec < 1) throw ConfigError("precision must be >= 1");
    if (value == 0) return zero(p);
    bool neg = value < 0;
    unsigned long long v = neg ? -static_cast<unsigned long long>(value)
                               : static_cast<unsigned long long>(value);
    int val = 0;
    while (v % static_cast<unsigned long long>(p) == 0) { v /= static_cast<unsigned long long>(p); ++val; }
    std::vector<uint32_t> d;
    d.reserve(prec);
    unsigned long long rest = v;
    for (int i = 0; i < prec; ++i) {
        d.push_back(static_cast<uint32_t>(rest % static_cast<unsigned long long>(p)));
        rest /= static_cast<unsigned long long>(p);
    }
    PAdic x;
    x.p_ = p;
    x.val_ = val;
    x.digits_ = std::move(d);
    if (neg) x = -x;
    return x;
}

PAdic PAdic::from_ratio(int64_t p, long long num, long long den, int prec) {
    if (den == 0) throw DivisionByZero("from_ratio: zero denominator");
    PAdic n = from_int(p, num, prec + 2);
    PAdic d = from_int(p, den, prec + 2);
    return (n / d).cap_rel(prec);
}

PAdic PAdic::from_decimal(int64_t p, const std::string& text, int prec) {
    std::string s = text;
    auto slash = s.find('/');
    if (slash != std::string::npos) {
        PAdic n = from_decimal(p, s.substr(0, slash), prec + 2);
        PAdic d = from_decimal(p, s.substr(slash + 1), prec + 2);
        return (n / d).cap_rel(prec);
    }
    bool neg = false;
    size_t i = 0;
    if (i < s.size() && (s[i] == '+' || s[i] == '-')) { neg = s[i] == '-'; ++i; }
    std::string digits = s.substr(i);
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw ParseError("bad decimal literal: " + text);
    std::vector<uint32_t> d = base_p_from_decimal(p, digits, prec + 64);
    PAdic x = from_unit_digits(p, 0, std::move(d)).cap_rel(prec);
    return neg ? -x : x;
}

uint32_t PAdic::digit(int i) const {
    if (i < 0 || i >= rel_prec()) return 0;
    return digits_[static_cast<size_t>(i)];
}

void PAdic::check_same_prime(const PAdic& a, const PAdic& b) {
    if (a.p_ != b.p_) throw ConfigError("mixed primes in p-adic arithmetic");
}

PAdic PAdic::operator-() const {
    if (is_zero()) return *this;
    PAdic r = *this;
    uint32_t p = static_cast<uint32_t>(p_);
    r.digits_[0] = p - digits_[0];
    for (size_t i = 1; i < r.digits_.size(); ++i) r.digits_[i] = p - 1 - digits_[i];
    return r;
}

PAdic PAdic::operator+(const PAdic& o) const {
    check_same_prime(*this, o);
    int a = std::min(abs_prec(), o.abs_prec());
    if (is_zero() && o.is_zero()) return zero(p_, a);
    int v0 = kExactPrec;
    if (!is_zero()) v0 = std::min(v0, val_);
    if (!o.is_zero()) v0 = std::min(v0, o.val_);
    if (v0 >= a) return zero(p_, a);
    size_t n = static_cast<size_t>(a - v0);
    std::vector<uint64_t> acc(n, 0);
    auto fold = [&](const PAdic& x) {
        if (x.is_zero()) return;
        for (size_t i = 0; i < x.digits_.size(); ++i) {
            long long pos = static_cast<long long>(i) + x.val_ - v0;
            if (pos >= 0 && pos < static_cast<long long>(n))
                acc[static_cast<size_t>(pos)] += x.digits_[i];
        }
    };
    fold(*this);
    fold(o);
    uint64_t carry = 0;
    std::vector<uint32_t> d(n);
    uint64_t p = static_cast<uint64_t>(p_);
    for (size_t i = 0; i < n; ++i) {
        uint64_t t = acc[i] + carry;
        d[i] = static_cast<uint32_t>(t % p);
        carry = t / p;
    }
    return from_unit_digits(p_, v0, std::move(d));
}

PAdic PAdic::operator-(const PAdic& o) const { return *this + (-o); }

PAdic PAdic::operator*(const PAdic& o) const {
    check_same_prime(*this, o);
    if (is_zero() || o.is_zero()) {
        // O(p^m) * (u p^w + O(p^a)) = O(p^{m+w}); O(p^m)*O(p^m') = O(p^{m+m'})
        long long m = static_cast<long long>(is_zero() ? val_ : val_) +
                      static_cast<long long>(o.is_zero() ? o.val_ : o.val_);
        return zero(p_, static_cast<int>(std::min<long long>(m, kExactPrec)));
    }
    size_t n = std::min(digits_.size(), o.digits_.size());
    std::vector<uint64_t> acc(n, 0);
    for (size_t i = 0; i < n; ++i) {
        if (digits_[i] == 0) continue;
        uint64_t di = digits_[i];
        size_t lim = n - i;
        size_t m = std::min(o.digits_.size(), lim);
        for (size_t j = 0; j < m; ++j) acc[i + j] += di * o.digits_[j];
    }
    uint64_t p = static_cast<uint64_t>(p_);
    uint64_t carry = 0;
    std::vector<uint32_t> d(n);
    for (size_t i = 0; i < n; ++i) {
        uint64_t t = acc[i] + carry;
        d[i] = static_cast<uint32_t>(t % p);
        carry = t / p;
    }
    PAdic r;
    r.p_ = p_;
    r.val_ = val_ + o.val_;
    r.digits_ = std::move(d);
    check_floor(r.val_);
    return r;
}

PAdic PAdic::inv() const {
    if (is_zero()) throw DivisionByZero("inverse of a (tracked) zero");
    size_t n = digits_.size();
    uint64_t p = static_cast<uint64_t>(p_);
    // Newton lifting with doubling digit windows: r <- r*(2 - u*r)
    std::vector<uint32_t> r{inv_mod_small(digits_[0], p)};
    size_t k = 1;
    while (k < n) {
        size_t k2 = std::min(n, 2 * k);
        std::vector<uint32_t> ur = mul_digits(p_, digits_, r, k2);
        // two_minus = 2 - ur  (mod p^k2)
        std::vector<uint32_t> two(k2, 0);
        two[0] = 2 % static_cast<uint32_t>(p);
        if (p == 2) two[0] = 0; // unreachable (p odd), kept for safety
        uint64_t borrow = 0;
        std::vector<uint32_t> diff(k2);
        for (size_t i = 0; i < k2; ++i) {
            int64_t t = static_cast<int64_t>(two[i]) - static_cast<int64_t>(ur[i]) - static_cast<int64_t>(borrow);
            if (t < 0) { t += static_cast<int64_t>(p); borrow = 1; } else borrow = 0;
            diff[i] = static_cast<uint32_t>(t);
        }
        r = mul_digits(p_, r, diff, k2);
        k = k2;
    }
    PAdic out;
    out.p_ = p_;
    out.val_ = -val_;
    out.digits_ = std::move(r);
    check_floor(out.val_);
    return out;
}

PAdic PAdic::operator/(const PAdic& o) const {
    check_same_prime(*this, o);
    if (o.is_zero()) throw DivisionByZero("division by a (tracked) zero");
    if (is_zero()) return zero(p_, std::min(val_ - o.val_, kExactPrec));
    return *this * o.inv();
}

PAdic PAdic::pow(long long e) const {
    if (e < 0) return inv().pow(-e);
    PAdic acc = from_int(p_, 1, std::max(1, rel_prec()));
    PAdic base = *this;
    unsigned long long k = static_cast<unsigned long long>(e);
    while (k) {
        if (k & 1ULL) acc = acc * base;
        k >>= 1ULL;
        if (k) base = base * base;
    }
    return acc;
}

PAdic PAdic::shift(int k) const {
    PAdic r = *this;
    r.val_ = static_cast<int>(std::min<long long>(static_cast<long long>(val_) + k, kExactPrec));
    if (!r.is_zero()) check_floor(r.val_);
    return r;
}

PAdic PAdic::cap_abs(int a) const {
    if (is_zero()) return zero(p_, std::min(val_, a));
    if (a <= val_) return zero(p_, a);
    int n = std::min(rel_prec(), a - val_);
    std::vector<uint32_t> d(digits_.begin(), digits_.begin() + n);
    return from_unit_digits(p_, val_, std::move(d));
}

PAdic PAdic::promoted_to(int a) const {
    if (is_zero()) return zero(p_, std::max(val_, a));
    if (abs_prec() >= a) return *this;
    std::vector<uint32_t> d = digits_;
    d.resize(static_cast<size_t>(a - val_), 0);
    PAdic r;
    r.p_ = p_;
    r.val_ = val_;
    r.digits_ = std::move(d);
    return r;
}

PAdic PAdic::cap_rel(int n) const {
    if (is_zero()) return *this;
    if (n >= rel_prec()) return *this;
    if (n < 1) throw ConfigError("cap_rel: need n >= 1");
    std::vector<uint32_t> d(digits_.begin(), digits_.begin() + n);
    return from_unit_digits(p_, val_, std::move(d));
}

bool PAdic::vanishes(int n) const {
    if (is_zero()) return true; // zero at its tracked precision
    return val_ >= n;
}

bool PAdic::agrees(const PAdic& o, int n) const {
    PAdic d = *this - o;
    return d.vanishes(n);
}

uint32_t PAdic::residue_mod_p() const {
    if (is_zero()) return 0;
    if (val_ < 0) throw PrecisionExhausted("residue of a value with negative valuation");
    return val_ > 0 ? 0 : digits_[0];
}

long long PAdic::to_long(int max_digits) const {
    if (is_zero()) return 0;
    if (val_ < 0) throw PrecisionExhausted("to_long on negative valuation");
    long long acc = 0;
    int n = std::min(rel_prec(), max_digits);
    for (int i = n - 1; i >= 0; --i) acc = acc * p_ + digits_[static_cast<size_t>(i)];
    for (int i = 0; i < val_; ++i) acc *= p_;
    return acc;
}

std::string PAdic::unit_decimal() const {
    if (is_zero()) return "0";
    return decimal_from_base_p(p_, digits_);
}

std::string PAdic::to_string() const {
    std::ostringstream os;
    if (is_zero()) {
        os << "O(" << p_ << "^" << (val_ >= kExactPrec ? std::string("inf") : std::to_string(val_)) << ")";
        return os.str();
    }
    os << p_ << "^" << val_ << " * " << unit_decimal() << " (mod " << p_ << "^" << abs_prec() << ")";
    return os.str();
}

std::string PAdic::machine() const {
    std::ostringstream os;
    if (is_zero()) {
        os << val_ << " 0 0";
    } else {
        os << val_ << " " << unit_decimal() << " " << rel_prec();
    }
    return os.str();
}

std::string decimal_from_base_p(int64_t p, const std::vector<uint32_t>& digits) {
    // value = sum digits[i] p^i, digits little-endian base p -> decimal
    std::vector<uint32_t> dec; // base 1e9, little-endian
    dec.push_back(0);
    for (size_t i = digits.size(); i-- > 0;) {
        // dec = dec*p + digits[i]
        uint64_t carry = digits[i];
        for (size_t j = 0; j < dec.size(); ++j) {
            uint64_t t = static_cast<uint64_t>(dec[j]) * static_cast<uint64_t>(p) + carry;
            dec[j] = static_cast<uint32_t>(t % 1000000000ULL);
            carry = t / 1000000000ULL;
        }
        while (carry) {
            dec.push_back(static_cast<uint32_t>(carry % 1000000000ULL));
            carry /= 1000000000ULL;
        }
    }
    std::ostringstream os;
    os << dec.back();
    for (size_t j = dec.size() - 1; j-- > 0;) {
        std::string part = std::to_string(dec[j]);
        os << std::string(9 - part.size(), '0') << part;
    }
    return os.str();
}

std::vector<uint32_t> base_p_from_decimal(int64_t p, const std::string& dec, int max_digits) {
    std::vector<uint32_t> num; // base 1e9 little-endian
    {
        std::string s = dec;
        while (s.size() > 1 && s[0] == '0') s.erase(s.begin());
        for (size_t i = s.size(); i > 0;) {
            size_t lo = i >= 9 ? i - 9 : 0;
            num.push_back(static_cast<uint32_t>(std::stoul(s.substr(lo, i - lo))));
            i = lo;
        }
    }
    std::vector<uint32_t> out;
    auto is_zero = [&]() {
        for (uint32_t w : num) if (w) return false;
        return true;
    };
    while (!is_zero() && static_cast<int>(out.size()) < max_digits) {
        uint64_t rem = 0;
        for (size_t j = num.size(); j-- > 0;) {
            uint64_t cur = rem * 1000000000ULL + num[j];
            num[j] = static_cast<uint32_t>(cur / static_cast<uint64_t>(p));
            rem = cur % static_cast<uint64_t>(p);
        }
        out.push_back(static_cast<uint32_t>(rem));
        while (num.size() > 1 && num.back() == 0) num.pop_back();
    }
    while (static_cast<int>(out.size()) < max_digits) out.push_back(0);
    return out;
}

PAdic teichmuller(int64_t p, uint32_t a, int prec) {
    if (a == 0 || a >= static_cast<uint32_t>(p)) throw ConfigError("teichmuller: need 1 <= a <= p-1");
    PAdic x = PAdic::from_int(p, a, prec);
    for (int i = 0; i < prec + 2; ++i) {
        PAdic nx = x.pow(p);
        if (nx.agrees(x, x.abs_prec())) { x = nx; break; }
        x = nx;
    }
    return x.cap_rel(prec);
}

PAdic hensel_root(int64_t p, const std::vector<PAdic>& coeffs, uint32_t x0, int prec) {
    PAdic x = PAdic::from_int(p, x0, prec);
    auto eval = [&](const PAdic& t) {
        PAdic acc = PAdic::zero(p);
        for (size_t i = coeffs.size(); i-- > 0;) acc = acc * t + coeffs[i];
        return acc;
    };
    auto eval_deriv = [&](const PAdic& t) {
        PAdic acc = PAdic::zero(p);
        for (size_t i = coeffs.size(); i-- > 1;)
            acc = acc * t + coeffs[i] * PAdic::from_int(p, static_cast<long long>(i), prec);
        return acc;
    };
    {
        PAdic d0 = eval_deriv(x);
        if (d0.is_zero() || d0.valuation() != 0)
            throw PrecisionExhausted("hensel_root: derivative not a unit at the seed");
    }
    for (int i = 0; i < prec + 4; ++i) {
        PAdic f = eval(x);
        if (f.vanishes(prec)) break;
        x = x - f / eval_deriv(x);
    }
    if (!eval(x).vanishes(prec))
        throw PrecisionExhausted("hensel_root: Newton iteration did not settle");
    return x.cap_rel(prec);
}

} // namespace wach
