#include "nhpc/xreal.hpp"

#include <algorithm>
#include <string>

#include "nhpc/detail/special.hpp"
#include "nhpc/errors.hpp"

namespace nhpc {

namespace {

constexpr std::int64_t kNegligibleShift = 1100;

}  // namespace

XReal XReal::normalized(double mant, std::int64_t exp) noexcept {
    if (mant == 0.0) return XReal();
    int e = 0;
    const double m = std::frexp(mant, &e);
    return XReal(m, exp + e);
}

XReal XReal::from_double(double x) {
    if (!std::isfinite(x)) throw RangeError("XReal::from_double: non-finite input");
    return normalized(x, 0);
}

XReal XReal::from_log(int sign, double logmag) {
    if (sign == 0 || logmag == -std::numeric_limits<double>::infinity()) return XReal();
    if (!std::isfinite(logmag)) throw RangeError("XReal::from_log: non-finite log-magnitude");
    const double l2 = logmag / detail::kLn2;
    const double whole = std::floor(l2);
    const double mant = std::exp2(l2 - whole) * (sign < 0 ? -1.0 : 1.0);
    return normalized(mant, static_cast<std::int64_t>(whole));
}

double XReal::logmag() const noexcept {
    if (mant_ == 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(std::fabs(mant_)) + static_cast<double>(exp_) * detail::kLn2;
}

double XReal::to_double() const {
    if (mant_ == 0.0) return 0.0;
    if (exp_ > 1024) throw RangeError("XReal::to_double: magnitude exceeds double range");
    if (exp_ < -1100) return 0.0;
    return std::ldexp(mant_, static_cast<int>(exp_));
}

XReal operator*(const XReal& a, const XReal& b) noexcept {
    if (a.mant_ == 0.0 || b.mant_ == 0.0) return XReal();
    return XReal::normalized(a.mant_ * b.mant_, a.exp_ + b.exp_);
}

XReal operator+(const XReal& a, const XReal& b) noexcept {
    if (b.mant_ == 0.0) return a;
    if (a.mant_ == 0.0) return b;
    const XReal& big = a.exp_ >= b.exp_ ? a : b;
    const XReal& small = a.exp_ >= b.exp_ ? b : a;
    const std::int64_t shift = big.exp_ - small.exp_;
    if (shift > kNegligibleShift) return big;
    const double aligned = std::ldexp(small.mant_, static_cast<int>(-shift));
    const double sum = big.mant_ + aligned;
    if (std::fabs(sum) <= kExactCancellation * std::max(std::fabs(big.mant_), std::fabs(aligned))) {
        return XReal();
    }
    return XReal::normalized(sum, big.exp_);
}

double ratio(const XReal& a, const XReal& b) {
    if (b.is_zero()) throw RangeError("ratio: division by zero");
    if (a.is_zero()) return 0.0;
    const std::int64_t e = a.exponent() - b.exponent();
    if (e > 1025) throw RangeError("ratio: quotient exceeds double range");
    if (e < -1100) return 0.0;
    const double q = std::ldexp(a.mantissa() / b.mantissa(), static_cast<int>(e));
    if (!std::isfinite(q)) throw RangeError("ratio: quotient exceeds double range");
    return q;
}

double log_binomial(long n, long k) {
    if (n < 0 || k < 0 || k > n) {
        throw ArgumentError("log_binomial: need 0 <= k <= n, got n=" + std::to_string(n) +
                            " k=" + std::to_string(k));
    }
    return detail::log_abs_gamma(static_cast<double>(n) + 1.0) -
           detail::log_abs_gamma(static_cast<double>(k) + 1.0) -
           detail::log_abs_gamma(static_cast<double>(n - k) + 1.0);
}

XReal falling_factorial_x(double x, long j) {
    if (j < 0) throw ArgumentError("falling_factorial: negative order");
    if (j <= 64) {
        XReal prod = XReal::from_double(1.0);
        double chunk = 1.0;
        for (long i = 0; i < j; ++i) {
            chunk *= x - static_cast<double>(i);
            // Fold into the extended product before a double could overflow.
            if ((i & 7) == 7) {
                prod *= XReal::from_double(chunk);
                chunk = 1.0;
            }
        }
        return prod * XReal::from_double(chunk);
    }
    const double jd = static_cast<double>(j);
    if (x < 0.0) {
        // ff(x, j) = (-1)^j Gamma(j - x) / Gamma(-x)
        const double lm = detail::log_abs_gamma(jd - x) - detail::log_abs_gamma(-x);
        return XReal::from_log((j % 2 == 0) ? 1 : -1, lm);
    }
    if (x == std::floor(x) && x < jd) return XReal();
    const double lm = detail::log_abs_gamma(x + 1.0) - detail::log_abs_gamma(x + 1.0 - jd);
    long negatives = 0;
    if (x + 1.0 - jd < 0.0) negatives = j - 1 - static_cast<long>(std::floor(x));
    return XReal::from_log(negatives % 2 == 0 ? 1 : -1, lm);
}

double falling_factorial(double x, long j) {
    if (j < 0) throw ArgumentError("falling_factorial: negative order");
    if (j <= 64) {
        double prod = 1.0;
        for (long i = 0; i < j; ++i) prod *= x - static_cast<double>(i);
        return prod;
    }
    return falling_factorial_x(x, j).to_double();
}

void CancellationSum::add(const XReal& term, double term_lost_digits) {
    if (term.is_zero()) return;
    sum_ += term;
    XReal weight = term.abs();
    if (term_lost_digits > 0.0) {
        weight *= XReal::from_log(1, term_lost_digits * detail::kLn10);
    }
    weighted_abs_ += weight;
}

Tracked CancellationSum::result() const {
    if (weighted_abs_.is_zero()) return {XReal(), 0.0};
    if (sum_.is_zero()) return {XReal(), std::numeric_limits<double>::infinity()};
    const double lost = (weighted_abs_.logmag() - sum_.logmag()) / detail::kLn10;
    return {sum_, std::max(0.0, lost)};
}

}  // namespace nhpc
