#pragma once

// Extended-range signed reals for recursion tables whose entries grow like m!.
//
// A value is stored as mant * 2^exp with |mant| in [0.5, 1) (or mant == 0), so
// products and sums never overflow for any table size the predictors build.

#include <cmath>
#include <cstdint>
#include <limits>

namespace nhpc {

class XReal {
public:
    constexpr XReal() noexcept = default;

    static XReal from_double(double x);
    // sign in {-1, 0, +1}; logmag = ln|x|.
    static XReal from_log(int sign, double logmag);

    int sign() const noexcept { return mant_ > 0 ? 1 : (mant_ < 0 ? -1 : 0); }
    bool is_zero() const noexcept { return mant_ == 0.0; }
    // ln|x|; -inf for zero.
    double logmag() const noexcept;
    // Throws RangeError when |x| exceeds the double range.
    double to_double() const;

    XReal abs() const noexcept { return XReal(std::fabs(mant_), exp_); }
    XReal operator-() const noexcept { return XReal(-mant_, exp_); }

    friend XReal operator*(const XReal& a, const XReal& b) noexcept;
    friend XReal operator+(const XReal& a, const XReal& b) noexcept;
    friend XReal operator-(const XReal& a, const XReal& b) noexcept { return a + (-b); }
    XReal& operator*=(const XReal& o) noexcept { return *this = *this * o; }
    XReal& operator+=(const XReal& o) noexcept { return *this = *this + o; }

    friend bool operator==(const XReal& a, const XReal& b) noexcept {
        return a.mant_ == b.mant_ && (a.mant_ == 0.0 || a.exp_ == b.exp_);
    }

    double mantissa() const noexcept { return mant_; }
    std::int64_t exponent() const noexcept { return exp_; }

private:
    constexpr XReal(double mant, std::int64_t exp) noexcept : mant_(mant), exp_(exp) {}
    static XReal normalized(double mant, std::int64_t exp) noexcept;

    double mant_ = 0.0;
    std::int64_t exp_ = 0;
};

// a / b as a plain double. Throws RangeError for b == 0 or an out-of-range quotient.
double ratio(const XReal& a, const XReal& b);

// Operands that cancel to within this relative amount sum to exact zero.
inline constexpr double kExactCancellation = 1e-15;

// ln C(n, k); throws ArgumentError unless 0 <= k <= n.
double log_binomial(long n, long k);

// x (x-1) ... (x-j+1); 1 for j == 0.
double falling_factorial(double x, long j);
XReal falling_factorial_x(double x, long j);

// Value together with an estimate of how many decimal digits cancellation has cost.
struct Tracked {
    XReal value;
    double lost_digits = 0.0;
};

// Accumulates signed terms and measures the cancellation in the result:
// lost = log10( sum |term_i| 10^{lost_i} / |sum term_i| ).
class CancellationSum {
public:
    void add(const XReal& term, double term_lost_digits = 0.0);
    void add(const Tracked& term) { add(term.value, term.lost_digits); }
    Tracked result() const;

private:
    XReal sum_;
    XReal weighted_abs_;
};

}  // namespace nhpc
