#pragma once

#include <cmath>

namespace nhpc::detail {

// ln|Gamma(x)| without touching the global signgam (std::lgamma is not reentrant on glibc).
inline double log_abs_gamma(double x) noexcept {
    int sign = 0;
    return ::lgamma_r(x, &sign);
}

inline constexpr double kLn2 = 0.693147180559945309417232121458;
inline constexpr double kLn10 = 2.30258509299404568401799145468;

}  // namespace nhpc::detail
