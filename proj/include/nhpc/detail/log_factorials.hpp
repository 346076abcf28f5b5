#pragma once

#include <vector>

#include "nhpc/detail/special.hpp"
#include "nhpc/xreal.hpp"

namespace nhpc::detail {

// ln k! for k = 0..n, and binomial coefficients as XReal.
class LogFactorials {
public:
    explicit LogFactorials(int n) : lf_(static_cast<std::size_t>(n) + 1) {
        for (std::size_t k = 0; k < lf_.size(); ++k) lf_[k] = log_abs_gamma(static_cast<double>(k) + 1.0);
    }
    double operator[](int k) const { return lf_[static_cast<std::size_t>(k)]; }
    XReal binomial(int n, int k) const {
        return XReal::from_log(1, lf_[static_cast<std::size_t>(n)] - lf_[static_cast<std::size_t>(k)] -
                                      lf_[static_cast<std::size_t>(n - k)]);
    }

private:
    std::vector<double> lf_;
};

}  // namespace nhpc::detail
