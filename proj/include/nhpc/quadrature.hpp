#pragma once

// Adaptive composite Gauss-Legendre integration against a mean value measure
// Lambda(dv) on [0, 1], and against Lambda(dv) F_D(dr) over delay regions.

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nhpc/model.hpp"
#include "nhpc/xreal.hpp"

namespace nhpc {

struct QuadratureConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    int max_depth = 40;

    std::vector<std::string> violations(const std::string& path) const;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;  // estimated absolute error
    double l1 = 0.0;     // estimate of the integral of |f|
};

// Integral of f over [lo, hi]. The interval is first cut at `breaks`, then panels are
// bisected (worst error first) until the summed error meets
// max(abs_tol, rel_tol |I|, roundoff floor). Each panel compares one order-15 rule with
// the two order-15 rules on its halves. Throws ConvergenceError when panels hit max_depth.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    std::span<const double> breaks, const QuadratureConfig& cfg);

// \int_lo^hi g(v) Lambda(dv), split at the kinks of Lambda and at extra_breaks.
double integrate_against(const std::function<double(double)>& g, const MeanValueFunction& lambda,
                         double lo, double hi, const QuadratureConfig& cfg,
                         std::span<const double> extra_breaks = {});
QuadratureResult integrate_against_detailed(const std::function<double(double)>& g,
                                            const MeanValueFunction& lambda, double lo, double hi,
                                            const QuadratureConfig& cfg,
                                            std::span<const double> extra_breaks = {});

// Same for an integrand whose magnitude may leave the double range. The result's
// lost_digits is log10(\int|g| dLambda / |\int g dLambda|).
Tracked integrate_against_x(const std::function<XReal(double)>& g, const MeanValueFunction& lambda,
                            double lo, double hi, const QuadratureConfig& cfg,
                            std::span<const double> extra_breaks = {});

// r(v) = intercept + slope * v. intercept may be +-infinity.
struct AffineBound {
    double intercept = 0.0;
    double slope = 0.0;
    double at(double v) const noexcept { return intercept + slope * v; }
};

// \int_0^1 \int_{r_lo(v) < r <= r_hi(v)} g(v, r) F_D(dr) Lambda(dv).
// Uses the delay density for continuous delays and exact substitution for a
// deterministic delay; returns 0 for the `none` variant. `inner_breaks` are affine
// curves in (v, r) along which g is not smooth.
double integrate_delay_region(const std::function<double(double, double)>& g,
                              const MeanValueFunction& lambda, const DelayDistribution& delay,
                              AffineBound r_lo, AffineBound r_hi, const QuadratureConfig& cfg,
                              std::span<const AffineBound> inner_breaks = {});

// v in (lo, hi) such that offset - v is a kink of mu, for each offset.
std::vector<double> reflected_kinks(const MeanValueFunction& mu, std::span<const double> offsets,
                                    double lo, double hi);

}  // namespace nhpc
