#include "nhpc/delay_predictor.hpp"

#include <algorithm>
#include <limits>
#include <string>
#include <vector>

#include "nhpc/errors.hpp"

namespace nhpc {

namespace {

double variance_part(double m1, double m2) { return std::max(0.0, m2 - m1 * m1); }

}  // namespace

DelayComponents delay_components(const Scenario& sc, const QuadratureConfig& cfg) {
    validate_scenario(sc);
    if (sc.delay.is_none()) throw ArgumentError("delay prediction needs a reporting delay distribution");
    const double t = sc.t;
    const double s = sc.s;
    const auto& cluster = sc.cluster;
    const auto& mu = cluster.mu;

    DelayComponents out;
    std::vector<double> vbreaks;
    for (double k : sc.delay.kinks()) vbreaks.push_back(t - k);
    out.lambda_hat = std::clamp(
        integrate_against([&](double v) { return sc.delay.survival(t - v); }, sc.center, 0.0, 1.0, cfg,
                          vbreaks),
        0.0, sc.center(1.0));
    out.n_hat_mean = sc.center(1.0) - out.lambda_hat;
    if (!(out.n_hat_mean > 0.0)) {
        throw NullEventError(
            "no claim can be reported by t, so the reported-count predictor is undefined; use the "
            "unconditional prediction instead");
    }

    // Along r = t - k - v and r = t + s - k - v the window crosses a kink k of mu.
    std::vector<AffineBound> curves;
    for (double k : mu.kinks(0.0, t + s)) {
        curves.push_back({t - k, -1.0});
        curves.push_back({t + s - k, -1.0});
    }
    const double inf = std::numeric_limits<double>::infinity();
    const AffineBound reported_lo{-inf, 0.0};
    const AffineBound reported_hi{t, -1.0};
    const AffineBound pending_hi{t + s, -1.0};

    const auto window = [&](double v, double r) {
        return cluster_increment_moments(cluster, t - v - r, t + s - v - r);
    };
    const auto first = [&](double v, double r) {
        return cluster_increment_moments(cluster, 0.0, t + s - v - r);
    };
    out.J1 = integrate_delay_region([&](double v, double r) { return window(v, r).m1; }, sc.center,
                                    sc.delay, reported_lo, reported_hi, cfg, curves) /
             out.n_hat_mean;
    out.J2 = integrate_delay_region([&](double v, double r) { return window(v, r).m2; }, sc.center,
                                    sc.delay, reported_lo, reported_hi, cfg, curves) /
             out.n_hat_mean;
    out.H1 = std::max(0.0, integrate_delay_region([&](double v, double r) { return first(v, r).m1; },
                                                  sc.center, sc.delay, reported_hi, pending_hi, cfg,
                                                  curves));
    out.H2 = std::max(0.0, integrate_delay_region([&](double v, double r) { return first(v, r).m2; },
                                                  sc.center, sc.delay, reported_hi, pending_hi, cfg,
                                                  curves));
    return out;
}

PredictionResult predict_delay(const DelayComponents& comp, long ell) {
    if (ell < 0) throw ArgumentError("reported count must be >= 0, got " + std::to_string(ell));
    PredictionResult r;
    const double l = static_cast<double>(ell);
    r.mean = l * comp.J1 + comp.H1;
    r.variance = l * variance_part(comp.J1, comp.J2) + comp.H2;
    return r;
}

double unconditional_mse(const DelayComponents& comp) {
    return comp.n_hat_mean * variance_part(comp.J1, comp.J2) + comp.H2;
}

}  // namespace nhpc
