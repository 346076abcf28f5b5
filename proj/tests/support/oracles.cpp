#include "support/oracles.hpp"

#include <cmath>
#include <limits>

#include "nhpc/detail/log_factorials.hpp"
#include "nhpc/xreal.hpp"

namespace nhpc::oracle {

NBReference nb_stirling(const Scenario& sc, int m_max, const QuadratureConfig& cfg) {
    const auto& mu = sc.cluster.mu;
    const double p = sc.cluster.p;
    const double q = 1.0 - p;
    const double lp = std::log(p);
    const std::vector<double> offsets{sc.t, sc.t + sc.s};
    const auto breaks = reflected_kinks(mu, offsets, 0.0, 1.0);

    // c[j][l] = \int Dmu^j mu^l p^mu dLambda, and E[R^l D^j p^R] via the compound Poisson
    // moment recursion.
    const int n = m_max;
    std::vector<std::vector<XReal>> c(3, std::vector<XReal>(static_cast<std::size_t>(n) + 1));
    for (int j = 0; j < 3; ++j) {
        for (int l = 0; l <= n; ++l) {
            c[j][l] = integrate_against_x(
                          [&](double v) {
                              const double now = mu(sc.t - v);
                              const double d = mu.increment(sc.t - v, sc.t + sc.s - v);
                              if ((j > 0 && d == 0.0) || (l > 0 && now == 0.0)) return XReal();
                              return XReal::from_log(1, j * std::log(d) + l * std::log(now) + now * lp);
                          },
                          sc.center, 0.0, 1.0, cfg, breaks)
                          .value;
        }
    }
    const detail::LogFactorials lf(n);
    std::vector<std::array<XReal, 3>> B(static_cast<std::size_t>(n) + 1);
    B[0][0] = XReal::from_log(1, c[0][0].to_double() - sc.center(1.0));
    for (int l = 1; l <= n; ++l) {
        for (int k = 0; k < l; ++k) B[l][0] += lf.binomial(l - 1, k) * B[k][0] * c[0][l - k];
    }
    for (int l = 0; l <= n; ++l) {
        for (int k = 0; k <= l; ++k) B[l][1] += lf.binomial(l, k) * B[k][0] * c[1][l - k];
        for (int k = 0; k <= l; ++k) {
            B[l][2] += lf.binomial(l, k) * (B[k][1] * c[1][l - k] + B[k][0] * c[2][l - k]);
        }
    }

    // Unsigned Stirling numbers of the first kind, row by row.
    std::vector<XReal> row{XReal::from_double(1.0)};
    NBReference out;
    for (int m = 0; m <= n; ++m) {
        if (m > 0) {
            std::vector<XReal> next(static_cast<std::size_t>(m) + 1);
            for (int k = 1; k <= m; ++k) {
                if (k - 1 <= m - 1) next[k] += row[k - 1];
                if (k <= m - 1) next[k] += XReal::from_double(m - 1) * row[k];
            }
            row = std::move(next);
        }
        XReal s0, s1, s2;
        for (int k = 0; k <= m; ++k) {
            s0 += row[k] * B[k][0];
            s1 += row[k] * B[k][1];
            s2 += row[k] * B[k][2];
        }
        const double lscale = m * std::log(q) - lf[m];
        out.pmf.push_back((s0 * XReal::from_log(1, lscale)).to_double());
        const double mean = q / p * ratio(s1, s0);
        const double second = q / (p * p) * ratio(s1, s0) + (q / p) * (q / p) * ratio(s2, s0);
        out.mean.push_back(mean);
        out.variance.push_back(second - mean * mean);
    }
    return out;
}

double expected_future(const Scenario& sc, const QuadratureConfig& cfg) {
    const auto& mu = sc.cluster.mu;
    const std::vector<double> offsets{sc.t, sc.t + sc.s};
    const auto breaks = reflected_kinks(mu, offsets, 0.0, 1.0);
    const double base = integrate_against([&](double v) { return mu.increment(sc.t - v, sc.t + sc.s - v); },
                                          sc.center, 0.0, 1.0, cfg, breaks);
    return sc.cluster.is_poisson() ? base : base * sc.cluster.q() / sc.cluster.p;
}

Scenario poisson_scenario(MeanValueFunction center, MeanValueFunction mu, double t, double s) {
    return {std::move(center), ClusterModel::poisson(std::move(mu)), DelayDistribution::none(), t, s};
}

Scenario nb_scenario(MeanValueFunction center, MeanValueFunction mu, double p, double t, double s) {
    return {std::move(center), ClusterModel::negbinomial(std::move(mu), p), DelayDistribution::none(), t, s};
}

Scenario reference_poisson() {
    return poisson_scenario(MeanValueFunction::linear(30), MeanValueFunction::linear(5));
}

std::vector<Scenario> poisson_smoke() {
    using F = MeanValueFunction;
    return {
        reference_poisson(),
        poisson_scenario(F::linear(60), F::rational(5)),
        poisson_scenario(F::linear(30), F::power(5, 2)),
        poisson_scenario(F::tabulated({0, 0.4, 1}, {0, 4, 20}), F::capped_linear(6, 1.5), 1.2, 0.5),
    };
}

std::vector<Scenario> nb_smoke() {
    using F = MeanValueFunction;
    return {
        nb_scenario(F::linear(1), F::linear(1), 0.3),
        nb_scenario(F::linear(30), F::linear(5), 0.5),
        nb_scenario(F::linear(20), F::linear(2), 0.5),
        nb_scenario(F::linear(30), F::linear(5), 0.8),
        nb_scenario(F::linear(60), F::rational(5), 0.8),
    };
}

double z_score(double a, double b, double stderr_ab) {
    if (stderr_ab > 0.0) return (a - b) / stderr_ab;
    return a == b ? 0.0 : std::numeric_limits<double>::infinity();
}

}  // namespace nhpc::oracle
