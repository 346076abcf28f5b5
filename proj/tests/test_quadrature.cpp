#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "nhpc/errors.hpp"
#include "nhpc/quadrature.hpp"

using namespace nhpc;
using F = MeanValueFunction;

namespace {
const QuadratureConfig kCfg;
const double kInf = std::numeric_limits<double>::infinity();
}  // namespace

TEST_CASE("integrals against a linear measure") {
    const auto lam = F::linear(30);
    CHECK(integrate_against([](double) { return 1.0; }, lam, 0, 1, kCfg) == doctest::Approx(30.0).epsilon(1e-14));
    CHECK(integrate_against([](double v) { return v; }, lam, 0, 1, kCfg) == doctest::Approx(15.0).epsilon(1e-14));
    const double expected = 6.0 * (1.0 - std::exp(-5.0));
    const double got = integrate_against([](double v) { return std::exp(-5.0 * (1.0 - v)); }, lam, 0, 1, kCfg);
    CHECK(got == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("polynomials against closed forms") {
    // \int_0^1 v^k * d(a v^p) = a p / (k + p)
    for (double p : {1.0, 2.0, 3.5}) {
        for (int k = 0; k <= 12; ++k) {
            const double got = integrate_against([k](double v) { return std::pow(v, k); }, F::power(3, p), 0, 1, kCfg);
            CHECK(got == doctest::Approx(3.0 * p / (k + p)).epsilon(kCfg.rel_tol));
        }
    }
}

TEST_CASE("measures with kinks are split at the kinks") {
    // tabulated: density 10 on [0, 0.5), 30 on [0.5, 1]
    const auto lam = F::tabulated({0, 0.5, 1}, {0, 5, 20});
    const double got = integrate_against([](double v) { return v * v; }, lam, 0, 1, kCfg);
    CHECK(got == doctest::Approx(10.0 / 24.0 + 30.0 * (1.0 - 0.125) / 3.0).epsilon(1e-13));
    const double capped = integrate_against([](double v) { return std::exp(v); }, F::capped_linear(2, 0.3), 0, 1, kCfg);
    CHECK(capped == doctest::Approx(2.0 * (std::exp(0.3) - 1.0)).epsilon(1e-13));
}

TEST_CASE("linearity and splitting") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto lam = F::rational(7);
    const auto g1 = [](double v) { return std::sin(3 * v) + 2.0; };
    const auto g2 = [](double v) { return std::exp(-v * v); };
    for (int i = 0; i < 20; ++i) {
        const double a = u(rng) * 4 - 2, b = u(rng) * 4 - 2, c = u(rng);
        const double lhs = integrate_against([&](double v) { return a * g1(v) + b * g2(v); }, lam, 0, 1, kCfg);
        const double rhs = a * integrate_against(g1, lam, 0, 1, kCfg) + b * integrate_against(g2, lam, 0, 1, kCfg);
        CHECK(std::fabs(lhs - rhs) <= 1e-10 * (std::fabs(a) + std::fabs(b)) * 10.0);
        const double whole = integrate_against(g1, lam, 0, 1, kCfg);
        const double parts = integrate_against(g1, lam, 0, c, kCfg) + integrate_against(g1, lam, c, 1, kCfg);
        CHECK(std::fabs(whole - parts) <= 1e-12 * std::fabs(whole));
    }
}

TEST_CASE("convergence failure carries the best estimate") {
    QuadratureConfig tight;
    tight.max_depth = 2;
    tight.rel_tol = 1e-14;
    const auto nasty = [](double v) { return std::sqrt(std::fabs(v - 0.3141)); };
    CHECK_THROWS_AS(integrate_against(nasty, F::linear(1), 0, 1, tight), ConvergenceError);
    try {
        integrate_against(nasty, F::linear(1), 0, 1, tight);
    } catch (const ConvergenceError& e) {
        const double exact = (2.0 / 3.0) * (std::pow(0.3141, 1.5) + std::pow(1 - 0.3141, 1.5));
        CHECK(std::fabs(e.best_estimate() - exact) < 1e-3);
        CHECK(e.error_bound() > 0.0);
    }
}

TEST_CASE("config violations") {
    QuadratureConfig bad;
    bad.rel_tol = 0;
    bad.max_depth = 0;
    CHECK(bad.violations("quadrature").size() == 2);
    CHECK(QuadratureConfig{}.violations("quadrature").empty());
}

TEST_CASE("extended-range integrals") {
    // \int e^{800 v} * 30 dv in extended range, compared in the log domain
    const auto r = integrate_against_x([](double v) { return XReal::from_log(1, 800.0 * v); }, F::linear(30), 0, 1, kCfg);
    const double expect = std::log(30.0 / 800.0) + 800.0 + std::log1p(-std::exp(-800.0));
    CHECK(r.value.logmag() == doctest::Approx(expect).epsilon(1e-13));
    CHECK(r.lost_digits == doctest::Approx(0.0));
    // A sign-changing integrand reports its cancellation.
    const auto c = integrate_against_x([](double v) { return XReal::from_double(v - 0.5 + 1e-6); }, F::linear(1), 0, 1, kCfg);
    CHECK(c.value.to_double() == doctest::Approx(1e-6).epsilon(1e-8));
    CHECK(c.lost_digits == doctest::Approx(std::log10(0.25 / 1e-6)).epsilon(1e-3));
}

TEST_CASE("delay regions") {
    const auto lam = F::linear(30);
    const AffineBound lo{1.0, -1.0};  // r > t - v with t = 1
    const AffineBound hi{2.0, -1.0};  // r <= t + s - v with s = 1
    const auto one = [](double, double) { return 1.0; };

    CHECK(integrate_delay_region(one, lam, DelayDistribution::deterministic(0), lo, hi, kCfg) == 0.0);
    CHECK(integrate_delay_region(one, lam, DelayDistribution::none(), lo, hi, kCfg) == 0.0);

    const double unreported = integrate_delay_region(one, lam, DelayDistribution::exponential(2), lo, {kInf, 0.0}, kCfg);
    CHECK(unreported == doctest::Approx(15.0 * (1.0 - std::exp(-2.0))).epsilon(1e-12));

    CHECK(integrate_delay_region(one, lam, DelayDistribution::uniform(0, 1), lo, hi, kCfg) ==
          doctest::Approx(15.0).epsilon(1e-12));

    // Deterministic delay by substitution: d = 0.25 lies in (1 - v, 2 - v] iff v > 0.75.
    const auto g = [](double v, double r) { return v + r; };
    CHECK(integrate_delay_region(g, lam, DelayDistribution::deterministic(0.25), lo, hi, kCfg) ==
          doctest::Approx(30.0 * ((1.0 - 0.5625) / 2.0 + 0.25 * 0.25)).epsilon(1e-12));

    // Iterated integral against the closed form: \int_0^1 \int_0^{1-v} r 2 e^{-2r} dr 30 dv.
    const double got = integrate_delay_region([](double, double r) { return r; }, lam, DelayDistribution::exponential(2),
                                              {-kInf, 0.0}, {1.0, -1.0}, kCfg);
    // inner: F(x) = 1/2 - e^{-2x}(x + 1/2); outer: 30 \int_0^1 F(w) dw
    const double expect = 30.0 * (0.5 - (0.5 * (1 - std::exp(-2.0)) / 2.0 + (0.25 - std::exp(-2.0) * 0.75)));
    CHECK(got == doctest::Approx(expect).epsilon(1e-11));
}

TEST_CASE("reflected kinks") {
    const std::vector<double> offsets{1.0, 2.0};
    const auto k = reflected_kinks(F::capped_linear(1, 1.5), offsets, 0.0, 1.0);
    // 1 - 0 = 1 (endpoint, excluded), 2 - 1.5 = 0.5
    REQUIRE(k.size() == 1);
    CHECK(k[0] == 0.5);
}
