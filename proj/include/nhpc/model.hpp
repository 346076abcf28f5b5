#pragma once

// Mean value functions, cluster families, reporting delays and the Scenario record.

#include <string>
#include <variant>
#include <vector>

namespace nhpc {

struct QuadratureConfig;

// Continuous nondecreasing x -> mu(x) with mu(x) = 0 for x <= 0. Used both for the
// claim arrival measure Lambda on [0, 1] and for the cluster mean value function.
class MeanValueFunction {
public:
    struct Linear {
        double a = 0.0;
    };
    // a x / (1 + x^2) on [0, 1], held at its maximum a / 2 for x > 1.
    struct Rational {
        double a = 0.0;
    };
    struct Power {
        double a = 0.0;
        double p = 1.0;
    };
    struct CappedLinear {
        double a = 0.0;
        double cap = 1.0;
    };
    // Piecewise linear through the knots, constant after the last one.
    struct Tabulated {
        std::vector<double> x;
        std::vector<double> y;
    };
    using Variant = std::variant<Linear, Rational, Power, CappedLinear, Tabulated>;

    MeanValueFunction() = default;
    MeanValueFunction(Variant v) : v_(std::move(v)) {}  // NOLINT(google-explicit-constructor)

    static MeanValueFunction linear(double a) { return Variant{Linear{a}}; }
    static MeanValueFunction rational(double a) { return Variant{Rational{a}}; }
    static MeanValueFunction power(double a, double p) { return Variant{Power{a, p}}; }
    static MeanValueFunction capped_linear(double a, double cap) { return Variant{CappedLinear{a, cap}}; }
    static MeanValueFunction tabulated(std::vector<double> x, std::vector<double> y) {
        return Variant{Tabulated{std::move(x), std::move(y)}};
    }

    const Variant& variant() const noexcept { return v_; }

    double operator()(double x) const;
    // mu(b) - mu(a) with both arguments clamped at 0. Throws ArgumentError if a > b.
    double increment(double a, double b) const;
    // d mu / dx (right derivative at kinks); 0 for x < 0.
    double density(double x) const;
    // Smallest x >= 0 with mu(x) >= y, for 0 <= y <= mu(upper).
    double inverse(double y) const;
    // Abscissas in (lo, hi) where mu or its derivative may jump (always includes 0).
    std::vector<double> kinks(double lo, double hi) const;
    // True when mu is provably constant on [a, b].
    bool is_constant_on(double a, double b) const;

    // Invariant violations, each prefixed by path.
    std::vector<std::string> violations(const std::string& path) const;
    std::string fingerprint() const;

private:
    Variant v_ = Linear{0.0};
};

// Claim payment process family: Poisson(mu) or negative binomial NB(mu, p).
struct ClusterModel {
    enum class Family { poisson, negbinomial };

    Family family = Family::poisson;
    MeanValueFunction mu;
    double p = 0.5;  // success probability, negbinomial only

    static ClusterModel poisson(MeanValueFunction mu) { return {Family::poisson, std::move(mu), 0.5}; }
    static ClusterModel negbinomial(MeanValueFunction mu, double p) {
        return {Family::negbinomial, std::move(mu), p};
    }

    double q() const noexcept { return 1.0 - p; }
    bool is_poisson() const noexcept { return family == Family::poisson; }
};

struct IncrementMoments {
    double m1 = 0.0;  // E[X]
    double m2 = 0.0;  // E[X^2]
};

// Raw moments of the cluster increment over (a, b].
IncrementMoments cluster_increment_moments(const ClusterModel& c, double a, double b);
// Same, from an already computed mean-value increment delta >= 0.
IncrementMoments cluster_moments_from_delta(const ClusterModel& c, double delta) noexcept;

// Reporting delay D between claim arrival and the start of its payment process.
class DelayDistribution {
public:
    struct None {};
    struct Deterministic {
        double d = 0.0;
    };
    struct Exponential {
        double rate = 1.0;
    };
    struct Uniform {
        double lo = 0.0;
        double hi = 1.0;
    };
    using Variant = std::variant<None, Deterministic, Exponential, Uniform>;

    DelayDistribution() = default;
    DelayDistribution(Variant v) : v_(v) {}  // NOLINT(google-explicit-constructor)

    static DelayDistribution none() { return Variant{None{}}; }
    static DelayDistribution deterministic(double d) { return Variant{Deterministic{d}}; }
    static DelayDistribution exponential(double rate) { return Variant{Exponential{rate}}; }
    static DelayDistribution uniform(double lo, double hi) { return Variant{Uniform{lo, hi}}; }

    const Variant& variant() const noexcept { return v_; }
    bool is_none() const noexcept { return std::holds_alternative<None>(v_); }
    bool is_deterministic() const noexcept { return std::holds_alternative<Deterministic>(v_); }

    // P(D <= x). The `none` variant behaves as a point mass at 0.
    double cdf(double x) const;
    // P(D > x), accurate in the tail.
    double survival(double x) const;
    // Lebesgue density; 0 for the atomic variants.
    double density(double x) const;
    // Inverse cdf for u in [0, 1).
    double quantile(double u) const;
    // Points where the cdf or density is non-smooth.
    std::vector<double> kinks() const;
    // Finite upper end of the effective support (1e-16 survival quantile for exponential).
    double effective_upper() const;

    std::vector<std::string> violations(const std::string& path) const;
    std::string fingerprint() const;

private:
    Variant v_ = None{};
};

// Full problem instance: center Lambda on [0, 1], cluster law, delay, and times t, s.
struct Scenario {
    MeanValueFunction center;
    ClusterModel cluster;
    DelayDistribution delay;
    double t = 1.0;
    double s = 1.0;

    std::string fingerprint() const;
};

// Every invariant violation as "path: message"; empty when the scenario is valid.
std::vector<std::string> scenario_violations(const Scenario& sc);
// Returns sc unchanged, or throws InvalidScenario carrying every violation.
const Scenario& validate_scenario(const Scenario& sc);

struct UnconditionalMoments {
    double mean_at_t0 = 0.0;  // E[M(t0)]
    double cov = 0.0;         // Cov(M(s0), M(t0))
};

// Mean of M(t0) and Cov(M(s0), M(t0)) for 1 <= s0 <= t0 (no reporting delay).
UnconditionalMoments unconditional_moments(const Scenario& sc, double s0, double t0,
                                           const QuadratureConfig& cfg);

}  // namespace nhpc
