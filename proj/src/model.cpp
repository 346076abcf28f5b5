#include "nhpc/model.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>

#include "nhpc/errors.hpp"
#include "nhpc/quadrature.hpp"

namespace nhpc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

bool finite_nonneg(double x) { return std::isfinite(x) && x >= 0.0; }

}  // namespace

double MeanValueFunction::operator()(double x) const {
    if (!(x > 0.0)) return 0.0;
    return std::visit(
        overloaded{
            [x](const Linear& f) { return f.a * x; },
            [x](const Rational& f) { return x >= 1.0 ? 0.5 * f.a : f.a * x / (1.0 + x * x); },
            [x](const Power& f) { return f.a * std::pow(x, f.p); },
            [x](const CappedLinear& f) { return f.a * std::min(x, f.cap); },
            [x](const Tabulated& f) {
                if (x >= f.x.back()) return f.y.back();
                const auto it = std::upper_bound(f.x.begin(), f.x.end(), x);
                const auto i = static_cast<std::size_t>(std::distance(f.x.begin(), it)) - 1;
                const double w = (x - f.x[i]) / (f.x[i + 1] - f.x[i]);
                return f.y[i] + w * (f.y[i + 1] - f.y[i]);
            },
        },
        v_);
}

double MeanValueFunction::increment(double a, double b) const {
    if (a > b) {
        throw ArgumentError("mean value increment: interval (" + num(a) + ", " + num(b) +
                            "] has a > b");
    }
    if (b <= 0.0) return 0.0;
    const double d = (*this)(b) - (*this)(a);
    return d > 0.0 ? d : 0.0;
}

double MeanValueFunction::density(double x) const {
    if (x < 0.0) return 0.0;
    return std::visit(
        overloaded{
            [](const Linear& f) { return f.a; },
            [x](const Rational& f) {
                if (x >= 1.0) return 0.0;
                const double d = 1.0 + x * x;
                return f.a * (1.0 - x * x) / (d * d);
            },
            [x](const Power& f) {
                if (f.p == 1.0) return f.a;
                return f.a * f.p * std::pow(x, f.p - 1.0);
            },
            [x](const CappedLinear& f) { return x < f.cap ? f.a : 0.0; },
            [x](const Tabulated& f) {
                if (x >= f.x.back()) return 0.0;
                const auto it = std::upper_bound(f.x.begin(), f.x.end(), x);
                const auto i = static_cast<std::size_t>(std::distance(f.x.begin(), it)) - 1;
                return (f.y[i + 1] - f.y[i]) / (f.x[i + 1] - f.x[i]);
            },
        },
        v_);
}

double MeanValueFunction::inverse(double y) const {
    if (!(y > 0.0)) return 0.0;
    return std::visit(
        overloaded{
            [y](const Linear& f) { return f.a > 0.0 ? y / f.a : 0.0; },
            [y](const Rational& f) {
                if (f.a <= 0.0) return 0.0;
                if (y >= 0.5 * f.a) return 1.0;
                return 2.0 * y / (f.a + std::sqrt(f.a * f.a - 4.0 * y * y));
            },
            [y](const Power& f) { return f.a > 0.0 ? std::pow(y / f.a, 1.0 / f.p) : 0.0; },
            [y](const CappedLinear& f) { return f.a > 0.0 ? std::min(y / f.a, f.cap) : 0.0; },
            [y](const Tabulated& f) {
                if (y >= f.y.back()) {
                    // first knot attaining the final level
                    const auto it = std::lower_bound(f.y.begin(), f.y.end(), f.y.back());
                    return f.x[static_cast<std::size_t>(std::distance(f.y.begin(), it))];
                }
                const auto it = std::lower_bound(f.y.begin(), f.y.end(), y);
                const auto i = static_cast<std::size_t>(std::distance(f.y.begin(), it));
                if (i == 0) return f.x[0];
                const double w = (y - f.y[i - 1]) / (f.y[i] - f.y[i - 1]);
                return f.x[i - 1] + w * (f.x[i] - f.x[i - 1]);
            },
        },
        v_);
}

std::vector<double> MeanValueFunction::kinks(double lo, double hi) const {
    std::vector<double> pts{0.0};
    std::visit(overloaded{
                   [](const Linear&) {},
                   [&](const Rational&) { pts.push_back(1.0); },
                   [](const Power&) {},
                   [&](const CappedLinear& f) { pts.push_back(f.cap); },
                   [&](const Tabulated& f) { pts.insert(pts.end(), f.x.begin(), f.x.end()); },
               },
               v_);
    std::vector<double> out;
    for (double x : pts) {
        if (x > lo && x < hi) out.push_back(x);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool MeanValueFunction::is_constant_on(double a, double b) const {
    // nondecreasing, so constant on [a, b] iff the endpoint values agree
    return a >= b || (*this)(a) == (*this)(b);
}

std::vector<std::string> MeanValueFunction::violations(const std::string& path) const {
    std::vector<std::string> out;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) out.push_back(path + ": " + msg);
    };
    std::visit(overloaded{
                   [&](const Linear& f) { need(finite_nonneg(f.a), "a >= 0 required"); },
                   [&](const Rational& f) { need(finite_nonneg(f.a), "a >= 0 required"); },
                   [&](const Power& f) {
                       need(finite_nonneg(f.a), "a >= 0 required");
                       need(std::isfinite(f.p) && f.p >= 1.0, "p >= 1 required");
                   },
                   [&](const CappedLinear& f) {
                       need(finite_nonneg(f.a), "a >= 0 required");
                       need(std::isfinite(f.cap) && f.cap > 0.0, "cap > 0 required");
                   },
                   [&](const Tabulated& f) {
                       if (f.x.size() < 2 || f.x.size() != f.y.size()) {
                           need(false, "at least two knots with matching x/y lengths required");
                           return;
                       }
                       need(f.x[0] == 0.0 && f.y[0] == 0.0, "first knot must be (0, 0)");
                       for (std::size_t i = 1; i < f.x.size(); ++i) {
                           need(std::isfinite(f.x[i]) && f.x[i] > f.x[i - 1],
                                "knot abscissas must be strictly increasing (index " +
                                    std::to_string(i) + ")");
                           need(std::isfinite(f.y[i]) && f.y[i] >= f.y[i - 1],
                                "knot ordinates must be nondecreasing (index " +
                                    std::to_string(i) + ")");
                       }
                   },
               },
               v_);
    return out;
}

std::string MeanValueFunction::fingerprint() const {
    return std::visit(
        overloaded{
            [](const Linear& f) { return "linear(" + num(f.a) + ")"; },
            [](const Rational& f) { return "rational(" + num(f.a) + ")"; },
            [](const Power& f) { return "power(" + num(f.a) + "," + num(f.p) + ")"; },
            [](const CappedLinear& f) { return "capped_linear(" + num(f.a) + "," + num(f.cap) + ")"; },
            [](const Tabulated& f) {
                std::string s = "tabulated(";
                for (std::size_t i = 0; i < f.x.size(); ++i) {
                    s += num(f.x[i]) + ":" + num(f.y[i]) + ";";
                }
                return s + ")";
            },
        },
        v_);
}

IncrementMoments cluster_moments_from_delta(const ClusterModel& c, double delta) noexcept {
    if (c.is_poisson()) return {delta, delta + delta * delta};
    const double mean = delta * c.q() / c.p;
    const double var = mean / c.p;
    return {mean, var + mean * mean};
}

IncrementMoments cluster_increment_moments(const ClusterModel& c, double a, double b) {
    return cluster_moments_from_delta(c, c.mu.increment(a, b));
}

double DelayDistribution::cdf(double x) const {
    return std::visit(overloaded{
                          [x](const None&) { return x >= 0.0 ? 1.0 : 0.0; },
                          [x](const Deterministic& f) { return x >= f.d ? 1.0 : 0.0; },
                          [x](const Exponential& f) { return x <= 0.0 ? 0.0 : -std::expm1(-f.rate * x); },
                          [x](const Uniform& f) {
                              if (x <= f.lo) return 0.0;
                              if (x >= f.hi) return 1.0;
                              return (x - f.lo) / (f.hi - f.lo);
                          },
                      },
                      v_);
}

double DelayDistribution::survival(double x) const {
    if (const auto* e = std::get_if<Exponential>(&v_)) return x <= 0.0 ? 1.0 : std::exp(-e->rate * x);
    return 1.0 - cdf(x);
}

double DelayDistribution::density(double x) const {
    return std::visit(overloaded{
                          [](const None&) { return 0.0; },
                          [](const Deterministic&) { return 0.0; },
                          [x](const Exponential& f) { return x < 0.0 ? 0.0 : f.rate * std::exp(-f.rate * x); },
                          [x](const Uniform& f) { return (x < f.lo || x > f.hi) ? 0.0 : 1.0 / (f.hi - f.lo); },
                      },
                      v_);
}

double DelayDistribution::quantile(double u) const {
    return std::visit(overloaded{
                          [](const None&) { return 0.0; },
                          [](const Deterministic& f) { return f.d; },
                          [u](const Exponential& f) { return -std::log1p(-u) / f.rate; },
                          [u](const Uniform& f) { return f.lo + u * (f.hi - f.lo); },
                      },
                      v_);
}

std::vector<double> DelayDistribution::kinks() const {
    return std::visit(overloaded{
                          [](const None&) { return std::vector<double>{0.0}; },
                          [](const Deterministic& f) { return std::vector<double>{f.d}; },
                          [](const Exponential&) { return std::vector<double>{0.0}; },
                          [](const Uniform& f) { return std::vector<double>{f.lo, f.hi}; },
                      },
                      v_);
}

double DelayDistribution::effective_upper() const {
    return std::visit(overloaded{
                          [](const None&) { return 0.0; },
                          [](const Deterministic& f) { return f.d; },
                          [](const Exponential& f) { return -std::log(1e-16) / f.rate; },
                          [](const Uniform& f) { return f.hi; },
                      },
                      v_);
}

std::vector<std::string> DelayDistribution::violations(const std::string& path) const {
    std::vector<std::string> out;
    auto need = [&](bool ok, const std::string& msg) {
        if (!ok) out.push_back(path + ": " + msg);
    };
    std::visit(overloaded{
                   [](const None&) {},
                   [&](const Deterministic& f) { need(finite_nonneg(f.d), "d >= 0 required"); },
                   [&](const Exponential& f) { need(std::isfinite(f.rate) && f.rate > 0.0, "rate > 0 required"); },
                   [&](const Uniform& f) {
                       need(finite_nonneg(f.lo), "lo >= 0 required");
                       need(std::isfinite(f.hi) && f.hi > f.lo, "hi > lo required");
                   },
               },
               v_);
    return out;
}

std::string DelayDistribution::fingerprint() const {
    return std::visit(overloaded{
                          [](const None&) { return std::string("none"); },
                          [](const Deterministic& f) { return "deterministic(" + num(f.d) + ")"; },
                          [](const Exponential& f) { return "exponential(" + num(f.rate) + ")"; },
                          [](const Uniform& f) { return "uniform(" + num(f.lo) + "," + num(f.hi) + ")"; },
                      },
                      v_);
}

std::string Scenario::fingerprint() const {
    std::string fam = cluster.is_poisson() ? "poisson" : "negbinomial(" + num(cluster.p) + ")";
    return "center=" + center.fingerprint() + ";cluster=" + fam + ":" + cluster.mu.fingerprint() +
           ";delay=" + delay.fingerprint() + ";t=" + num(t) + ";s=" + num(s);
}

std::vector<std::string> scenario_violations(const Scenario& sc) {
    std::vector<std::string> out = sc.center.violations("model.center");
    auto append = [&out](std::vector<std::string> v) { out.insert(out.end(), v.begin(), v.end()); };
    append(sc.cluster.mu.violations("model.cluster.mu"));
    if (!sc.cluster.is_poisson() && !(sc.cluster.p > 0.0 && sc.cluster.p < 1.0)) {
        out.emplace_back("model.cluster.p: p ∈ (0,1) required");
    }
    append(sc.delay.violations("model.delay"));
    if (!(std::isfinite(sc.t) && sc.t >= 1.0)) out.emplace_back("t: t ≥ 1 required");
    if (!(std::isfinite(sc.s) && sc.s > 0.0)) out.emplace_back("s: s > 0 required");
    if (sc.center.violations("").empty() && !(sc.center(1.0) > 0.0)) {
        out.emplace_back("model.center: Λ(1) > 0 required");
    }
    return out;
}

const Scenario& validate_scenario(const Scenario& sc) {
    auto v = scenario_violations(sc);
    if (!v.empty()) throw InvalidScenario(std::move(v));
    return sc;
}

InvalidScenario::InvalidScenario(std::vector<std::string> violations)
    : Error([&] {
          std::string msg = "invalid scenario:";
          for (const auto& v : violations) msg += " [" + v + "]";
          return msg;
      }()),
      violations_(std::move(violations)) {}

UnconditionalMoments unconditional_moments(const Scenario& sc, double s0, double t0,
                                           const QuadratureConfig& cfg) {
    if (!(1.0 <= s0 && s0 <= t0)) {
        throw ArgumentError("unconditional_moments: need 1 <= s0 <= t0");
    }
    const auto& c = sc.cluster;
    const std::vector<double> offsets{s0, t0};
    const auto breaks = reflected_kinks(c.mu, offsets, 0.0, 1.0);
    const double mean = integrate_against(
        [&](double u) { return cluster_increment_moments(c, 0.0, t0 - u).m1; }, sc.center, 0.0, 1.0,
        cfg, breaks);
    const double cov = integrate_against(
        [&](double u) {
            const auto early = cluster_increment_moments(c, 0.0, s0 - u);
            const auto later = cluster_increment_moments(c, s0 - u, t0 - u);
            return early.m2 + early.m1 * later.m1;
        },
        sc.center, 0.0, 1.0, cfg, breaks);
    return {mean, cov};
}

}  // namespace nhpc
