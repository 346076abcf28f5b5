#include "nhpc/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "nhpc/errors.hpp"

namespace nhpc {

namespace {

constexpr int kOrder = 15;
constexpr std::size_t kMaxPanels = 200000;

struct Rule {
    std::array<double, kOrder> node{};
    std::array<double, kOrder> weight{};
};

// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_15.
const Rule& gauss_legendre_15() {
    static const Rule rule = [] {
        Rule r;
        const int n = kOrder;
        for (int i = 0; i < n; ++i) {
            double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0;
                double p1 = x;
                for (int k = 2; k <= n; ++k) {
                    const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n * (x * p1 - p0) / (x * x - 1.0);
                const double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-16) break;
            }
            r.node[static_cast<std::size_t>(i)] = x;
            r.weight[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

struct PanelRule {
    double value;
    double abs_value;
};

PanelRule apply_rule(const std::function<double(double)>& f, double a, double b) {
    const Rule& r = gauss_legendre_15();
    const double half = 0.5 * (b - a);
    const double mid = 0.5 * (a + b);
    double sum = 0.0;
    double abs_sum = 0.0;
    for (std::size_t i = 0; i < kOrder; ++i) {
        const double fx = f(mid + half * r.node[i]);
        sum += r.weight[i] * fx;
        abs_sum += r.weight[i] * std::fabs(fx);
    }
    return {sum * half, abs_sum * half};
}

struct Panel {
    double a, b;
    PanelRule left, right;
    double error;
    int depth;
    double value() const { return left.value + right.value; }
    double l1() const { return left.abs_value + right.abs_value; }
};

struct ByError {
    bool operator()(const Panel& x, const Panel& y) const { return x.error < y.error; }
};

Panel make_panel(const std::function<double(double)>& f, double a, double b, double whole,
                 int depth) {
    const double m = 0.5 * (a + b);
    Panel p{a, b, apply_rule(f, a, m), apply_rule(f, m, b), 0.0, depth};
    p.error = std::fabs(p.value() - whole);
    return p;
}

std::vector<double> cut_points(double lo, double hi, std::span<const double> breaks) {
    std::vector<double> pts{lo};
    for (double x : breaks) {
        if (x > lo && x < hi) pts.push_back(x);
    }
    pts.push_back(hi);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

}  // namespace

std::vector<std::string> QuadratureConfig::violations(const std::string& path) const {
    std::vector<std::string> out;
    if (!(rel_tol > 0.0)) out.push_back(path + ".rel_tol: rel_tol > 0 required");
    if (!(abs_tol >= 0.0)) out.push_back(path + ".abs_tol: abs_tol >= 0 required");
    if (max_depth < 1) out.push_back(path + ".max_depth: max_depth >= 1 required");
    return out;
}

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double lo, double hi,
                                    std::span<const double> breaks, const QuadratureConfig& cfg) {
    if (!(lo <= hi)) throw ArgumentError("integrate: need lo <= hi");
    if (lo == hi) return {};
    const auto pts = cut_points(lo, hi, breaks);

    std::priority_queue<Panel, std::vector<Panel>, ByError> open;
    std::vector<Panel> finished;
    double total = 0.0;
    double total_err = 0.0;
    double total_l1 = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double whole = apply_rule(f, pts[i], pts[i + 1]).value;
        Panel p = make_panel(f, pts[i], pts[i + 1], whole, 0);
        total += p.value();
        total_err += p.error;
        total_l1 += p.l1();
        open.push(p);
    }

    constexpr double kEps = std::numeric_limits<double>::epsilon();
    auto tolerance = [&] {
        return std::max({cfg.abs_tol, cfg.rel_tol * std::fabs(total), 50.0 * kEps * total_l1});
    };
    std::size_t panels = open.size();
    while (total_err > tolerance() && !open.empty()) {
        Panel worst = open.top();
        open.pop();
        if (worst.depth >= cfg.max_depth || panels >= kMaxPanels) {
            finished.push_back(worst);
            continue;
        }
        const double m = 0.5 * (worst.a + worst.b);
        Panel l = make_panel(f, worst.a, m, worst.left.value, worst.depth + 1);
        Panel r = make_panel(f, m, worst.b, worst.right.value, worst.depth + 1);
        total += l.value() + r.value() - worst.value();
        total_err += l.error + r.error - worst.error;
        total_l1 += l.l1() + r.l1() - worst.l1();
        open.push(l);
        open.push(r);
        ++panels;
    }
    // Re-sum from scratch: the running totals accumulate cancellation noise.
    double value = 0.0;
    double err = 0.0;
    double l1 = 0.0;
    for (const Panel& p : finished) {
        value += p.value();
        err += p.error;
        l1 += p.l1();
    }
    while (!open.empty()) {
        value += open.top().value();
        err += open.top().error;
        l1 += open.top().l1();
        open.pop();
    }
    if (!std::isfinite(value)) {
        throw ConvergenceError("integrate: non-finite integrand value", value, err);
    }
    const double tol = std::max({cfg.abs_tol, cfg.rel_tol * std::fabs(value), 50.0 * kEps * l1});
    if (err > tol) {
        throw ConvergenceError("integrate: tolerance not reached within max_depth", value, err);
    }
    return {value, err, l1};
}

QuadratureResult integrate_against_detailed(const std::function<double(double)>& g,
                                            const MeanValueFunction& lambda, double lo, double hi,
                                            const QuadratureConfig& cfg,
                                            std::span<const double> extra_breaks) {
    if (!(0.0 <= lo && lo <= hi)) throw ArgumentError("integrate_against: need 0 <= lo <= hi");
    std::vector<double> breaks = lambda.kinks(lo, hi);
    breaks.insert(breaks.end(), extra_breaks.begin(), extra_breaks.end());
    return integrate_adaptive(
        [&](double v) {
            const double dens = lambda.density(v);
            return dens == 0.0 ? 0.0 : g(v) * dens;
        },
        lo, hi, breaks, cfg);
}

double integrate_against(const std::function<double(double)>& g, const MeanValueFunction& lambda,
                         double lo, double hi, const QuadratureConfig& cfg,
                         std::span<const double> extra_breaks) {
    return integrate_against_detailed(g, lambda, lo, hi, cfg, extra_breaks).value;
}

Tracked integrate_against_x(const std::function<XReal(double)>& g, const MeanValueFunction& lambda,
                            double lo, double hi, const QuadratureConfig& cfg,
                            std::span<const double> extra_breaks) {
    if (!(0.0 <= lo && lo <= hi)) throw ArgumentError("integrate_against: need 0 <= lo <= hi");
    if (lo == hi) return {};
    std::vector<double> breaks = lambda.kinks(lo, hi);
    breaks.insert(breaks.end(), extra_breaks.begin(), extra_breaks.end());

    // Scale by the largest sampled magnitude so the scaled integrand fits in a double.
    const double ninf = -std::numeric_limits<double>::infinity();
    double scale = ninf;
    const auto pts = cut_points(lo, hi, breaks);
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        constexpr int kSamples = 33;
        for (int k = 0; k <= kSamples; ++k) {
            const double v = pts[i] + (pts[i + 1] - pts[i]) * (k + 0.5) / (kSamples + 1.0);
            if (lambda.density(v) > 0.0) scale = std::max(scale, g(v).logmag());
        }
    }
    if (scale == ninf) scale = 0.0;

    for (int attempt = 0; attempt < 8; ++attempt) {
        double seen = ninf;
        const XReal unscale = XReal::from_log(1, -scale);
        const auto res = integrate_adaptive(
            [&](double v) {
                const double dens = lambda.density(v);
                if (dens == 0.0) return 0.0;
                const XReal gv = g(v);
                seen = std::max(seen, gv.logmag());
                if (gv.logmag() - scale > 600.0) return 0.0;  // rescaled below
                return (gv * unscale).to_double() * dens;
            },
            lo, hi, breaks, cfg);
        if (seen - scale > 600.0) {
            scale = seen;
            continue;
        }
        const XReal value = XReal::from_double(res.value) * XReal::from_log(1, scale);
        double lost = 0.0;
        if (res.value != 0.0) lost = std::max(0.0, std::log10(res.l1 / std::fabs(res.value)));
        return {value, lost};
    }
    throw ConvergenceError("integrate_against_x: could not stabilise scaling", 0.0, 0.0);
}

namespace {

std::vector<double> outer_breaks(const std::vector<AffineBound>& curves) {
    std::vector<double> out;
    for (std::size_t i = 0; i < curves.size(); ++i) {
        for (std::size_t j = i + 1; j < curves.size(); ++j) {
            const auto& x = curves[i];
            const auto& y = curves[j];
            if (!std::isfinite(x.intercept) || !std::isfinite(y.intercept)) continue;
            if (x.slope == y.slope) continue;
            const double v = (y.intercept - x.intercept) / (x.slope - y.slope);
            if (v > 0.0 && v < 1.0) out.push_back(v);
        }
    }
    return out;
}

}  // namespace

double integrate_delay_region(const std::function<double(double, double)>& g,
                              const MeanValueFunction& lambda, const DelayDistribution& delay,
                              AffineBound r_lo, AffineBound r_hi, const QuadratureConfig& cfg,
                              std::span<const AffineBound> inner_breaks) {
    if (delay.is_none()) return 0.0;

    std::vector<AffineBound> curves{r_lo, r_hi};
    curves.insert(curves.end(), inner_breaks.begin(), inner_breaks.end());
    for (double k : delay.kinks()) curves.push_back({k, 0.0});
    const auto vbreaks = outer_breaks(curves);

    if (const auto* det = std::get_if<DelayDistribution::Deterministic>(&delay.variant())) {
        const double d = det->d;
        return integrate_against(
            [&](double v) {
                const bool inside = r_lo.at(v) < d && d <= r_hi.at(v);
                return inside ? g(v, d) : 0.0;
            },
            lambda, 0.0, 1.0, cfg, vbreaks);
    }

    const double support_lo = std::holds_alternative<DelayDistribution::Uniform>(delay.variant())
                                  ? std::get<DelayDistribution::Uniform>(delay.variant()).lo
                                  : 0.0;
    const double support_hi = delay.effective_upper();
    return integrate_against(
        [&](double v) {
            const double a = std::max(r_lo.at(v), support_lo);
            const double b = std::min(r_hi.at(v), support_hi);
            if (!(a < b)) return 0.0;
            std::vector<double> rb;
            rb.reserve(inner_breaks.size());
            for (const auto& c : inner_breaks) rb.push_back(c.at(v));
            return integrate_adaptive([&](double r) { return g(v, r) * delay.density(r); }, a, b,
                                      rb, cfg)
                .value;
        },
        lambda, 0.0, 1.0, cfg, vbreaks);
}

std::vector<double> reflected_kinks(const MeanValueFunction& mu, std::span<const double> offsets,
                                    double lo, double hi) {
    std::vector<double> out;
    for (double off : offsets) {
        for (double k : mu.kinks(off - hi, off - lo)) out.push_back(off - k);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace nhpc
