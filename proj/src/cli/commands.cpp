#include "nhpc/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include <json.hpp>

#include "nhpc/delay_predictor.hpp"
#include "nhpc/montecarlo.hpp"
#include "nhpc/nb_predictor.hpp"
#include "nhpc/poisson_predictor.hpp"

namespace nhpc::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kZLimit = 3.0;

std::string format_cell(const Cell& c) {
    if (const auto* l = std::get_if<long>(&c)) return std::to_string(*l);
    if (const auto* d = std::get_if<double>(&c)) {
        if (std::isnan(*d)) return "nan";
        if (std::isinf(*d)) return *d > 0 ? "inf" : "-inf";
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", *d);
        return buf;
    }
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

const McSettings& require_mc(const RunConfig& cfg, const char* command) {
    if (!cfg.mc) throw ConfigError(std::string("mc: required for the ") + command + " command");
    return *cfg.mc;
}

std::vector<Cell> null_event_row(long m) { return {m, kNaN, kNaN, kNaN, std::string("null_event")}; }

Table predict_conditional(const RunConfig& cfg) {
    const auto& sc = cfg.scenario;
    Table t{{"m", "mean", "variance", "log_pmf", "flags"}, {}, false};
    const auto emit = [&](long m, const auto& predict) {
        try {
            const PredictionResult r = predict(static_cast<int>(m));
            t.rows.push_back({m, r.mean, r.variance, r.log_pmf, flags_to_string(r.flags)});
        } catch (const NullEventError&) {
            t.rows.push_back(null_event_row(m));
            t.degraded = true;
        }
    };
    if (sc.cluster.is_poisson()) {
        const auto tab = build_poisson_tables(sc, static_cast<int>(cfg.hi), cfg.quadrature);
        for (long m = cfg.lo; m <= cfg.hi; ++m) emit(m, [&](int k) { return predict_poisson(tab, k); });
    } else {
        const auto tab = build_nb_tables(sc, static_cast<int>(cfg.hi), cfg.quadrature);
        for (long m = cfg.lo; m <= cfg.hi; ++m) emit(m, [&](int k) { return predict_nb(tab, k); });
    }
    return t;
}

struct Checks {
    Table table{{"check", "at", "recursion", "reference", "stderr", "z", "pass"}, {}, false};
    bool all_passed = true;

    void statistical(const std::string& name, long at, double rec, const OracleEstimate& o) {
        const double diff = rec - o.value;
        const double z = o.std_error > 0.0 ? diff / o.std_error : (diff == 0.0 ? 0.0 : kNaN);
        const bool ok = std::isfinite(z) && std::fabs(z) < kZLimit;
        add(name, at, rec, o.value, o.std_error, z, ok);
    }
    void tolerance(const std::string& name, long at, double rec, double ref, double tol) {
        const bool ok = std::fabs(rec - ref) <= tol;
        add(name, at, rec, ref, kNaN, kNaN, ok);
    }
    void skipped(const std::string& name, long at) {
        table.rows.push_back({name, at, kNaN, kNaN, kNaN, kNaN, std::string("skip")});
    }
    void add(const std::string& name, long at, double rec, double ref, double se, double z, bool ok) {
        table.rows.push_back({name, at, rec, ref, se, z, std::string(ok ? "pass" : "fail")});
        all_passed = all_passed && ok;
    }
};

// Five conditioning values mean + k sd, k = -2..2, rounded, clipped at 0, deduplicated.
std::vector<long> central_values(double mean, double sd) {
    std::vector<long> out;
    for (int k = -2; k <= 2; ++k) out.push_back(std::max(0L, std::lround(mean + k * sd)));
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

double future_mean(const Scenario& sc, const QuadratureConfig& q) {
    const double f = sc.cluster.is_poisson() ? 1.0 : sc.cluster.q() / sc.cluster.p;
    const std::vector<double> offsets{sc.t, sc.t + sc.s};
    const auto breaks = reflected_kinks(sc.cluster.mu, offsets, 0.0, 1.0);
    return f * integrate_against([&](double v) { return sc.cluster.mu.increment(sc.t - v, sc.t + sc.s - v); },
                                 sc.center, 0.0, 1.0, q, breaks);
}

void validate_conditional(const RunConfig& cfg, const McSettings& mc, int threads, Checks& checks) {
    const auto& sc = cfg.scenario;
    const auto mom = unconditional_moments(sc, sc.t, sc.t, cfg.quadrature);
    const double sd = std::sqrt(std::max(mom.cov, 0.0));
    const int m_norm = static_cast<int>(std::min<double>(kMaxTableSize, std::ceil(mom.mean_at_t0 + 12.0 * sd + 30.0)));
    const double tower_ref = future_mean(sc, cfg.quadrature);
    const bool poisson = sc.cluster.is_poisson();

    std::vector<double> pmf;
    std::vector<PredictionResult> pred;
    PoissonTables ptab;
    NBTables ntab;
    if (poisson) {
        ptab = build_poisson_tables(sc, m_norm, cfg.quadrature);
        for (int m = 0; m <= m_norm; ++m) {
            pmf.push_back(poisson_pmf(ptab, m));
            pred.push_back(predict_poisson(ptab, m));
        }
    } else {
        ntab = build_nb_tables(sc, m_norm, cfg.quadrature);
        for (int m = 0; m <= m_norm; ++m) {
            const auto d = nb_pmf_detailed(ntab, m);
            if (d.lost_digits > kPrecisionAlarmDigits || d.value <= 0.0) break;
            const auto r = predict_nb(ntab, m);
            if (r.has(Flag::precision_warning)) break;
            pmf.push_back(d.value);
            pred.push_back(r);
        }
    }
    double total = 0.0;
    double tower = 0.0;
    for (std::size_t m = 0; m < pmf.size(); ++m) {
        total += pmf[m];
        tower += pmf[m] * pred[m].mean;
    }
    const long last = static_cast<long>(pmf.size()) - 1;
    checks.tolerance("normalization", last, total, 1.0, poisson ? 1e-8 : 1e-6);
    checks.tolerance("tower", last, tower, tower_ref, (poisson ? 1e-6 : 1e-5) * std::fabs(tower_ref));

    const SemiAnalyticSampler sampler(sc, std::max(mc.replicates, kMinSemiAnalyticReps), mc.seed, threads);
    const auto sim = simulate(sc, mc.replicates, mc.seed + 1, threads);
    for (long m : central_values(mom.mean_at_t0, sd)) {
        if (m > last) {
            checks.skipped("mean_vs_ratio_oracle", m);
            continue;
        }
        const auto& r = pred[static_cast<std::size_t>(m)];
        try {
            const auto est = sampler.estimate(m);
            checks.statistical("mean_vs_ratio_oracle", m, r.mean, est.mean);
            checks.statistical("variance_vs_ratio_oracle", m, r.variance, est.var);
            checks.statistical("pmf_vs_ratio_oracle", m, pmf[static_cast<std::size_t>(m)], sampler.pmf(m));
        } catch (const TailUnreliableError&) {
            checks.skipped("mean_vs_ratio_oracle", m);
        }
        try {
            const auto bin = binned_conditional_oracle(sim, Conditioning::m_t, m);
            checks.statistical("mean_vs_binned", m, r.mean, bin.mean);
        } catch (const InsufficientDataError&) {
            checks.skipped("mean_vs_binned", m);
        }
    }
}

void validate_delay(const RunConfig& cfg, const McSettings& mc, int threads, Checks& checks) {
    const auto& sc = cfg.scenario;
    const auto comp = delay_components(sc, cfg.quadrature);
    const auto sim = simulate(sc, mc.replicates, mc.seed, threads);
    for (long ell : central_values(comp.n_hat_mean, std::sqrt(comp.n_hat_mean))) {
        const auto r = predict_delay(comp, ell);
        try {
            const auto bin = binned_conditional_oracle(sim, Conditioning::n_hat, ell);
            checks.statistical("mean_vs_binned", ell, r.mean, bin.mean);
            checks.statistical("variance_vs_binned", ell, r.variance, bin.var);
        } catch (const InsufficientDataError&) {
            checks.skipped("mean_vs_binned", ell);
        }
    }
    // Empirical squared prediction error and the sample mean of M(t, t+s].
    const double n = static_cast<double>(sim.reps.size());
    double se_sum = 0.0;
    double se_sq = 0.0;
    double incr = 0.0;
    double incr_sq = 0.0;
    for (const auto& rep : sim.reps) {
        const double e = static_cast<double>(rep.m_incr) - predict_delay(comp, rep.n_hat).mean;
        se_sum += e * e;
        se_sq += e * e * e * e;
        incr += static_cast<double>(rep.m_incr);
        incr_sq += static_cast<double>(rep.m_incr) * static_cast<double>(rep.m_incr);
    }
    const double mse = se_sum / n;
    const double mse_se = std::sqrt(std::max(0.0, se_sq / n - mse * mse) / n);
    checks.statistical("mse_vs_empirical", -1, unconditional_mse(comp), {mse, mse_se, n});
    const double mean = incr / n;
    const double mean_se = std::sqrt(std::max(0.0, incr_sq / n - mean * mean) / n);
    checks.statistical("tower", -1, comp.n_hat_mean * comp.J1 + comp.H1, {mean, mean_se, n});
}

}  // namespace

std::string to_csv(const Table& t) {
    std::string out;
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
        if (i) out += ',';
        out += t.columns[i];
    }
    out += '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ',';
            out += format_cell(row[i]);
        }
        out += '\n';
    }
    return out;
}

std::string to_json(const Table& t) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& row : t.rows) {
        nlohmann::ordered_json obj = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size() && i < t.columns.size(); ++i) {
            const auto& key = t.columns[i];
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) {
                        obj[key] = std::isfinite(v) ? nlohmann::ordered_json(v) : nlohmann::ordered_json(nullptr);
                    } else {
                        obj[key] = v;
                    }
                },
                row[i]);
        }
        arr.push_back(std::move(obj));
    }
    return arr.dump(2) + "\n";
}

Table cmd_predict(const RunConfig& cfg) {
    switch (cfg.selector) {
        case Selector::none:
            throw ConfigError("m: one of m, m_range or ell is required for predict");
        case Selector::m:
        case Selector::m_range:
            return predict_conditional(cfg);
        case Selector::ell: {
            const auto comp = delay_components(cfg.scenario, cfg.quadrature);
            const auto r = predict_delay(comp, cfg.lo);
            return {{"ell", "mean", "variance", "unconditional_mse"},
                    {{cfg.lo, r.mean, r.variance, unconditional_mse(comp)}},
                    false};
        }
    }
    return {};
}

std::vector<Scenario> figure_scenarios(double t, double s) {
    std::vector<Scenario> out;
    for (double lam : {30.0, 60.0}) {
        for (const auto& mu : {MeanValueFunction::linear(5.0), MeanValueFunction::rational(5.0),
                               MeanValueFunction::power(5.0, 2.0)}) {
            out.push_back({MeanValueFunction::linear(lam), ClusterModel::poisson(mu), DelayDistribution::none(), t, s});
        }
    }
    return out;
}

FigureOptions figure_options(const RunConfig& cfg) {
    FigureOptions opt;
    opt.t = cfg.scenario.t;
    opt.s = cfg.scenario.s;
    opt.quadrature = cfg.quadrature;
    if (cfg.selector == Selector::m_range || cfg.selector == Selector::m) {
        opt.m_lo = cfg.lo;
        opt.m_hi = cfg.hi;
    }
    return opt;
}

std::vector<FigurePanel> cmd_figure(const FigureOptions& opt) {
    static const char* kNames[] = {"lambda30_mu1_linear", "lambda30_mu2_rational", "lambda30_mu3_power",
                                   "lambda60_mu1_linear", "lambda60_mu2_rational", "lambda60_mu3_power"};
    std::vector<FigurePanel> out;
    const auto scenarios = figure_scenarios(opt.t, opt.s);
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
        validate_scenario(scenarios[i]);
        const auto curve = predict_poisson_curve(scenarios[i], static_cast<int>(opt.m_lo), static_cast<int>(opt.m_hi),
                                                 opt.quadrature);
        // The straight dotted line from the first to the last point of each panel.
        const double first = curve.front().result.mean;
        const double last = curve.back().result.mean;
        const double span = static_cast<double>(opt.m_hi - opt.m_lo);
        Table t{{"m", "mean", "reference"}, {}, false};
        for (const auto& p : curve) {
            const double w = span > 0 ? static_cast<double>(p.m - opt.m_lo) / span : 0.0;
            t.rows.push_back({static_cast<long>(p.m), p.result.mean, first + (last - first) * w});
        }
        out.push_back({kNames[i], scenarios[i], std::move(t)});
    }
    return out;
}

Table cmd_simulate(const RunConfig& cfg, int threads) {
    const auto& mc = require_mc(cfg, "simulate");
    const auto out = simulate(cfg.scenario, mc.replicates, mc.seed, threads);
    Table t{{"replicate", "m_t", "m_incr", "n1", "n_hat"}, {}, false};
    t.rows.reserve(out.reps.size());
    for (std::size_t i = 0; i < out.reps.size(); ++i) {
        const auto& r = out.reps[i];
        t.rows.push_back({static_cast<long>(i), r.m_t, r.m_incr, r.n1,
                          out.has_delay ? Cell(r.n_hat) : Cell(std::string())});
    }
    return t;
}

ValidationReport cmd_validate(const RunConfig& cfg, int threads) {
    const auto& mc = require_mc(cfg, "validate");
    Checks checks;
    if (cfg.scenario.delay.is_none()) {
        validate_conditional(cfg, mc, threads, checks);
    } else {
        validate_delay(cfg, mc, threads, checks);
    }
    return {std::move(checks.table), checks.all_passed};
}

}  // namespace nhpc::cli
