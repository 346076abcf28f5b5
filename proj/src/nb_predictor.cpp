#include "nhpc/nb_predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "nhpc/detail/log_factorials.hpp"
#include "nhpc/detail/special.hpp"
#include "nhpc/errors.hpp"
#include "nhpc/poisson_predictor.hpp"

namespace nhpc {

namespace {

void check_index(int m, int m_max) {
    if (m < 0 || m > m_max) {
        throw ArgumentError("conditioning value m=" + std::to_string(m) + " outside table range [0, " +
                            std::to_string(m_max) + "]");
    }
}

Tracked times(const XReal& coef, const Tracked& x) { return {coef * x.value, x.lost_digits}; }

// C(m, k) ff(m-1, k); the k = m term survives only for m = 0 (ff(-1, 0) = 1).
XReal leibniz_coefficient(const detail::LogFactorials& lf, int m, int k) {
    if (k == m) return m == 0 ? XReal::from_double(1.0) : XReal();
    return lf.binomial(m, k) * XReal::from_log(1, lf[m - 1] - lf[m - 1 - k]);
}

// (p^{m-1} G_R(p))^{(m)}
Tracked pgf_denominator(const NBTables& tab, const detail::LogFactorials& lf, int m) {
    const double lp = std::log(tab.p);
    CancellationSum sum;
    for (int k = 0; k <= m; ++k) {
        const XReal coef = leibniz_coefficient(lf, m, k);
        if (coef.is_zero()) continue;
        const XReal pk = XReal::from_log(1, (m - 1 - k) * lp);
        sum.add(times(coef * pk, tab.G[static_cast<std::size_t>(m - k)][0]));
    }
    return sum.result();
}

}  // namespace

double NBTables::worst_lost_digits(int l_max) const {
    double worst = 0.0;
    const int top = std::min(l_max, static_cast<int>(G.size()) - 1);
    for (int l = 0; l <= top; ++l) {
        for (int j = 0; j < 3; ++j) {
            worst = std::max({worst, G[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)].lost_digits,
                              H[static_cast<std::size_t>(j)][static_cast<std::size_t>(l)].lost_digits});
        }
    }
    return worst;
}

NBTables build_nb_tables(const Scenario& sc, int m_max, const QuadratureConfig& cfg) {
    if (sc.cluster.is_poisson()) throw ArgumentError("NB tables need a negative binomial cluster family");
    const double p = sc.cluster.p;
    if (!(p > 0.0 && p < 1.0)) throw ArgumentError("NB tables need p in (0, 1)");
    if (m_max < 0) throw ArgumentError("m_max must be >= 0");
    if (m_max > kMaxTableSize) {
        throw ArgumentError("m_max " + std::to_string(m_max) + " exceeds the table size guard " +
                            std::to_string(kMaxTableSize));
    }
    const int n = m_max + 2;
    const auto& mu = sc.cluster.mu;
    const double lp = std::log(p);
    const std::vector<double> offsets{sc.t, sc.t + sc.s};
    const auto breaks = reflected_kinks(mu, offsets, 0.0, 1.0);

    NBTables tab;
    tab.m_max = m_max;
    tab.p = p;
    tab.lambda_total = sc.center(1.0);
    tab.fingerprint = sc.fingerprint();
    tab.increments_vanish = mu.is_constant_on(std::max(0.0, sc.t - 1.0), sc.t + sc.s);

    for (int j = 0; j < 3; ++j) {
        auto& row = tab.H[static_cast<std::size_t>(j)];
        row.resize(static_cast<std::size_t>(n) + 1);
        for (int l = 0; l <= n; ++l) {
            row[static_cast<std::size_t>(l)] = integrate_against_x(
                [&](double v) {
                    const double now = mu(sc.t - v);
                    const XReal later = falling_factorial_x(mu(sc.t + sc.s - v), j);
                    if (later.is_zero()) return XReal();
                    return later * falling_factorial_x(now, l) * XReal::from_log(1, (now - l) * lp);
                },
                sc.center, 0.0, 1.0, cfg, breaks);
        }
    }

    const detail::LogFactorials lf(n);
    const auto& H = tab.H;
    auto& G = tab.G;
    G.assign(static_cast<std::size_t>(n) + 1, {});
    G[0][0] = {XReal::from_log(1, H[0][0].value.to_double() - tab.lambda_total), H[0][0].lost_digits};
    for (int l = 1; l <= n; ++l) {
        CancellationSum sum;
        for (int k = 0; k < l; ++k) {
            const auto& g = G[static_cast<std::size_t>(k)][0];
            const auto& h = H[0][static_cast<std::size_t>(l - k)];
            sum.add(lf.binomial(l - 1, k) * g.value * h.value, g.lost_digits + h.lost_digits);
        }
        G[static_cast<std::size_t>(l)][0] = sum.result();
    }
    for (int l = 0; l <= n; ++l) {
        CancellationSum first;
        CancellationSum second;
        for (int k = 0; k <= l; ++k) {
            const XReal binom = lf.binomial(l, k);
            const auto lk = static_cast<std::size_t>(l - k);
            const auto& g0 = G[static_cast<std::size_t>(k)][0];
            first.add(binom * g0.value * H[1][lk].value, g0.lost_digits + H[1][lk].lost_digits);
            const Tracked g1 = k < l ? G[static_cast<std::size_t>(k)][1] : first.result();
            second.add(binom * g1.value * H[1][lk].value, g1.lost_digits + H[1][lk].lost_digits);
            second.add(binom * g0.value * H[2][lk].value, g0.lost_digits + H[2][lk].lost_digits);
        }
        G[static_cast<std::size_t>(l)][1] = first.result();
        G[static_cast<std::size_t>(l)][2] = second.result();
    }
    return tab;
}

NBProbability nb_pmf_detailed(const NBTables& tab, int m) {
    check_index(m, tab.m_max);
    const detail::LogFactorials lf(m + 1);
    const Tracked den = pgf_denominator(tab, lf, m);
    NBProbability out;
    out.lost_digits = den.lost_digits;
    if (den.value.is_zero()) {
        out.log_value = -std::numeric_limits<double>::infinity();
        return out;
    }
    const double log_scale = std::log(tab.p) + m * std::log1p(-tab.p) - lf[m];
    const XReal prob = den.value * XReal::from_log(1, log_scale);
    out.value = prob.to_double();
    out.log_value = prob.logmag();
    return out;
}

double nb_pmf(const NBTables& tab, int m) {
    const auto d = nb_pmf_detailed(tab, m);
    return std::clamp(d.value, 0.0, 1.0);
}

PredictionResult predict_nb(const NBTables& tab, int m) {
    check_index(m, tab.m_max);
    const detail::LogFactorials lf(m + 2);
    const Tracked den = pgf_denominator(tab, lf, m);
    if (den.value.sign() <= 0) {
        throw NullEventError("P(M(t) = " + std::to_string(m) + ") is zero or lost to cancellation");
    }
    PredictionResult r;
    const double p = tab.p;
    const double q = 1.0 - p;
    const double lp = std::log(p);
    r.log_pmf = lp + m * std::log1p(-p) - lf[m] + den.value.logmag();
    if (r.log_pmf < kTailLogPmf) r.set(Flag::tail_event);
    if (tab.increments_vanish) return r;

    const auto G = [&](int l, int j) -> const Tracked& {
        return tab.G[static_cast<std::size_t>(l)][static_cast<std::size_t>(j)];
    };
    const auto x = [](double v) { return XReal::from_double(v); };

    CancellationSum first;
    CancellationSum second;
    for (int k = 0; k <= m; ++k) {
        const XReal coef = leibniz_coefficient(lf, m, k);
        if (coef.is_zero()) continue;
        const int j = m - k;
        const double jd = j;
        // -p^{j-1} q {(j) G(j,0) + p G(j+1,0) - G(j,1)}
        const XReal c1 = coef * XReal::from_log(-1, (j - 1) * lp) * x(q);
        first.add(times(c1 * x(jd), G(j, 0)));
        first.add(times(c1 * x(p), G(j + 1, 0)));
        first.add(times(-c1, G(j, 1)));
        // p^{j-2} q [ j(jq-1) G(j,0) + p(2jq-p) G(j+1,0) - (2jq-1-q) G(j,1)
        //            + q (p^2 G(j+2,0) - 2p G(j+1,1) + G(j,2)) ]
        const XReal c2 = coef * XReal::from_log(1, (j - 2) * lp) * x(q);
        second.add(times(c2 * x(jd * (jd * q - 1.0)), G(j, 0)));
        second.add(times(c2 * x(p * (2.0 * jd * q - p)), G(j + 1, 0)));
        second.add(times(c2 * x(-(2.0 * jd * q - 1.0 - q)), G(j, 1)));
        second.add(times(c2 * x(q * p * p), G(j + 2, 0)));
        second.add(times(c2 * x(-2.0 * q * p), G(j + 1, 1)));
        second.add(times(c2 * x(q), G(j, 2)));
    }
    const XReal norm = x(p) * den.value;
    const Tracked s1 = first.result();
    const Tracked s2 = second.result();
    r.lost_digits = std::max({den.lost_digits, s1.lost_digits, s2.lost_digits});

    r.mean = ratio(s1.value, norm);
    const double second_moment = ratio(s2.value, norm);
    // the variance subtraction cancels on top of the moments
    const double spread = second_moment - r.mean * r.mean;
    if (spread > 0.0 && second_moment > spread) r.lost_digits += std::log10(second_moment / spread);
    if (r.lost_digits > kPrecisionAlarmDigits) r.set(Flag::precision_warning);
    if (r.mean < 0.0) {
        if (r.mean < -kNegativeTolerance) r.set(Flag::precision_warning);
        r.mean = 0.0;
        r.set(Flag::mean_clamped);
    }
    r.variance = second_moment - r.mean * r.mean;
    if (r.variance < 0.0) {
        if (r.variance < -kNegativeTolerance * std::max(1.0, second_moment)) r.set(Flag::precision_warning);
        r.variance = 0.0;
        r.set(Flag::variance_clamped);
    }
    return r;
}

}  // namespace nhpc
