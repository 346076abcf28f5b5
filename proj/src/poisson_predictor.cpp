#include "nhpc/poisson_predictor.hpp"

#include <cmath>
#include <string>

#include "nhpc/detail/log_factorials.hpp"
#include "nhpc/errors.hpp"

namespace nhpc {

namespace {

void check_build_args(const Scenario& sc, int m_max) {
    if (!sc.cluster.is_poisson()) throw ArgumentError("Poisson tables need a Poisson cluster family");
    if (m_max < 0) throw ArgumentError("m_max must be >= 0");
    if (m_max > kMaxTableSize) {
        throw ArgumentError("m_max " + std::to_string(m_max) + " exceeds the table size guard " +
                            std::to_string(kMaxTableSize));
    }
}

// XReal of x^j y^l e^{-y} for x, y >= 0, with 0^0 = 1.
XReal power_product(double x, int j, double y, int l) {
    if ((j > 0 && x == 0.0) || (l > 0 && y == 0.0)) return XReal();
    double lg = -y;
    if (j > 0) lg += j * std::log(x);
    if (l > 0) lg += l * std::log(y);
    return XReal::from_log(1, lg);
}

std::vector<double> window_breaks(const Scenario& sc) {
    const std::vector<double> offsets{sc.t, sc.t + sc.s};
    return reflected_kinks(sc.cluster.mu, offsets, 0.0, 1.0);
}

void finish_moments(PredictionResult& r, double second) {
    if (r.mean < 0.0) {
        if (r.mean < -kNegativeTolerance) r.set(Flag::precision_warning);
        r.mean = 0.0;
        r.set(Flag::mean_clamped);
    }
    r.variance = second - r.mean * r.mean;
    if (r.variance < 0.0) {
        if (r.variance < -kNegativeTolerance * std::max(1.0, second)) r.set(Flag::precision_warning);
        r.variance = 0.0;
        r.set(Flag::variance_clamped);
    }
}

void check_index(int m, int m_max) {
    if (m < 0 || m > m_max) {
        throw ArgumentError("conditioning value m=" + std::to_string(m) + " outside table range [0, " +
                            std::to_string(m_max) + "]");
    }
}

}  // namespace

PoissonTables build_poisson_tables(const Scenario& sc, int m_max, const QuadratureConfig& cfg) {
    check_build_args(sc, m_max);
    const int n = m_max + 2;
    const auto& mu = sc.cluster.mu;
    const auto breaks = window_breaks(sc);

    PoissonTables tab;
    tab.m_max = m_max;
    tab.lambda_total = sc.center(1.0);
    tab.fingerprint = sc.fingerprint();
    for (int j = 0; j < 3; ++j) {
        auto& row = tab.c[static_cast<std::size_t>(j)];
        row.resize(static_cast<std::size_t>(n) + 1);
        for (int l = 0; l <= n; ++l) {
            row[static_cast<std::size_t>(l)] =
                integrate_against_x(
                    [&](double v) {
                        const double now = mu(sc.t - v);
                        const double ahead = mu(sc.t + sc.s - v) - now;
                        return power_product(ahead > 0.0 ? ahead : 0.0, j, now, l);
                    },
                    sc.center, 0.0, 1.0, cfg, breaks)
                    .value;
        }
    }

    const detail::LogFactorials lf(n);
    const auto& c0 = tab.c[0];
    const auto& c1 = tab.c[1];
    const auto& c2 = tab.c[2];
    tab.B.assign(static_cast<std::size_t>(n) + 1, {});
    auto& B = tab.B;
    B[0][0] = XReal::from_log(1, c0[0].to_double() - tab.lambda_total);
    for (int l = 1; l <= n; ++l) {
        XReal acc;
        for (int k = 0; k < l; ++k) {
            acc += lf.binomial(l - 1, k) * B[static_cast<std::size_t>(k)][0] *
                   c0[static_cast<std::size_t>(l - k)];
        }
        B[static_cast<std::size_t>(l)][0] = acc;
    }
    for (int l = 0; l <= n; ++l) {
        XReal first;
        XReal second;
        for (int k = 0; k <= l; ++k) {
            const XReal binom = lf.binomial(l, k);
            const auto lk = static_cast<std::size_t>(l - k);
            const auto& Bk = B[static_cast<std::size_t>(k)];
            first += binom * Bk[0] * c1[lk];
            // B[k][1] is final for every k <= l at this point.
            second += binom * ((k < l ? Bk[1] : first) * c1[lk] + Bk[0] * c2[lk]);
        }
        B[static_cast<std::size_t>(l)][1] = first;
        B[static_cast<std::size_t>(l)][2] = second;
    }
    return tab;
}

double poisson_log_pmf(const PoissonTables& tab, int m) {
    check_index(m, tab.m_max);
    const XReal& b = tab.B[static_cast<std::size_t>(m)][0];
    if (b.is_zero()) return -std::numeric_limits<double>::infinity();
    return b.logmag() - std::lgamma(static_cast<double>(m) + 1.0);
}

double poisson_pmf(const PoissonTables& tab, int m) { return std::exp(poisson_log_pmf(tab, m)); }

PredictionResult predict_poisson(const PoissonTables& tab, int m) {
    check_index(m, tab.m_max);
    const auto& b = tab.B[static_cast<std::size_t>(m)];
    if (b[0].is_zero()) {
        throw NullEventError("P(M(t) = " + std::to_string(m) + ") = 0; cannot condition on it");
    }
    PredictionResult r;
    r.log_pmf = poisson_log_pmf(tab, m);
    if (r.log_pmf < kTailLogPmf) r.set(Flag::tail_event);
    r.mean = ratio(b[1], b[0]);
    finish_moments(r, ratio(b[2] + b[1], b[0]));
    return r;
}

std::vector<CurvePoint> predict_poisson_curve(const Scenario& sc, int m_lo, int m_hi,
                                              const QuadratureConfig& cfg) {
    if (m_lo < 0 || m_lo > m_hi) throw ArgumentError("predict_poisson_curve: need 0 <= m_lo <= m_hi");
    const auto tab = build_poisson_tables(sc, m_hi + 2, cfg);
    std::vector<CurvePoint> out;
    out.reserve(static_cast<std::size_t>(m_hi - m_lo) + 1);
    for (int m = m_lo; m <= m_hi; ++m) out.push_back({m, predict_poisson(tab, m)});
    return out;
}

PoissonSignedTables build_poisson_signed_tables(const Scenario& sc, int m_max,
                                               const QuadratureConfig& cfg) {
    check_build_args(sc, m_max);
    const int n = m_max + 2;
    const auto& mu = sc.cluster.mu;
    const auto breaks = window_breaks(sc);

    PoissonSignedTables tab;
    tab.m_max = m_max;
    tab.fingerprint = sc.fingerprint();
    for (int j = 0; j < 3; ++j) {
        auto& row = tab.psi[static_cast<std::size_t>(j)];
        row.resize(static_cast<std::size_t>(n) + 1);
        for (int l = 0; l <= n; ++l) {
            const XReal magnitude =
                integrate_against_x(
                    [&](double v) { return power_product(mu(sc.t + sc.s - v), j, mu(sc.t - v), l); },
                    sc.center, 0.0, 1.0, cfg, breaks)
                    .value;
            row[static_cast<std::size_t>(l)] = ((j + l) % 2 == 0) ? magnitude : -magnitude;
        }
    }

    const detail::LogFactorials lf(n);
    const auto& psi = tab.psi;
    auto& phi = tab.phi;
    phi.assign(static_cast<std::size_t>(n) + 1, {});
    phi[0][0] = XReal::from_log(1, psi[0][0].to_double() - sc.center(1.0));
    for (int l = 1; l <= n; ++l) {
        XReal acc;
        for (int k = 0; k < l; ++k) {
            acc += lf.binomial(l - 1, k) * phi[static_cast<std::size_t>(k)][0] *
                   psi[0][static_cast<std::size_t>(l - k)];
        }
        phi[static_cast<std::size_t>(l)][0] = acc;
    }
    for (int l = 0; l <= n; ++l) {
        XReal acc;
        for (int k = 0; k <= l; ++k) {
            acc += lf.binomial(l, k) * phi[static_cast<std::size_t>(k)][0] *
                   psi[1][static_cast<std::size_t>(l - k)];
        }
        phi[static_cast<std::size_t>(l)][1] = acc;
    }
    for (int l = 0; l <= n; ++l) {
        XReal acc;
        for (int k = 0; k <= l; ++k) {
            const auto lk = static_cast<std::size_t>(l - k);
            const auto& pk = phi[static_cast<std::size_t>(k)];
            acc += lf.binomial(l, k) * (pk[1] * psi[1][lk] + pk[0] * psi[2][lk]);
        }
        phi[static_cast<std::size_t>(l)][2] = acc;
    }
    return tab;
}

PredictionResult predict_poisson_signed_form(const PoissonSignedTables& tab, int m) {
    check_index(m, tab.m_max);
    const auto& phi = tab.phi;
    const auto i = static_cast<std::size_t>(m);
    const XReal& den = phi[i][0];
    if (den.is_zero()) {
        throw NullEventError("P(M(t) = " + std::to_string(m) + ") = 0; cannot condition on it");
    }
    PredictionResult r;
    r.log_pmf = den.logmag() - std::lgamma(static_cast<double>(m) + 1.0);
    if (r.log_pmf < kTailLogPmf) r.set(Flag::tail_event);
    r.mean = ratio(phi[i + 1][0] - phi[i][1], den);
    const XReal two = XReal::from_double(2.0);
    const double curvature = ratio(phi[i + 2][0] - two * phi[i + 1][1] + phi[i][2], den);
    finish_moments(r, curvature + r.mean);
    return r;
}

}  // namespace nhpc
