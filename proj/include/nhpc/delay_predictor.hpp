#pragma once

// Prediction of M(t, t+s] from the number of reported claims N^(t) when claim i starts
// paying at T_i + D_i. Reported clusters (T + D <= t) contribute their increment over
// the window; unreported ones (t < T + D <= t+s) contribute their first payments.

#include "nhpc/model.hpp"
#include "nhpc/prediction.hpp"
#include "nhpc/quadrature.hpp"

namespace nhpc {

struct DelayComponents {
    double lambda_hat = 0.0;  // expected number of unreported claims at t
    double n_hat_mean = 0.0;  // E[N^(t)] = Lambda(1) - lambda_hat
    double J1 = 0.0;          // E[L(t-u, t+s-u]] for a reported start time u
    double J2 = 0.0;          // second raw moment of the same
    double H1 = 0.0;          // mean of payments from claims reported in (t, t+s]
    double H2 = 0.0;          // their \int E[L^2] term
};

// Throws NullEventError when no claim can have been reported by t.
DelayComponents delay_components(const Scenario& sc, const QuadratureConfig& cfg);

// mean = l J1 + H1, variance = l (J2 - J1^2) + H2.
PredictionResult predict_delay(const DelayComponents& comp, long ell);

// E[(M(t, t+s] - E[M(t, t+s] | N^(t)])^2]
double unconditional_mse(const DelayComponents& comp);

}  // namespace nhpc
