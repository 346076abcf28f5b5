#pragma once

// Conditional mean and variance of M(t, t+s] given M(t) = m for Poisson clusters.
//
// With R = sum_j mu(t - V_j) and D = sum_j (mu(t+s-V_j) - mu(t-V_j)) the tables hold
//   c[j][l] = \int Dmu(v)^j mu(t-v)^l e^{-mu(t-v)} Lambda(dv),
//   B[l][j] = E[R^l D^j e^{-R}],
// so that P(M(t)=m) = B[m][0]/m!, E[M(t,t+s] | M(t)=m] = B[m][1]/B[m][0] and the
// conditional second moment is (B[m][2] + B[m][1])/B[m][0]. Every entry is nonnegative.

#include <array>
#include <string>
#include <vector>

#include "nhpc/model.hpp"
#include "nhpc/prediction.hpp"
#include "nhpc/quadrature.hpp"
#include "nhpc/table_cache.hpp"
#include "nhpc/xreal.hpp"

namespace nhpc {

inline constexpr int kMaxTableSize = 10000;

struct PoissonTables {
    int m_max = 0;
    std::array<std::vector<XReal>, 3> c;  // c[j][l], l = 0..m_max+2
    std::vector<std::array<XReal, 3>> B;  // B[l][j], l = 0..m_max+2
    double lambda_total = 0.0;            // Lambda(1)
    std::string fingerprint;
};

PoissonTables build_poisson_tables(const Scenario& sc, int m_max, const QuadratureConfig& cfg);

// P(M(t) = m) and its logarithm.
double poisson_pmf(const PoissonTables& tab, int m);
double poisson_log_pmf(const PoissonTables& tab, int m);

PredictionResult predict_poisson(const PoissonTables& tab, int m);

struct CurvePoint {
    int m = 0;
    PredictionResult result;
};

// One table build at m_hi + 2, then one row per m in [m_lo, m_hi].
std::vector<CurvePoint> predict_poisson_curve(const Scenario& sc, int m_lo, int m_hi,
                                               const QuadratureConfig& cfg);

// Tables as literally defined through the Laplace transform of (R(t), R(t+s)):
//   psi[j][l]  = psi_j^{(l)}(1) = \int (-mu(t+s-v))^j (-mu(t-v))^l e^{-mu(t-v)} Lambda(dv),
//   phi[l][j]  = d^l/dy^l d^j/dz^j phi(y, z) at (1, 0).
// Signed; used as an independent second route to the same predictor.
struct PoissonSignedTables {
    int m_max = 0;
    std::array<std::vector<XReal>, 3> psi;
    std::vector<std::array<XReal, 3>> phi;  // l = 0..m_max+2
    std::string fingerprint;
};

PoissonSignedTables build_poisson_signed_tables(const Scenario& sc, int m_max,
                                               const QuadratureConfig& cfg);
// Mean = (phi^{(m+1,0)} - phi^{(m,1)}) / phi^{(m,0)},
// Var  = (phi^{(m+2,0)} - 2 phi^{(m+1,1)} + phi^{(m,2)}) / phi^{(m,0)} + mean - mean^2.
PredictionResult predict_poisson_signed_form(const PoissonSignedTables& tab, int m);

}  // namespace nhpc
