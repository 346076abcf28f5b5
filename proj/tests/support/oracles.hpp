#pragma once

// Reference computations used by the tests. None of these share code paths with the
// recursions they check beyond the quadrature and XReal primitives.

#include <cstdint>
#include <vector>

#include "nhpc/model.hpp"
#include "nhpc/quadrature.hpp"

namespace nhpc::oracle {

// NB clusters through the rising-factorial expansion of the NB pmf:
// P(M(t) = m | R) = R^(m) p^R q^m / m!, R^(m) = sum_k c(m, k) R^k with unsigned Stirling
// numbers of the first kind, so every quantity is a sum of nonnegative terms.
struct NBReference {
    std::vector<double> pmf;       // m = 0..m_max
    std::vector<double> mean;      // E[M(t, t+s] | M(t) = m]
    std::vector<double> variance;
};
NBReference nb_stirling(const Scenario& sc, int m_max, const QuadratureConfig& cfg);

// \int (mu(t+s-v) - mu(t-v)) Lambda(dv), times q/p for NB clusters.
double expected_future(const Scenario& sc, const QuadratureConfig& cfg);

// Scenarios shared by the property tests.
Scenario poisson_scenario(MeanValueFunction center, MeanValueFunction mu, double t = 1.0, double s = 1.0);
Scenario nb_scenario(MeanValueFunction center, MeanValueFunction mu, double p, double t = 1.0, double s = 1.0);
// Lambda = 30x, mu = 5x, t = s = 1.
Scenario reference_poisson();

std::vector<Scenario> poisson_smoke();
// One or more per p in {0.3, 0.5, 0.8}; each keeps the whole support inside the
// unflagged range of the signed recursion.
std::vector<Scenario> nb_smoke();

// Two-sided z-score; infinite when the standard error is zero and values differ.
double z_score(double a, double b, double stderr_ab);

}  // namespace nhpc::oracle
