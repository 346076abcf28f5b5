#pragma once

// Conditional mean and variance of M(t, t+s] given M(t) = m for negative binomial
// clusters NB(mu, p), through derivatives of the bivariate pgf
//   G(z1, z2) = E[z1^{R(t)} z2^{R(t+s)}] = exp{ \int (z1^{mu(t-v)} z2^{mu(t+s-v)} - 1) Lambda(dv) }
// at (p, 1). The tables are signed (falling factorials of non-integer arguments change
// sign), so every entry carries a cancellation estimate in decimal digits.

#include <array>
#include <string>
#include <vector>

#include "nhpc/model.hpp"
#include "nhpc/prediction.hpp"
#include "nhpc/quadrature.hpp"
#include "nhpc/xreal.hpp"

namespace nhpc {

struct NBTables {
    int m_max = 0;
    double p = 0.5;
    double lambda_total = 0.0;
    // H[j][l] = \int ff(mu(t+s-v), j) ff(mu(t-v), l) p^{mu(t-v) - l} Lambda(dv), l = 0..m_max+2
    std::array<std::vector<Tracked>, 3> H;
    // G[l][j] = d^l/dz1^l d^j/dz2^j G at (p, 1)
    std::vector<std::array<Tracked, 3>> G;
    // mu is constant on [t-1, t+s]: no future payments are possible.
    bool increments_vanish = false;
    std::string fingerprint;

    // Worst lost_digits over all entries with first index <= l_max.
    double worst_lost_digits(int l_max) const;
};

NBTables build_nb_tables(const Scenario& sc, int m_max, const QuadratureConfig& cfg);

// P(M(t) = m) = p q^m / m! * (p^{m-1} G_R(p))^{(m)} with its cancellation estimate.
struct NBProbability {
    double value = 0.0;  // may be slightly negative when cancellation dominates
    double log_value = 0.0;
    double lost_digits = 0.0;
};
NBProbability nb_pmf_detailed(const NBTables& tab, int m);
// Same, clamped to [0, 1].
double nb_pmf(const NBTables& tab, int m);

PredictionResult predict_nb(const NBTables& tab, int m);

}  // namespace nhpc
