#pragma once

// Simulation of the cluster model and two oracles for the conditional predictors:
// binning replicates on the conditioning event, and a ratio estimator that simulates
// only the arrival times and weights each replicate by the known conditional pmf.
//
// Every replicate draws from its own stream keyed by (seed, replicate index), and all
// reductions run in index order, so results never depend on the thread count.

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "nhpc/model.hpp"

namespace nhpc {

// xoshiro256** seeded through splitmix64.
class Rng {
public:
    using result_type = std::uint64_t;

    explicit Rng(std::uint64_t seed);
    // Independent substream for replicate `index` of a run seeded with `seed`.
    static Rng stream(std::uint64_t seed, std::uint64_t index);

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
    result_type operator()();
    // Uniform on [0, 1) with 53 random bits.
    double uniform();

private:
    std::uint64_t s_[4];
};

// Arrival times of the center process on [0, 1] (unordered).
std::vector<double> sample_center(const MeanValueFunction& lambda, Rng& rng);

// L(b) - L(a) for one cluster.
long sample_cluster_increment(const ClusterModel& c, double a, double b, Rng& rng);

struct Replicate {
    long m_t = 0;     // M(t)
    long m_incr = 0;  // M(t, t+s]
    long n1 = 0;      // N(1)
    long n_hat = -1;  // reported count at t; -1 without a delay model
};

struct SimOutput {
    std::vector<Replicate> reps;
    std::uint64_t seed = 0;
    long n_reps = 0;
    bool has_delay = false;
};

SimOutput simulate(const Scenario& sc, long n_reps, std::uint64_t seed, int threads = 1);

struct OracleEstimate {
    double value = 0.0;
    double std_error = 0.0;
    double ess = 0.0;
};

struct ConditionalEstimate {
    OracleEstimate mean;
    OracleEstimate var;
};

enum class Conditioning { m_t, n_hat };

inline constexpr long kMinBinCount = 200;
inline constexpr double kMinEffectiveSampleSize = 100.0;

// Sample mean and variance of M(t, t+s] over replicates with M(t) = value (or N^(t) = value).
// Throws InsufficientDataError below kMinBinCount matches.
ConditionalEstimate binned_conditional_oracle(const SimOutput& out, Conditioning cond, long value);

// Draws (R, D) = (sum mu(t - u_j), sum Dmu_j) per replicate once; estimates for any m reuse them.
class SemiAnalyticSampler {
public:
    SemiAnalyticSampler(const Scenario& sc, long n_reps, std::uint64_t seed, int threads = 1);

    // Ratio estimate of E[M(t, t+s] | M(t) = m] and the conditional variance, with
    // delta-method standard errors. Throws TailUnreliableError when the effective sample
    // size drops below kMinEffectiveSampleSize.
    ConditionalEstimate estimate(long m) const;
    // Estimate of P(M(t) = m) as the mean weight.
    OracleEstimate pmf(long m) const;

    long n_reps() const noexcept { return static_cast<long>(R_.size()); }

private:
    std::vector<double> log_weights(long m) const;

    ClusterModel cluster_;
    std::vector<double> R_;
    std::vector<double> D_;
};

inline constexpr long kMinSemiAnalyticReps = 10000;

ConditionalEstimate semi_analytic_oracle(const Scenario& sc, long m, long n_reps, std::uint64_t seed,
                                         int threads = 1);

}  // namespace nhpc
