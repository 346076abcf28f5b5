#include "nhpc/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <thread>

#include "nhpc/detail/special.hpp"
#include "nhpc/errors.hpp"

namespace nhpc {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

constexpr long kBlock = 4096;

// Runs body(lo, hi) over fixed blocks of [0, n). Blocks are claimed in order by each
// worker; the body must only write to its own slots.
template <class Body>
void parallel_blocks(long n, int threads, const Body& body) {
    const long blocks = (n + kBlock - 1) / kBlock;
    const int workers = static_cast<int>(std::clamp<long>(threads, 1, std::max<long>(blocks, 1)));
    if (workers == 1) {
        for (long b = 0; b < blocks; ++b) body(b * kBlock, std::min(n, (b + 1) * kBlock));
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
            try {
                for (long b = w; b < blocks; b += workers) body(b * kBlock, std::min(n, (b + 1) * kBlock));
            } catch (...) {
                errors[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& th : pool) th.join();
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

long draw_poisson(double mean, Rng& rng) {
    if (!(mean > 0.0)) return 0;
    std::poisson_distribution<long> dist(mean);
    return dist(rng);
}

// Start times u = V + D of the clusters of one replicate, and how many arrivals there were.
std::vector<double> sample_starts(const Scenario& sc, Rng& rng) {
    auto starts = sample_center(sc.center, rng);
    if (!sc.delay.is_none()) {
        for (double& u : starts) u += sc.delay.quantile(rng.uniform());
    }
    return starts;
}

void check_reps(long n_reps) {
    if (n_reps < 1) throw ArgumentError("replicate count must be >= 1");
}

}  // namespace

Rng::Rng(std::uint64_t seed) {
    std::uint64_t x = seed;
    for (auto& s : s_) s = splitmix64(x);
}

Rng Rng::stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = index;
    const std::uint64_t mixed = splitmix64(x);
    return Rng(seed ^ mixed);
}

Rng::result_type Rng::operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Rng::uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

std::vector<double> sample_center(const MeanValueFunction& lambda, Rng& rng) {
    const double total = lambda(1.0);
    const long n = draw_poisson(total, rng);
    std::vector<double> out(static_cast<std::size_t>(n));
    for (auto& v : out) v = std::clamp(lambda.inverse(rng.uniform() * total), 0.0, 1.0);
    return out;
}

long sample_cluster_increment(const ClusterModel& c, double a, double b, Rng& rng) {
    const double delta = c.mu.increment(a, b);
    if (!(delta > 0.0)) return 0;
    if (c.is_poisson()) return draw_poisson(delta, rng);
    std::gamma_distribution<double> gamma(delta, c.q() / c.p);
    return draw_poisson(gamma(rng), rng);
}

SimOutput simulate(const Scenario& sc, long n_reps, std::uint64_t seed, int threads) {
    check_reps(n_reps);
    SimOutput out;
    out.seed = seed;
    out.n_reps = n_reps;
    out.has_delay = !sc.delay.is_none();
    out.reps.resize(static_cast<std::size_t>(n_reps));
    parallel_blocks(n_reps, threads, [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
            const auto starts = sample_starts(sc, rng);
            Replicate rep;
            rep.n1 = static_cast<long>(starts.size());
            if (out.has_delay) rep.n_hat = 0;
            for (double u : starts) {
                const double now = sc.t - u;
                if (out.has_delay && u <= sc.t) ++rep.n_hat;
                rep.m_t += sample_cluster_increment(sc.cluster, 0.0, std::max(now, 0.0), rng);
                rep.m_incr += sample_cluster_increment(sc.cluster, std::max(now, 0.0),
                                                       std::max(now + sc.s, 0.0), rng);
            }
            out.reps[static_cast<std::size_t>(i)] = rep;
        }
    });
    return out;
}

ConditionalEstimate binned_conditional_oracle(const SimOutput& out, Conditioning cond, long value) {
    if (cond == Conditioning::n_hat && !out.has_delay) {
        throw ArgumentError("conditioning on the reported count needs a simulation with delays");
    }
    long n = 0;
    double sum = 0.0;
    for (const auto& r : out.reps) {
        const long key = cond == Conditioning::m_t ? r.m_t : r.n_hat;
        if (key != value) continue;
        ++n;
        sum += static_cast<double>(r.m_incr);
    }
    if (n < kMinBinCount) {
        throw InsufficientDataError("only " + std::to_string(n) + " replicates match the condition (" +
                                    std::to_string(kMinBinCount) + " needed)");
    }
    const double mean = sum / static_cast<double>(n);
    double m2 = 0.0;
    double m4 = 0.0;
    for (const auto& r : out.reps) {
        const long key = cond == Conditioning::m_t ? r.m_t : r.n_hat;
        if (key != value) continue;
        const double d = static_cast<double>(r.m_incr) - mean;
        m2 += d * d;
        m4 += d * d * d * d;
    }
    const double nd = static_cast<double>(n);
    const double var = m2 / (nd - 1.0);
    const double kurt_term = std::max(0.0, m4 / nd - (m2 / nd) * (m2 / nd));
    ConditionalEstimate est;
    est.mean = {mean, std::sqrt(var / nd), nd};
    est.var = {var, std::sqrt(kurt_term / nd), nd};
    return est;
}

SemiAnalyticSampler::SemiAnalyticSampler(const Scenario& sc, long n_reps, std::uint64_t seed, int threads)
    : cluster_(sc.cluster) {
    if (n_reps < kMinSemiAnalyticReps) {
        throw ArgumentError("the ratio estimator needs at least " + std::to_string(kMinSemiAnalyticReps) +
                            " replicates");
    }
    R_.resize(static_cast<std::size_t>(n_reps));
    D_.resize(static_cast<std::size_t>(n_reps));
    const auto& mu = sc.cluster.mu;
    parallel_blocks(n_reps, threads, [&](long lo, long hi) {
        for (long i = lo; i < hi; ++i) {
            Rng rng = Rng::stream(seed, static_cast<std::uint64_t>(i));
            double r = 0.0;
            double d = 0.0;
            for (double u : sample_starts(sc, rng)) {
                r += mu(sc.t - u);
                d += mu.increment(std::max(sc.t - u, 0.0), std::max(sc.t + sc.s - u, 0.0));
            }
            R_[static_cast<std::size_t>(i)] = r;
            D_[static_cast<std::size_t>(i)] = d;
        }
    });
}

std::vector<double> SemiAnalyticSampler::log_weights(long m) const {
    if (m < 0) throw ArgumentError("m must be >= 0");
    const double md = static_cast<double>(m);
    const double lfact = std::lgamma(md + 1.0);
    const double ninf = -std::numeric_limits<double>::infinity();
    std::vector<double> lw(R_.size());
    const bool poisson = cluster_.is_poisson();
    const double lp = std::log(cluster_.p);
    const double lq = std::log1p(-cluster_.p);
    for (std::size_t i = 0; i < R_.size(); ++i) {
        const double r = R_[i];
        if (!(r > 0.0)) {
            lw[i] = m == 0 ? 0.0 : ninf;
        } else if (poisson) {
            lw[i] = -r + md * std::log(r) - lfact;
        } else {
            lw[i] = detail::log_abs_gamma(r + md) - detail::log_abs_gamma(r) - lfact + r * lp + md * lq;
        }
    }
    return lw;
}

OracleEstimate SemiAnalyticSampler::pmf(long m) const {
    const auto lw = log_weights(m);
    const double n = static_cast<double>(lw.size());
    double sum = 0.0;
    double sum2 = 0.0;
    for (double l : lw) {
        const double w = std::exp(l);
        sum += w;
        sum2 += w * w;
    }
    const double mean = sum / n;
    const double var = std::max(0.0, sum2 / n - mean * mean);
    return {mean, std::sqrt(var / n), sum2 > 0.0 ? sum * sum / sum2 : 0.0};
}

ConditionalEstimate SemiAnalyticSampler::estimate(long m) const {
    const auto lw = log_weights(m);
    const double top = *std::max_element(lw.begin(), lw.end());
    if (!std::isfinite(top)) {
        throw TailUnreliableError("no replicate gives positive weight to M(t) = " + std::to_string(m));
    }
    double sw = 0.0;
    double sw2 = 0.0;
    double sy = 0.0;
    double sy2 = 0.0;
    std::vector<double> w(lw.size());
    for (std::size_t i = 0; i < lw.size(); ++i) {
        w[i] = std::exp(lw[i] - top);
        const auto mom = cluster_moments_from_delta(cluster_, D_[i]);
        sw += w[i];
        sw2 += w[i] * w[i];
        sy += w[i] * mom.m1;
        sy2 += w[i] * mom.m2;
    }
    const double ess = sw * sw / sw2;
    if (ess < kMinEffectiveSampleSize) {
        throw TailUnreliableError("effective sample size " + std::to_string(ess) + " at M(t) = " +
                                  std::to_string(m) + " is below " +
                                  std::to_string(kMinEffectiveSampleSize));
    }
    const double mean = sy / sw;
    const double second = sy2 / sw;
    double if_mean = 0.0;
    double if_var = 0.0;
    for (std::size_t i = 0; i < lw.size(); ++i) {
        const auto mom = cluster_moments_from_delta(cluster_, D_[i]);
        const double a = w[i] * (mom.m1 - mean);
        const double b = w[i] * ((mom.m2 - second) - 2.0 * mean * (mom.m1 - mean));
        if_mean += a * a;
        if_var += b * b;
    }
    ConditionalEstimate est;
    est.mean = {mean, std::sqrt(if_mean) / sw, ess};
    est.var = {std::max(0.0, second - mean * mean), std::sqrt(if_var) / sw, ess};
    return est;
}

ConditionalEstimate semi_analytic_oracle(const Scenario& sc, long m, long n_reps, std::uint64_t seed,
                                         int threads) {
    return SemiAnalyticSampler(sc, n_reps, seed, threads).estimate(m);
}

}  // namespace nhpc
