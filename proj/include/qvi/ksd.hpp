#pragma once

#include <span>
#include <unordered_map>

#include "qvi/advkl.hpp"
#include "qvi/bayesnet.hpp"
#include "qvi/born.hpp"
#include "qvi/trainlog.hpp"

namespace qvi {

// Positive-definite kernel on bit strings: exp(-H(z, z') / n) with H the
// number of differing bits.
double hamming_kernel(const BitVector& z, const BitVector& zp);

// Stein kernel for the posterior of `model` given `x`: the four-term
// combination of the difference score and the partial differences of the
// Hamming kernel. Symmetric in (z, z'); its expectation under the true
// posterior vanishes.
double stein_kernel(const JointModel& model, const Observation& x, const BitVector& z,
                    const BitVector& zp);

// Memoizes difference scores and Stein-kernel values for one observation.
// Evaluating the kernel costs n joint evaluations per new z, so estimators
// reuse entries heavily: for up to 10 latent bits values land in a dense
// table indexed by basis-state pairs.
class SteinKernelCache {
  public:
    SteinKernelCache(const JointModel& model, Observation x);

    const std::vector<double>& score(const BitVector& z);
    double kappa(const BitVector& z, const BitVector& zp);
    double kappa_by_index(std::size_t a, std::size_t b);

    const Observation& observation() const { return x_; }

  private:
    double compute_kappa(std::size_t a, std::size_t b);

    const JointModel& model_;
    Observation x_;
    int n_;
    std::size_t dim_;
    std::unordered_map<std::size_t, std::vector<double>> scores_;
    // Dense storage when the table fits, overflow map otherwise.
    std::vector<double> dense_;
    std::vector<std::uint8_t> dense_known_;
    std::unordered_map<std::size_t, double> sparse_;
};

struct KsdOptions {
    bool exact = false;
    int shots = 100;
    std::uint64_t seed = 0;
    // Gradient guard: when sqrt(E[kappa]) falls below this, the gradient is
    // reported as zero (the true gradient vanishes at the optimum).
    double eps_den = 1e-8;
};

// Inner expectation E_{z ~ q1, z' ~ q2}[kappa] by full enumeration.
double ksd_inner_exact(SteinKernelCache& cache, std::span<const double> q1,
                       std::span<const double> q2);

// Unbiased U-statistic over distinct index pairs of one sample set.
double ksd_inner_ustat(SteinKernelCache& cache, std::span<const BitVector> samples);

// Two-sample estimate of E_{z ~ qa, z' ~ qb}[kappa] from independent sets.
double ksd_inner_cross(SteinKernelCache& cache, std::span<const BitVector> za,
                       std::span<const BitVector> zb);

// Kernelized Stein discrepancy of the machine from the posterior given x:
// sqrt of the inner expectation, clamped at zero before the root.
double ksd_estimate(const BornMachine& machine, const JointModel& model, const Observation& x,
                    const KsdOptions& opts);

// Parameter-shift gradient of the discrepancy: the four mixed-distribution
// terms averaged over the dataset, each term estimated with independent
// sample sets. Observations whose denominator falls under eps_den contribute
// zero and are counted in guard_hits when given.
double ksd_gradient(const BornMachine& machine, const JointModel& model,
                    std::span<const Observation> dataset, int j, const KsdOptions& opts,
                    int* guard_hits = nullptr);

struct KsdConfig {
    int epochs = 1000;
    double lr_born = 0.003;
    int shots = 100;
    std::uint64_t seed = 0;
    bool use_exact_expectations = false;
    bool track_tvd = true;
    double eps_den = 1e-8;
};

// Vanilla gradient descent on the kernelized Stein discrepancy. EpochLog
// carries the discrepancy estimate instead of the classifier columns.
TrainResult train_ksd(BornMachine machine, const JointModel& model,
                      std::span<const Observation> dataset, const KsdConfig& config);

} // namespace qvi
