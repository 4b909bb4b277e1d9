#pragma once

#include <span>
#include <string>
#include <vector>

#include "qvi/advkl.hpp"
#include "qvi/born.hpp"
#include "qvi/ksd.hpp"
#include "qvi/metrics.hpp"
#include "qvi/trainlog.hpp"

namespace qvi {

enum class Method { KL, KSD };

struct ExperimentConfig {
    Method method = Method::KL;
    int layers = 2;
    int epochs = 1000;
    double lr_born = 0.003;
    double lr_mlp = 0.03;
    int shots = 100;
    int samples_per_class = 100;
    int minibatch = 10;
    int mlp_hidden = 6;
    std::uint64_t seed = 7;
    bool exact_expectations = false;
    bool update_per_minibatch = true; // KL method: Born step after every minibatch
    int instances = 30;       // sprinkler
    int hmm_steps = 8;        // hmm
    int max_reseeds = 3;      // hmm
    std::string network_path; // lungcancer: overrides the bundled tables
    std::string out_dir;      // empty: keep results in memory only
    bool timing = false;      // wall-time column in CSV logs (breaks byte
                              // reproducibility between runs)
};

// Best product-of-Bernoullis approximation to a posterior by exhaustive grid
// search over each q_k(z_k = 1). Ties go to the lexicographically smallest
// parameter vector. Cost grows as (1/grid_step + 1)^n; capped at n = 5.
struct FactorizedFit {
    std::vector<double> params;
    double tvd = 0.0;
};

FactorizedFit best_factorized(std::span<const double> posterior, double grid_step = 0.01);

struct InstanceResult {
    int instance = 0;
    std::uint64_t net_seed = 0;
    double initial_tvd = 0.0;
    double final_tvd = 0.0;
    double best_loss = 0.0;
    double baseline_tvd = 0.0;
    std::vector<EpochLog> logs;
};

struct SprinklerResult {
    std::vector<InstanceResult> instances;
    double median_final_tvd = 0.0;
    double median_initial_tvd = 0.0;
    double baseline_median_tvd = 0.0;
    BootstrapCI ci68;
};

// Thirty random sprinkler networks conditioned on wet grass; each instance
// trains a fresh three-qubit machine and tracks TVD against the enumerated
// posterior. Instances run concurrently; results are independent of the
// schedule.
SprinklerResult run_sprinkler(const ExperimentConfig& config);

struct HmmObservationReport {
    Observation x;
    BitVector true_mode;
    BitVector learned_mode;
    int mode_distance = 0;
    double final_tvd = 0.0;
    double next_regime_estimate = 0.0; // Monte Carlo posterior-predictive P(z_{T+1}=1)
};

struct HmmResult {
    int attempts = 0;
    bool mode_ok = false; // every observation's mode within Hamming distance 1
    std::vector<HmmObservationReport> reports;
    std::vector<EpochLog> logs;
    BornMachine machine; // best checkpoint of the accepted attempt
};

// Amortized inference on the regime-switching model: samples two time series
// from the joint, trains a single angle-encoded machine on both, and reports
// posterior modes, TVDs and the next-regime prediction. Retrains with a
// fresh seed (up to max_reseeds times) if a learned mode lands more than one
// bit from the truth.
HmmResult run_hmm(const ExperimentConfig& config);

struct LungCancerResult {
    double final_tvd = 0.0;
    int top4_overlap = 0;
    std::vector<double> true_posterior;
    std::vector<double> learned;
    std::vector<EpochLog> logs;
    BornMachine machine;
};

// Lung-cancer network conditioned on a positive illness with negative x-ray
// and no dyspnoea; trains a five-qubit machine and reports the full
// 32-bin histogram of true versus learned posterior.
LungCancerResult run_lungcancer(const ExperimentConfig& config);

// Histogram rows sorted by true-posterior probability descending, ties by
// basis index ascending. top_k = 0 writes every row.
void write_histogram_csv(const std::string& path, std::span<const double> p_true,
                         std::span<const double> q_learned, int top_k = 0);

// Indices of the k most probable outcomes under the same ordering rule.
std::vector<std::size_t> top_indices(std::span<const double> probs, int k);

} // namespace qvi
