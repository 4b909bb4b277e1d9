#pragma once

#include <functional>
#include <span>

#include "qvi/bayesnet.hpp"
#include "qvi/born.hpp"
#include "qvi/mlp.hpp"
#include "qvi/trainlog.hpp"

namespace qvi {

// Log density-ratio estimate for a latent sample given an observation.
using LogitFn = std::function<double(const BitVector& z, const Observation& x)>;

// Classifier-backed ratio: the MLP sees the latent bits, and additionally
// the observed values when the data distribution is not a point mass.
LogitFn mlp_logit_fn(const Mlp& mlp, bool include_observation);

// The optimal classifier's logit log(q(z|x)/p(z)) from exact distributions,
// frozen at the given machine. Diagnostic / oracle use.
LogitFn ideal_logit_fn(const BornMachine& machine, const JointModel& model);

// How expectations over the variational distribution are estimated: full
// enumeration of the outcome distribution, or Monte Carlo with `shots`
// samples per expectation.
struct ExpectationOptions {
    bool exact = false;
    int shots = 100;
    std::uint64_t seed = 0;
};

// Monte Carlo (or exact) estimate of the variational objective
//   E_{x ~ data} E_{z ~ q(z|x)} [ logit(z, x) - log p(x|z) ].
double born_loss(const BornMachine& machine, const JointModel& model, const LogitFn& logit,
                 std::span<const Observation> dataset, const ExpectationOptions& opts);

// Parameter-shift derivative of born_loss with the ratio estimate held
// fixed: half the difference of the integrand expectation under the two
// shifted machines, averaged over the dataset. The two shifted estimates
// never share samples.
double born_gradient(const BornMachine& machine, const JointModel& model, const LogitFn& logit,
                     std::span<const Observation> dataset, int j,
                     const ExpectationOptions& opts);

struct AdvConfig {
    int epochs = 1000;
    double lr_born = 0.003;
    double lr_mlp = 0.03;
    int shots_born = 100;        // samples per expectation for the Born machine
    int samples_per_class = 100; // classifier dataset size per class, per epoch
    int minibatch = 10;
    int mlp_hidden = 6;
    std::uint64_t seed = 0;
    bool use_exact_expectations = false;
    // One Born machine step after every classifier minibatch (the usual
    // adversarial cadence, and the one that reproduces the benchmark
    // figures). When false, a single Born step follows the full classifier
    // pass each epoch.
    bool update_per_minibatch = true;
    bool track_tvd = true;              // needs an enumerable latent space
    bool track_ideal_classifier = true; // idem
};

struct TrainResult {
    BornMachine final_machine;
    BornMachine best_machine; // lowest estimated loss seen during training
    double best_loss = 0.0;
    int best_epoch = -1;
    std::vector<EpochLog> logs;
};

// Alternating optimization: each epoch trains the classifier on fresh
// samples (one pass over the two-class dataset in minibatches, gradient
// ascent), then takes one vanilla gradient-descent step on every Born
// machine parameter.
TrainResult train_adversarial(BornMachine machine, const JointModel& model,
                              std::span<const Observation> dataset, const AdvConfig& config);

} // namespace qvi
