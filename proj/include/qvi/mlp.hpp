#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "qvi/types.hpp"

namespace qvi {

// Minimal classifier d_phi: one rectified-linear hidden layer, one sigmoid
// output unit. phi is the concatenation [w1 row-major, b1, w2, b2].
struct Mlp {
    int in_dim = 0;
    int hidden_dim = 0;
    std::vector<double> w1; // hidden_dim x in_dim
    std::vector<double> b1; // hidden_dim
    std::vector<double> w2; // hidden_dim (single output unit)
    double b2 = 0.0;

    int param_count() const { return hidden_dim * in_dim + 2 * hidden_dim + 1; }
};

// He-scaled weights, zero biases.
Mlp init_mlp(int in_dim, int hidden_dim, std::uint64_t seed);

std::vector<double> mlp_params(const Mlp& mlp);
Mlp with_params(const Mlp& shape, std::span<const double> phi);

// Pre-sigmoid activation. Numerically identical to log(d / (1 - d)) without
// the sigmoid round trip.
double mlp_logit(const Mlp& mlp, std::span<const double> input);

// d_phi(input) = sigmoid(logit), strictly inside (0, 1).
double mlp_forward(const Mlp& mlp, std::span<const double> input);

// label 1: sample from the variational family (contributes log d),
// label 0: sample from the prior (contributes log(1 - d)).
struct LabeledBatch {
    std::vector<std::vector<double>> inputs;
    std::vector<int> labels;
};

// Cross-entropy objective: mean of log d over class-1 samples plus mean of
// log(1 - d) over class-0 samples. Empty classes contribute zero.
double classifier_objective(const Mlp& mlp, const LabeledBatch& batch);

// Analytic gradient of classifier_objective with respect to phi.
std::vector<double> classifier_gradient(const Mlp& mlp, const LabeledBatch& batch);

// One gradient-ascent step on the batch objective.
Mlp train_step(const Mlp& mlp, const LabeledBatch& batch, double lr);

// d*(z) = q(z) / (q(z) + p(z)) from exact distributions; its logit is the
// exact log density ratio. Diagnostic use only.
double ideal_classifier_value(std::span<const double> q, std::span<const double> p,
                              const BitVector& z);

} // namespace qvi
