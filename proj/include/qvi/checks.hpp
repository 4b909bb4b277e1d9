#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qvi {

struct CheckResult {
    std::string name;
    bool pass = false;
    double worst = 0.0; // largest error metric observed
    std::string detail;
};

// Stein operator has zero expectation under the true posterior: enumerated
// over random sprinkler posteriors and random test functions.
CheckResult check_stein_identity(std::uint64_t seed, int n_models = 20, int n_functions = 50,
                                 double tol = 1e-10);

// Exact-mode inner KSD expectation vanishes when the variational
// distribution is loaded with the true posterior via sqrt(p) amplitudes.
CheckResult check_ksd_truth_zero(std::uint64_t seed, int n_instances = 10, double lo = -1e-12,
                                 double hi = 1e-8);

// Parameter-shift probability derivatives against central finite differences.
CheckResult check_prob_gradients(std::uint64_t seed, int n_configs = 100, double tol = 1e-5);

// Classifier backpropagation against central finite differences.
CheckResult check_classifier_gradients(std::uint64_t seed, int n_configs = 100, double tol = 1e-5);

// Exact-mode variational gradient with the ideal classifier against finite
// differences of the enumerated KL objective.
CheckResult check_kl_gradients(std::uint64_t seed, int n_configs = 100, double tol = 1e-5);

// Exact-mode KSD gradient against finite differences of the enumerated
// discrepancy.
CheckResult check_ksd_gradients(std::uint64_t seed, int n_configs = 100, double tol = 1e-5);

// Norm preservation of random circuits.
CheckResult check_norm_preservation(std::uint64_t seed, int n_circuits = 50, double tol = 1e-10);

// Chi-square goodness of fit between shot frequencies and exact outcome
// probabilities on random four-qubit circuits.
CheckResult check_sampling_chisquare(std::uint64_t seed, int n_circuits = 5, int shots = 100000,
                                     double significance = 0.001);

// Outcome-probability derivatives sum to zero over the outcome space.
CheckResult check_gradient_zero_sum(std::uint64_t seed, int n_configs = 50, double tol = 1e-10);

// Upper critical value of the chi-square distribution (shared with tests).
double chi_square_critical(int dof, double significance);

} // namespace qvi
