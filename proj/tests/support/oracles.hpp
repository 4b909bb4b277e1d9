#pragma once

// Independent reference implementations used only by tests: these provide
// second routes to values the library computes, and must not call the
// library paths they are checking.

#include <functional>
#include <span>
#include <vector>

#include "qvi/hmm.hpp"
#include "qvi/ksd.hpp"
#include "qvi/types.hpp"

namespace oracles {

// Central finite difference (f(x+h) - f(x-h)) / 2h.
double central_difference(const std::function<double(double)>& f, double x, double h);

// Log marginal likelihood log p(x) of the two-state chain by the forward
// algorithm.
double forward_log_likelihood(const qvi::HmmModel& model, const qvi::Observation& x);

// Posterior marginals P(z_t = 1 | x) by forward-backward.
std::vector<double> forward_backward_marginals(const qvi::HmmModel& model,
                                               const qvi::Observation& x);

// Most probable latent path by the Viterbi recursion.
qvi::BitVector viterbi_map(const qvi::HmmModel& model, const qvi::Observation& x);

// Exact variance of the order-2 U-statistic with m samples drawn from the
// enumerated distribution q, for the Stein kernel held by `cache`.
double u_statistic_variance(qvi::SteinKernelCache& cache, std::span<const double> q, int m);

// Smallest eigenvalue lower bound via shifted Cholesky: returns true when
// gram + shift*I admits a Cholesky factorization, i.e. min eigenvalue is at
// least -shift.
bool min_eigenvalue_at_least(std::vector<std::vector<double>> gram, double shift);

} // namespace oracles
