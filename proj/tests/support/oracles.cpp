#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace oracles {

namespace {

double log_sum_exp(double a, double b) {
    double m = std::max(a, b);
    if (!std::isfinite(m)) return m;
    return m + std::log(std::exp(a - m) + std::exp(b - m));
}

// log P(z_t = s | z_{t-1} = prev) etc. for the two-state chain.
double log_trans(const qvi::HmmModel& model, int prev, int s) {
    double rate = model.rate_given(prev);
    return std::log(s ? rate : 1.0 - rate);
}

double log_init(const qvi::HmmModel& model, int s) {
    return std::log(s ? model.init_rate() : 1.0 - model.init_rate());
}

double log_emit(const qvi::HmmModel& model, double x, int s) {
    return qvi::gaussian_log_density(x, model.emission(s));
}

} // namespace

double central_difference(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

double forward_log_likelihood(const qvi::HmmModel& model, const qvi::Observation& x) {
    const int T = model.steps();
    if (static_cast<int>(x.values.size()) != T) throw std::invalid_argument("length mismatch");
    double alpha[2];
    for (int s = 0; s < 2; ++s) alpha[s] = log_init(model, s) + log_emit(model, x.values[0], s);
    for (int t = 1; t < T; ++t) {
        double next[2];
        for (int s = 0; s < 2; ++s) {
            next[s] = log_sum_exp(alpha[0] + log_trans(model, 0, s),
                                  alpha[1] + log_trans(model, 1, s)) +
                      log_emit(model, x.values[static_cast<std::size_t>(t)], s);
        }
        alpha[0] = next[0];
        alpha[1] = next[1];
    }
    return log_sum_exp(alpha[0], alpha[1]);
}

std::vector<double> forward_backward_marginals(const qvi::HmmModel& model,
                                               const qvi::Observation& x) {
    const int T = model.steps();
    if (static_cast<int>(x.values.size()) != T) throw std::invalid_argument("length mismatch");
    std::vector<double> alpha(static_cast<std::size_t>(T) * 2);
    std::vector<double> beta(static_cast<std::size_t>(T) * 2);
    for (int s = 0; s < 2; ++s) alpha[s] = log_init(model, s) + log_emit(model, x.values[0], s);
    for (int t = 1; t < T; ++t) {
        for (int s = 0; s < 2; ++s) {
            alpha[2 * t + s] = log_sum_exp(alpha[2 * (t - 1)] + log_trans(model, 0, s),
                                           alpha[2 * (t - 1) + 1] + log_trans(model, 1, s)) +
                               log_emit(model, x.values[static_cast<std::size_t>(t)], s);
        }
    }
    for (int s = 0; s < 2; ++s) beta[2 * (T - 1) + s] = 0.0;
    for (int t = T - 2; t >= 0; --t) {
        for (int s = 0; s < 2; ++s) {
            double b0 = log_trans(model, s, 0) +
                        log_emit(model, x.values[static_cast<std::size_t>(t + 1)], 0) +
                        beta[2 * (t + 1)];
            double b1 = log_trans(model, s, 1) +
                        log_emit(model, x.values[static_cast<std::size_t>(t + 1)], 1) +
                        beta[2 * (t + 1) + 1];
            beta[2 * t + s] = log_sum_exp(b0, b1);
        }
    }
    std::vector<double> marginals(static_cast<std::size_t>(T));
    for (int t = 0; t < T; ++t) {
        double g0 = alpha[2 * t] + beta[2 * t];
        double g1 = alpha[2 * t + 1] + beta[2 * t + 1];
        marginals[static_cast<std::size_t>(t)] = 1.0 / (1.0 + std::exp(g0 - g1));
    }
    return marginals;
}

qvi::BitVector viterbi_map(const qvi::HmmModel& model, const qvi::Observation& x) {
    const int T = model.steps();
    if (static_cast<int>(x.values.size()) != T) throw std::invalid_argument("length mismatch");
    std::vector<double> delta(static_cast<std::size_t>(T) * 2);
    std::vector<int> argmax(static_cast<std::size_t>(T) * 2, 0);
    for (int s = 0; s < 2; ++s) delta[s] = log_init(model, s) + log_emit(model, x.values[0], s);
    for (int t = 1; t < T; ++t) {
        for (int s = 0; s < 2; ++s) {
            double from0 = delta[2 * (t - 1)] + log_trans(model, 0, s);
            double from1 = delta[2 * (t - 1) + 1] + log_trans(model, 1, s);
            int best = from1 > from0 ? 1 : 0;
            argmax[2 * t + s] = best;
            delta[2 * t + s] = (best ? from1 : from0) +
                               log_emit(model, x.values[static_cast<std::size_t>(t)], s);
        }
    }
    qvi::BitVector path(static_cast<std::size_t>(T));
    int s = delta[2 * (T - 1) + 1] > delta[2 * (T - 1)] ? 1 : 0;
    for (int t = T - 1; t >= 0; --t) {
        path[static_cast<std::size_t>(t)] = static_cast<std::uint8_t>(s);
        s = argmax[2 * t + s];
    }
    return path;
}

double u_statistic_variance(qvi::SteinKernelCache& cache, std::span<const double> q, int m) {
    if (m < 2) throw std::invalid_argument("need at least two samples");
    const std::size_t dim = q.size();
    double mean = 0.0;
    std::vector<double> g(dim, 0.0); // g(a) = E_b[kappa(a, b)]
    for (std::size_t a = 0; a < dim; ++a) {
        for (std::size_t b = 0; b < dim; ++b) g[a] += q[b] * cache.kappa_by_index(a, b);
        mean += q[a] * g[a];
    }
    double zeta1 = 0.0, zeta2 = 0.0;
    for (std::size_t a = 0; a < dim; ++a) {
        zeta1 += q[a] * (g[a] - mean) * (g[a] - mean);
        for (std::size_t b = 0; b < dim; ++b) {
            double d = cache.kappa_by_index(a, b) - mean;
            zeta2 += q[a] * q[b] * d * d;
        }
    }
    double dm = static_cast<double>(m);
    return 2.0 * (2.0 * (dm - 2.0) * zeta1 + zeta2) / (dm * (dm - 1.0));
}

bool min_eigenvalue_at_least(std::vector<std::vector<double>> gram, double shift) {
    const std::size_t n = gram.size();
    for (std::size_t i = 0; i < n; ++i) gram[i][i] += shift;
    // In-place Cholesky; failure of a pivot means the shifted matrix is not
    // positive semidefinite.
    for (std::size_t k = 0; k < n; ++k) {
        double pivot = gram[k][k];
        for (std::size_t m = 0; m < k; ++m) pivot -= gram[k][m] * gram[k][m];
        if (pivot < 0.0) return false;
        double root = std::sqrt(std::max(pivot, 0.0));
        gram[k][k] = root;
        for (std::size_t i = k + 1; i < n; ++i) {
            double v = gram[i][k];
            for (std::size_t m = 0; m < k; ++m) v -= gram[i][m] * gram[k][m];
            gram[i][k] = root > 0.0 ? v / root : 0.0;
        }
    }
    return true;
}

} // namespace oracles
