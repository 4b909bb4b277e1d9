#include "qvi/mlp.hpp"

#include <cmath>
#include <stdexcept>

#include "qvi/rng.hpp"

namespace qvi {

namespace {

double softplus(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    double e = std::exp(t);
    return e / (1.0 + e);
}

std::vector<double> hidden_pre_activations(const Mlp& mlp, std::span<const double> input) {
    if (static_cast<int>(input.size()) != mlp.in_dim) {
        throw std::invalid_argument("classifier input has wrong dimension");
    }
    std::vector<double> u(static_cast<std::size_t>(mlp.hidden_dim));
    for (int h = 0; h < mlp.hidden_dim; ++h) {
        double acc = mlp.b1[static_cast<std::size_t>(h)];
        const double* row = mlp.w1.data() + static_cast<std::size_t>(h) * mlp.in_dim;
        for (int i = 0; i < mlp.in_dim; ++i) acc += row[i] * input[static_cast<std::size_t>(i)];
        u[static_cast<std::size_t>(h)] = acc;
    }
    return u;
}

} // namespace

Mlp init_mlp(int in_dim, int hidden_dim, std::uint64_t seed) {
    if (in_dim <= 0 || hidden_dim <= 0) throw std::invalid_argument("layer sizes must be positive");
    Rng rng(seed);
    Mlp mlp;
    mlp.in_dim = in_dim;
    mlp.hidden_dim = hidden_dim;
    mlp.w1.resize(static_cast<std::size_t>(hidden_dim) * in_dim);
    mlp.b1.assign(static_cast<std::size_t>(hidden_dim), 0.0);
    mlp.w2.resize(static_cast<std::size_t>(hidden_dim));
    double s1 = std::sqrt(2.0 / in_dim);
    double s2 = std::sqrt(2.0 / hidden_dim);
    for (auto& w : mlp.w1) w = rng.normal(0.0, s1);
    for (auto& w : mlp.w2) w = rng.normal(0.0, s2);
    mlp.b2 = 0.0;
    return mlp;
}

std::vector<double> mlp_params(const Mlp& mlp) {
    std::vector<double> phi;
    phi.reserve(static_cast<std::size_t>(mlp.param_count()));
    phi.insert(phi.end(), mlp.w1.begin(), mlp.w1.end());
    phi.insert(phi.end(), mlp.b1.begin(), mlp.b1.end());
    phi.insert(phi.end(), mlp.w2.begin(), mlp.w2.end());
    phi.push_back(mlp.b2);
    return phi;
}

Mlp with_params(const Mlp& shape, std::span<const double> phi) {
    if (static_cast<int>(phi.size()) != shape.param_count()) {
        throw std::invalid_argument("parameter vector has wrong length");
    }
    Mlp mlp = shape;
    std::size_t k = 0;
    for (auto& w : mlp.w1) w = phi[k++];
    for (auto& b : mlp.b1) b = phi[k++];
    for (auto& w : mlp.w2) w = phi[k++];
    mlp.b2 = phi[k++];
    return mlp;
}

double mlp_logit(const Mlp& mlp, std::span<const double> input) {
    auto u = hidden_pre_activations(mlp, input);
    double acc = mlp.b2;
    for (int h = 0; h < mlp.hidden_dim; ++h) {
        if (u[static_cast<std::size_t>(h)] > 0.0) {
            acc += mlp.w2[static_cast<std::size_t>(h)] * u[static_cast<std::size_t>(h)];
        }
    }
    return acc;
}

double mlp_forward(const Mlp& mlp, std::span<const double> input) {
    return sigmoid(mlp_logit(mlp, input));
}

double classifier_objective(const Mlp& mlp, const LabeledBatch& batch) {
    if (batch.inputs.size() != batch.labels.size()) {
        throw std::invalid_argument("batch inputs and labels differ in length");
    }
    double sum1 = 0.0, sum0 = 0.0;
    int n1 = 0, n0 = 0;
    for (std::size_t i = 0; i < batch.inputs.size(); ++i) {
        double a = mlp_logit(mlp, batch.inputs[i]);
        if (batch.labels[i]) {
            sum1 += -softplus(-a); // log d
            ++n1;
        } else {
            sum0 += -softplus(a); // log(1 - d)
            ++n0;
        }
    }
    double obj = 0.0;
    if (n1 > 0) obj += sum1 / n1;
    if (n0 > 0) obj += sum0 / n0;
    return obj;
}

std::vector<double> classifier_gradient(const Mlp& mlp, const LabeledBatch& batch) {
    if (batch.inputs.size() != batch.labels.size()) {
        throw std::invalid_argument("batch inputs and labels differ in length");
    }
    int n1 = 0, n0 = 0;
    for (int label : batch.labels) (label ? n1 : n0)++;

    std::vector<double> gw1(mlp.w1.size(), 0.0);
    std::vector<double> gb1(mlp.b1.size(), 0.0);
    std::vector<double> gw2(mlp.w2.size(), 0.0);
    double gb2 = 0.0;

    for (std::size_t i = 0; i < batch.inputs.size(); ++i) {
        const auto& input = batch.inputs[i];
        auto u = hidden_pre_activations(mlp, input);
        double a = mlp.b2;
        for (int h = 0; h < mlp.hidden_dim; ++h) {
            if (u[static_cast<std::size_t>(h)] > 0.0) {
                a += mlp.w2[static_cast<std::size_t>(h)] * u[static_cast<std::size_t>(h)];
            }
        }
        // d/da of log d is sigmoid(-a); of log(1-d) is -sigmoid(a).
        double weight = batch.labels[i] ? 1.0 / n1 : 1.0 / n0;
        double da = (batch.labels[i] ? sigmoid(-a) : -sigmoid(a)) * weight;

        gb2 += da;
        for (int h = 0; h < mlp.hidden_dim; ++h) {
            double uh = u[static_cast<std::size_t>(h)];
            if (uh > 0.0) {
                gw2[static_cast<std::size_t>(h)] += da * uh;
                double du = da * mlp.w2[static_cast<std::size_t>(h)];
                gb1[static_cast<std::size_t>(h)] += du;
                double* grow = gw1.data() + static_cast<std::size_t>(h) * mlp.in_dim;
                for (int k = 0; k < mlp.in_dim; ++k) {
                    grow[k] += du * input[static_cast<std::size_t>(k)];
                }
            }
        }
    }

    std::vector<double> grad;
    grad.reserve(static_cast<std::size_t>(mlp.param_count()));
    grad.insert(grad.end(), gw1.begin(), gw1.end());
    grad.insert(grad.end(), gb1.begin(), gb1.end());
    grad.insert(grad.end(), gw2.begin(), gw2.end());
    grad.push_back(gb2);
    return grad;
}

Mlp train_step(const Mlp& mlp, const LabeledBatch& batch, double lr) {
    if (!(lr > 0.0)) throw std::invalid_argument("learning rate must be positive");
    auto grad = classifier_gradient(mlp, batch);
    auto phi = mlp_params(mlp);
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] += lr * grad[i];
    return with_params(mlp, phi);
}

double ideal_classifier_value(std::span<const double> q, std::span<const double> p,
                              const BitVector& z) {
    std::size_t idx = index_of(z);
    if (idx >= q.size() || idx >= p.size()) throw std::out_of_range("bit vector out of range");
    double denom = q[idx] + p[idx];
    if (!(denom > 0.0)) throw std::invalid_argument("q(z) + p(z) must be positive");
    return q[idx] / denom;
}

} // namespace qvi
