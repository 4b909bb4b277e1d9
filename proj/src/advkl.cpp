#include "qvi/advkl.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <stdexcept>

#include "qvi/metrics.hpp"

namespace qvi {

namespace {

std::vector<double> features(const BitVector& z, const Observation& x, bool include_observation) {
    std::vector<double> input;
    input.reserve(z.size() + (include_observation ? x.values.size() : 0));
    for (auto b : z) input.push_back(static_cast<double>(b));
    if (include_observation) input.insert(input.end(), x.values.begin(), x.values.end());
    return input;
}

} // namespace

LogitFn mlp_logit_fn(const Mlp& mlp, bool include_observation) {
    return [mlp, include_observation](const BitVector& z, const Observation& x) {
        return mlp_logit(mlp, features(z, x, include_observation));
    };
}

LogitFn ideal_logit_fn(const BornMachine& machine, const JointModel& model) {
    // Exact distributions are cached per observation; the machine is frozen
    // at the state it had when the logit was created.
    auto cache = std::make_shared<std::map<std::vector<double>, std::vector<double>>>();
    return [machine, &model, cache](const BitVector& z, const Observation& x) {
        auto it = cache->find(x.values);
        if (it == cache->end()) {
            it = cache->emplace(x.values, exact_distribution(machine, x)).first;
        }
        return std::log(it->second[index_of(z)]) - model.log_prior(z);
    };
}

namespace {

// The integrand logit(z, x) - log p(x|z) tabulated over every outcome; the
// classifier is evaluated once per basis state instead of once per sample.
std::vector<double> integrand_table(int n_qubits, const JointModel& model, const LogitFn& logit,
                                    const Observation& x) {
    std::vector<double> table(std::size_t{1} << n_qubits);
    for (std::size_t idx = 0; idx < table.size(); ++idx) {
        BitVector z = bits_of(idx, n_qubits);
        table[idx] = logit(z, x) - model.log_likelihood(x, z);
    }
    return table;
}

// E_{z ~ q} [ table(z) ] given the outcome distribution q.
double expectation_over(std::span<const double> q, std::span<const double> table,
                        const ExpectationOptions& opts) {
    double value = 0.0;
    if (opts.exact) {
        for (std::size_t idx = 0; idx < q.size(); ++idx) {
            if (q[idx] > 0.0) value += q[idx] * table[idx];
        }
    } else {
        Rng rng(opts.seed);
        double acc = 0.0;
        for (auto idx : sample_indices(q, opts.shots, rng)) acc += table[idx];
        value = acc / static_cast<double>(opts.shots);
    }
    if (!std::isfinite(value)) throw std::runtime_error("non-finite loss estimate");
    return value;
}

double expectation_from_table(const BornMachine& machine, const Observation& x,
                              std::span<const double> table, const ExpectationOptions& opts) {
    return expectation_over(exact_distribution(machine, x), table, opts);
}

} // namespace

double born_loss(const BornMachine& machine, const JointModel& model, const LogitFn& logit,
                 std::span<const Observation> dataset, const ExpectationOptions& opts) {
    if (dataset.empty()) throw std::invalid_argument("dataset must not be empty");
    double acc = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        ExpectationOptions local = opts;
        local.seed = derive_seed(opts.seed, i);
        auto table = integrand_table(machine.spec.n_qubits, model, logit, dataset[i]);
        acc += expectation_from_table(machine, dataset[i], table, local);
    }
    return acc / static_cast<double>(dataset.size());
}

double born_gradient(const BornMachine& machine, const JointModel& model, const LogitFn& logit,
                     std::span<const Observation> dataset, int j,
                     const ExpectationOptions& opts) {
    if (dataset.empty()) throw std::invalid_argument("dataset must not be empty");
    auto [plus, minus] = shifted_machines(machine, j);
    double acc = 0.0;
    for (std::size_t i = 0; i < dataset.size(); ++i) {
        ExpectationOptions up = opts, down = opts;
        up.seed = derive_seed(opts.seed, 2 * i);
        down.seed = derive_seed(opts.seed, 2 * i + 1);
        auto table = integrand_table(machine.spec.n_qubits, model, logit, dataset[i]);
        acc += 0.5 * (expectation_from_table(plus, dataset[i], table, up) -
                      expectation_from_table(minus, dataset[i], table, down));
    }
    return acc / static_cast<double>(dataset.size());
}

namespace {

// Exact cross entropy of the optimal classifier for the current machine:
// sum_z q log d*(z) + sum_z p log(1 - d*(z)).
double ideal_classifier_objective(const std::vector<double>& q, const std::vector<double>& prior) {
    double acc = 0.0;
    for (std::size_t idx = 0; idx < q.size(); ++idx) {
        double denom = q[idx] + prior[idx];
        if (q[idx] > 0.0) acc += q[idx] * (std::log(q[idx]) - std::log(denom));
        acc += prior[idx] * (std::log(prior[idx]) - std::log(denom));
    }
    return acc;
}

struct EpochStreams {
    std::uint64_t machine_data;
    std::uint64_t prior_data;
    std::uint64_t shuffle;
    std::uint64_t loss;
    std::uint64_t grad_base;
};

EpochStreams epoch_streams(std::uint64_t master, int epoch) {
    std::uint64_t es = derive_seed(master, 0x10000u + static_cast<std::uint64_t>(epoch));
    return {derive_seed(es, 0), derive_seed(es, 1), derive_seed(es, 2), derive_seed(es, 3),
            es};
}

} // namespace

TrainResult train_adversarial(BornMachine machine, const JointModel& model,
                              std::span<const Observation> dataset, const AdvConfig& config) {
    if (dataset.empty()) throw std::invalid_argument("dataset must not be empty");
    if (config.minibatch <= 0 || config.samples_per_class <= 0 || config.shots_born <= 0) {
        throw std::invalid_argument("sample counts must be positive");
    }
    const int n = machine.spec.n_qubits;
    if (n != model.latent_dim()) {
        throw std::invalid_argument("machine qubit count does not match latent dimension");
    }
    const bool include_x = dataset.size() > 1;
    const int x_dim = static_cast<int>(dataset[0].values.size());
    for (const auto& x : dataset) {
        if (static_cast<int>(x.values.size()) != x_dim) {
            throw std::invalid_argument("observations differ in dimension");
        }
    }

    Mlp mlp = init_mlp(n + (include_x ? x_dim : 0), config.mlp_hidden, derive_seed(config.seed, 0));

    // Enumerable diagnostics are fixed for the whole run.
    std::vector<std::vector<double>> posteriors;
    if (config.track_tvd) {
        for (const auto& x : dataset) posteriors.push_back(exact_posterior(model, x));
    }
    std::vector<double> prior_probs;
    if (config.track_ideal_classifier) {
        prior_probs.resize(std::size_t{1} << n);
        for (std::size_t idx = 0; idx < prior_probs.size(); ++idx) {
            prior_probs[idx] = std::exp(model.log_prior(bits_of(idx, n)));
        }
    }

    TrainResult result;
    result.best_machine = machine;
    result.best_loss = std::numeric_limits<double>::infinity();

    const auto run_start = std::chrono::steady_clock::now();
    auto elapsed_ms = [&run_start] {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() -
                                                         run_start)
            .count();
    };
    double last_mark = 0.0;

    for (int epoch = 0; epoch < config.epochs; ++epoch) {
        const auto streams = epoch_streams(config.seed, epoch);

        // Step 1: refresh the two-class dataset and run one classifier pass.
        LabeledBatch data;
        {
            Rng rng(streams.machine_data);
            std::vector<int> counts(dataset.size(), 0);
            for (int i = 0; i < config.samples_per_class; ++i) {
                ++counts[rng.uniform_int(dataset.size())];
            }
            for (std::size_t d = 0; d < dataset.size(); ++d) {
                if (counts[d] == 0) continue;
                auto probs = exact_distribution(machine, dataset[d]);
                for (auto idx : sample_indices(probs, counts[d], rng)) {
                    data.inputs.push_back(features(bits_of(idx, n), dataset[d], include_x));
                    data.labels.push_back(1);
                }
            }
        }
        {
            Rng rng(streams.prior_data);
            for (int i = 0; i < config.samples_per_class; ++i) {
                std::size_t d = rng.uniform_int(dataset.size());
                data.inputs.push_back(features(model.sample_prior(rng), dataset[d], include_x));
                data.labels.push_back(0);
            }
        }
        // A vanilla gradient-descent step on every theta_j with the current
        // classifier. The integrand tables are shared across parameters;
        // `stream` keeps the shift-pair estimates of different steps and
        // parameters on disjoint sample streams.
        auto born_step = [&](std::uint64_t stream) {
            const LogitFn logit = mlp_logit_fn(mlp, include_x);
            ExpectationOptions opts{config.use_exact_expectations, config.shots_born, 0};
            std::vector<double> grad(machine.theta.size(), 0.0);
            for (std::size_t d = 0; d < dataset.size(); ++d) {
                auto table = integrand_table(n, model, logit, dataset[d]);
                auto shifted = shifted_distributions(machine, dataset[d]);
                for (std::size_t j = 0; j < machine.theta.size(); ++j) {
                    std::uint64_t js = derive_seed(stream, j);
                    ExpectationOptions up = opts, down = opts;
                    up.seed = derive_seed(js, 2 * d);
                    down.seed = derive_seed(js, 2 * d + 1);
                    grad[j] += 0.5 * (expectation_over(shifted[j].plus, table, up) -
                                      expectation_over(shifted[j].minus, table, down));
                }
            }
            for (std::size_t j = 0; j < machine.theta.size(); ++j) {
                machine.theta[j] -= config.lr_born * grad[j] / static_cast<double>(dataset.size());
            }
        };

        {
            Rng rng(streams.shuffle);
            std::vector<std::size_t> order(data.inputs.size());
            for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
            for (std::size_t i = order.size(); i > 1; --i) {
                std::swap(order[i - 1], order[rng.uniform_int(i)]);
            }
            std::uint64_t alternation = 0;
            for (std::size_t start = 0; start < order.size();
                 start += static_cast<std::size_t>(config.minibatch)) {
                LabeledBatch batch;
                std::size_t stop = std::min(order.size(),
                                            start + static_cast<std::size_t>(config.minibatch));
                for (std::size_t k = start; k < stop; ++k) {
                    batch.inputs.push_back(data.inputs[order[k]]);
                    batch.labels.push_back(data.labels[order[k]]);
                }
                mlp = train_step(mlp, batch, config.lr_mlp);
                if (config.update_per_minibatch) {
                    born_step(derive_seed(streams.grad_base, 0x100 + alternation));
                }
                ++alternation;
            }
        }
        if (!config.update_per_minibatch) {
            born_step(derive_seed(streams.grad_base, 0x100));
        }

        EpochLog log;
        log.epoch = epoch;
        // Loss estimates drift with the classifier (early classifiers
        // underestimate the ratio term), so champion selection re-scores the
        // incumbent under the current classifier with the same seed instead
        // of comparing stale numbers.
        const LogitFn score_logit = mlp_logit_fn(mlp, include_x);
        const ExpectationOptions score_opts{config.use_exact_expectations, config.shots_born,
                                            streams.loss};
        log.born_loss = born_loss(machine, model, score_logit, dataset, score_opts);
        double champion_loss =
            epoch == 0 ? *log.born_loss
                       : born_loss(result.best_machine, model, score_logit, dataset, score_opts);
        if (epoch == 0 || *log.born_loss <= champion_loss) {
            result.best_machine = machine;
            result.best_loss = *log.born_loss;
            result.best_epoch = epoch;
        } else {
            result.best_loss = champion_loss;
        }
        log.mlp_objective = classifier_objective(mlp, data);
        if (config.track_ideal_classifier) {
            double acc = 0.0;
            for (const auto& x : dataset) {
                acc += ideal_classifier_objective(exact_distribution(machine, x), prior_probs);
            }
            log.ideal_mlp_objective = acc / static_cast<double>(dataset.size());
        }
        if (config.track_tvd) {
            double acc = 0.0;
            for (std::size_t d = 0; d < dataset.size(); ++d) {
                acc += tvd(posteriors[d], exact_distribution(machine, dataset[d]));
            }
            log.tvd = acc / static_cast<double>(dataset.size());
        }
        double now = elapsed_ms();
        log.wall_ms = now - last_mark;
        last_mark = now;
        result.logs.push_back(log);
    }

    result.final_machine = std::move(machine);
    return result;
}

} // namespace qvi
