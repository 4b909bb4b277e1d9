#include "qvi/checks.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include "qvi/advkl.hpp"
#include "qvi/born.hpp"
#include "qvi/hmm.hpp"
#include "qvi/ksd.hpp"
#include "qvi/models.hpp"
#include "qvi/rng.hpp"

namespace qvi {

namespace {

constexpr double kPi = 3.14159265358979323846;

double rel_error(double a, double b) {
    return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

BornMachine nudged(BornMachine machine, int j, double h) {
    machine.theta[static_cast<std::size_t>(j)] += h;
    return machine;
}

BornMachine random_machine(Rng& rng, const AnsatzSpec& spec) {
    BornMachine machine{spec, {}};
    machine.theta.resize(static_cast<std::size_t>(spec.param_count()));
    for (auto& t : machine.theta) t = rng.uniform(-kPi, kPi);
    return machine;
}

// A random inference problem with the machine sized to its latent space:
// either a sprinkler posterior (3 latents, Hadamard preparation) or a short
// regime-switching chain (2-4 latents, angle encoding of the series).
struct RandomProblem {
    std::unique_ptr<JointModel> model;
    BornMachine machine;
    Observation x;
};

RandomProblem random_problem(Rng& rng) {
    RandomProblem problem;
    int layers = static_cast<int>(rng.uniform_int(3));
    if (rng.uniform_int(2) == 0) {
        problem.model = std::make_unique<BayesNetPosterior>(
            models::random_sprinkler(rng.next_u64()), models::sprinkler_evidence());
        problem.machine =
            random_machine(rng, AnsatzSpec{3, layers, Encoding::HadamardPrep});
        problem.x = static_cast<const BayesNetPosterior&>(*problem.model).observation();
    } else {
        int T = 2 + static_cast<int>(rng.uniform_int(3));
        problem.model = std::make_unique<HmmModel>(models::default_hmm(T));
        problem.machine = random_machine(rng, AnsatzSpec{T, layers, Encoding::AngleEncoding});
        for (int t = 0; t < T; ++t) problem.x.values.push_back(rng.normal(0.5, 1.0));
    }
    return problem;
}

double exact_kl_objective(const BornMachine& machine, const JointModel& model,
                          const Observation& x) {
    auto q = exact_distribution(machine, x);
    const int n = machine.spec.n_qubits;
    double acc = 0.0;
    for (std::size_t idx = 0; idx < q.size(); ++idx) {
        if (q[idx] <= 0.0) continue;
        BitVector z = bits_of(idx, n);
        acc += q[idx] * (std::log(q[idx]) - model.log_prior(z) - model.log_likelihood(x, z));
    }
    return acc;
}

std::string worst_detail(double worst, double tol) {
    std::ostringstream os;
    os << "worst error " << worst << " (tolerance " << tol << ")";
    return os.str();
}

} // namespace

CheckResult check_stein_identity(std::uint64_t seed, int n_models, int n_functions, double tol) {
    Rng rng(seed);
    double worst = 0.0;
    for (int m = 0; m < n_models; ++m) {
        BayesNetPosterior model(models::random_sprinkler(rng.next_u64()),
                                models::sprinkler_evidence());
        Observation x = model.observation();
        const int n = model.latent_dim();
        auto posterior = exact_posterior(model, x);
        for (int f = 0; f < n_functions; ++f) {
            // Random test function {0,1}^n -> R^n.
            std::vector<std::vector<double>> values(posterior.size(),
                                                    std::vector<double>(n));
            for (auto& row : values) {
                for (auto& v : row) v = rng.normal(0.0, 1.0);
            }
            double expectation = 0.0;
            for (std::size_t idx = 0; idx < posterior.size(); ++idx) {
                BitVector z = bits_of(idx, n);
                auto s = difference_score(model, x, z);
                double applied = 0.0;
                for (int i = 0; i < n; ++i) {
                    std::size_t flipped = index_of(flip_bit(z, static_cast<std::size_t>(i)));
                    applied += s[static_cast<std::size_t>(i)] * values[idx][i];
                    applied -= values[idx][i] - values[flipped][i];
                }
                expectation += posterior[idx] * applied;
            }
            worst = std::max(worst, std::abs(expectation));
        }
    }
    return {"stein-identity", worst < tol, worst, worst_detail(worst, tol)};
}

CheckResult check_ksd_truth_zero(std::uint64_t seed, int n_instances, double lo, double hi) {
    Rng rng(seed);
    double worst = 0.0;
    bool pass = true;
    for (int m = 0; m < n_instances; ++m) {
        BayesNetPosterior model(models::random_sprinkler(rng.next_u64()),
                                models::sprinkler_evidence());
        Observation x = model.observation();
        auto posterior = exact_posterior(model, x);
        // Load sqrt(p) through the statevector layer so q round-trips the
        // simulator exactly as a Born machine distribution would.
        std::vector<std::complex<double>> amps(posterior.size());
        for (std::size_t i = 0; i < amps.size(); ++i) amps[i] = std::sqrt(posterior[i]);
        auto q = outcome_probabilities(StateVector::from_amplitudes(std::move(amps)));
        SteinKernelCache cache(model, x);
        double inner = ksd_inner_exact(cache, q, q);
        worst = std::max(worst, std::abs(inner));
        if (inner < lo || inner > hi) pass = false;
    }
    std::ostringstream os;
    os << "largest |inner expectation| " << worst << " (window [" << lo << ", " << hi << "])";
    return {"ksd-truth-zero", pass, worst, os.str()};
}

CheckResult check_prob_gradients(std::uint64_t seed, int n_configs, double tol) {
    Rng rng(seed);
    const double h = 1e-5;
    double worst = 0.0;
    for (int c = 0; c < n_configs; ++c) {
        int n = 1 + static_cast<int>(rng.uniform_int(4));
        int layers = static_cast<int>(rng.uniform_int(3));
        auto machine = random_machine(rng, AnsatzSpec{n, layers, Encoding::HadamardPrep});
        Observation x;
        BitVector z = bits_of(rng.uniform_int(std::size_t{1} << n), n);
        int j = static_cast<int>(rng.uniform_int(machine.theta.size()));
        double analytic = prob_gradient(machine, x, z, j);
        std::size_t idx = index_of(z);
        double fd = (exact_distribution(nudged(machine, j, h), x)[idx] -
                     exact_distribution(nudged(machine, j, -h), x)[idx]) /
                    (2.0 * h);
        worst = std::max(worst, rel_error(analytic, fd));
    }
    return {"prob-gradients", worst < tol, worst, worst_detail(worst, tol)};
}

CheckResult check_classifier_gradients(std::uint64_t seed, int n_configs, double tol) {
    Rng rng(seed);
    const double h = 1e-6;
    double worst = 0.0;
    for (int c = 0; c < n_configs; ++c) {
        int in_dim = 2 + static_cast<int>(rng.uniform_int(5));
        int hidden = 2 + static_cast<int>(rng.uniform_int(5));
        Mlp mlp = init_mlp(in_dim, hidden, rng.next_u64());

        LabeledBatch batch;
        int size = 4 + static_cast<int>(rng.uniform_int(9));
        for (int i = 0; i < size; ++i) {
            std::vector<double> input(static_cast<std::size_t>(in_dim));
            for (auto& v : input) v = rng.normal(0.0, 1.0);
            batch.inputs.push_back(std::move(input));
            batch.labels.push_back(i % 2);
        }

        auto analytic = classifier_gradient(mlp, batch);
        auto phi = mlp_params(mlp);
        for (std::size_t p = 0; p < phi.size(); ++p) {
            double keep = phi[p];
            phi[p] = keep + h;
            double up = classifier_objective(with_params(mlp, phi), batch);
            phi[p] = keep - h;
            double down = classifier_objective(with_params(mlp, phi), batch);
            phi[p] = keep;
            worst = std::max(worst, rel_error(analytic[p], (up - down) / (2.0 * h)));
        }
    }
    return {"classifier-gradients", worst < tol, worst, worst_detail(worst, tol)};
}

CheckResult check_kl_gradients(std::uint64_t seed, int n_configs, double tol) {
    Rng rng(seed);
    const double h = 1e-5;
    double worst = 0.0;
    for (int c = 0; c < n_configs; ++c) {
        auto problem = random_problem(rng);
        const Observation dataset[] = {problem.x};
        int j = static_cast<int>(rng.uniform_int(problem.machine.theta.size()));

        LogitFn ideal = ideal_logit_fn(problem.machine, *problem.model);
        ExpectationOptions opts{true, 0, 0};
        double analytic = born_gradient(problem.machine, *problem.model, ideal, dataset, j, opts);
        double fd = (exact_kl_objective(nudged(problem.machine, j, h), *problem.model,
                                        problem.x) -
                     exact_kl_objective(nudged(problem.machine, j, -h), *problem.model,
                                        problem.x)) /
                    (2.0 * h);
        worst = std::max(worst, rel_error(analytic, fd));
    }
    return {"kl-gradients", worst < tol, worst, worst_detail(worst, tol)};
}

CheckResult check_ksd_gradients(std::uint64_t seed, int n_configs, double tol) {
    Rng rng(seed);
    const double h = 1e-5;
    double worst = 0.0;
    for (int c = 0; c < n_configs; ++c) {
        auto problem = random_problem(rng);
        const Observation dataset[] = {problem.x};
        int j = static_cast<int>(rng.uniform_int(problem.machine.theta.size()));

        KsdOptions opts;
        opts.exact = true;
        double analytic = ksd_gradient(problem.machine, *problem.model, dataset, j, opts);
        double fd = (ksd_estimate(nudged(problem.machine, j, h), *problem.model, problem.x,
                                  opts) -
                     ksd_estimate(nudged(problem.machine, j, -h), *problem.model, problem.x,
                                  opts)) /
                    (2.0 * h);
        worst = std::max(worst, rel_error(analytic, fd));
    }
    return {"ksd-gradients", worst < tol, worst, worst_detail(worst, tol)};
}

CheckResult check_norm_preservation(std::uint64_t seed, int n_circuits, double tol) {
    Rng rng(seed);
    double worst = 0.0;
    for (int c = 0; c < n_circuits; ++c) {
        int n = 1 + static_cast<int>(rng.uniform_int(6));
        int layers = static_cast<int>(rng.uniform_int(4));
        auto machine = random_machine(rng, AnsatzSpec{n, layers, Encoding::HadamardPrep});
        auto state = run_circuit(build_circuit(machine, Observation{}));
        worst = std::max(worst, std::abs(state.norm_squared() - 1.0));
    }
    return {"norm-preservation", worst < tol, worst, worst_detail(worst, tol)};
}

double chi_square_critical(int dof, double significance) {
    // Upper quantiles at significance 0.001.
    static const double k999[] = {10.828, 13.816, 16.266, 18.467, 20.515,
                                  22.458, 24.322, 26.124, 27.877, 29.588,
                                  31.264, 32.909, 34.528, 36.123, 37.697};
    if (dof < 1) throw std::invalid_argument("degrees of freedom must be positive");
    if (std::abs(significance - 0.001) < 1e-12 && dof <= 15) return k999[dof - 1];
    // Wilson-Hilferty approximation for anything else.
    double z;
    if (std::abs(significance - 0.001) < 1e-12) z = 3.0902;
    else if (std::abs(significance - 0.01) < 1e-12) z = 2.3263;
    else if (std::abs(significance - 0.05) < 1e-12) z = 1.6449;
    else throw std::invalid_argument("unsupported significance level");
    double d = static_cast<double>(dof);
    double t = 1.0 - 2.0 / (9.0 * d) + z * std::sqrt(2.0 / (9.0 * d));
    return d * t * t * t;
}

CheckResult check_sampling_chisquare(std::uint64_t seed, int n_circuits, int shots,
                                     double significance) {
    Rng rng(seed);
    double worst_ratio = 0.0;
    bool pass = true;
    for (int c = 0; c < n_circuits; ++c) {
        auto machine = random_machine(rng, AnsatzSpec{4, 2, Encoding::HadamardPrep});
        auto probs = exact_distribution(machine, Observation{});
        auto samples = born_sample(machine, Observation{}, shots, rng.next_u64());
        std::vector<double> observed(probs.size(), 0.0);
        for (const auto& z : samples) observed[index_of(z)] += 1.0;

        // Pool bins whose expected count is below 10 so the chi-square
        // approximation stays valid.
        double stat = 0.0;
        int bins = 0;
        double pooled_expected = 0.0, pooled_observed = 0.0;
        for (std::size_t i = 0; i < probs.size(); ++i) {
            double expected = probs[i] * shots;
            if (expected < 10.0) {
                pooled_expected += expected;
                pooled_observed += observed[i];
                continue;
            }
            double diff = observed[i] - expected;
            stat += diff * diff / expected;
            ++bins;
        }
        if (pooled_expected > 0.0) {
            double diff = pooled_observed - pooled_expected;
            stat += diff * diff / pooled_expected;
            ++bins;
        }
        if (bins < 2) continue; // effectively deterministic distribution
        double critical = chi_square_critical(bins - 1, significance);
        worst_ratio = std::max(worst_ratio, stat / critical);
        if (stat >= critical) pass = false;
    }
    std::ostringstream os;
    os << "worst statistic/critical ratio " << worst_ratio;
    return {"sampling-chisquare", pass, worst_ratio, os.str()};
}

CheckResult check_gradient_zero_sum(std::uint64_t seed, int n_configs, double tol) {
    Rng rng(seed);
    double worst = 0.0;
    for (int c = 0; c < n_configs; ++c) {
        int n = 1 + static_cast<int>(rng.uniform_int(4));
        int layers = static_cast<int>(rng.uniform_int(3));
        auto machine = random_machine(rng, AnsatzSpec{n, layers, Encoding::HadamardPrep});
        int j = static_cast<int>(rng.uniform_int(machine.theta.size()));
        double total = 0.0;
        for (std::size_t idx = 0; idx < (std::size_t{1} << n); ++idx) {
            total += prob_gradient(machine, Observation{}, bits_of(idx, n), j);
        }
        worst = std::max(worst, std::abs(total));
    }
    return {"gradient-zero-sum", worst < tol, worst, worst_detail(worst, tol)};
}

} // namespace qvi
