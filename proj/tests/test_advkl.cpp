#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qvi/advkl.hpp"
#include "qvi/checks.hpp"
#include "qvi/metrics.hpp"
#include "qvi/models.hpp"

using namespace qvi;

namespace {

// Sprinkler-shaped network whose evidence node has the same row everywhere,
// so the likelihood is a constant c = 0.7.
BayesNetPosterior constant_likelihood_model() {
    BayesNet net;
    net.nodes.push_back(make_node("C", {}, {0.4}));
    net.nodes.push_back(make_node("S", {0}, {0.3, 0.6}));
    net.nodes.push_back(make_node("R", {0}, {0.2, 0.9}));
    net.nodes.push_back(make_node("W", {1, 2}, {0.7, 0.7, 0.7, 0.7}));
    return BayesNetPosterior(net, {{"W", true}});
}

BornMachine random_test_machine(int n, int layers, std::uint64_t seed) {
    auto machine = init_machine(AnsatzSpec{n, layers, Encoding::HadamardPrep}, seed);
    Rng rng(derive_seed(seed, 1));
    for (auto& t : machine.theta) t = rng.uniform(-3.0, 3.0);
    return machine;
}

} // namespace

TEST_CASE("born loss") {
    SUBCASE("zero logit and constant likelihood give -log c") {
        auto model = constant_likelihood_model();
        auto machine = random_test_machine(3, 1, 2);
        const Observation dataset[] = {model.observation()};
        LogitFn zero = [](const BitVector&, const Observation&) { return 0.0; };
        double loss = born_loss(machine, model, zero, dataset, {true, 0, 0});
        CHECK(loss == doctest::Approx(-std::log(0.7)).epsilon(1e-12));
    }
    SUBCASE("exact mode equals the enumerated sum") {
        BayesNetPosterior model(models::random_sprinkler(12), models::sprinkler_evidence());
        auto machine = random_test_machine(3, 2, 3);
        Mlp mlp = init_mlp(3, 6, 4);
        const Observation dataset[] = {model.observation()};
        double loss =
            born_loss(machine, model, mlp_logit_fn(mlp, false), dataset, {true, 0, 0});
        auto q = exact_distribution(machine, model.observation());
        double expected = 0.0;
        for (std::size_t idx = 0; idx < 8; ++idx) {
            BitVector z = bits_of(idx, 3);
            std::vector<double> input{static_cast<double>(z[0]), static_cast<double>(z[1]),
                                      static_cast<double>(z[2])};
            expected += q[idx] * (mlp_logit(mlp, input) -
                                  model.log_likelihood(model.observation(), z));
        }
        CHECK(loss == doctest::Approx(expected).epsilon(1e-10));
    }
    SUBCASE("single observation reproduces the prior-contrastive integrand") {
        // With the ideal logit, the loss is KL(q || posterior) - log p(x).
        BayesNetPosterior model(models::random_sprinkler(77), models::sprinkler_evidence());
        Observation x = model.observation();
        auto machine = random_test_machine(3, 1, 9);
        const Observation dataset[] = {x};
        double loss =
            born_loss(machine, model, ideal_logit_fn(machine, model), dataset, {true, 0, 0});

        auto q = exact_distribution(machine, x);
        auto post = exact_posterior(model, x);
        double evidence = 0.0;
        for (std::size_t idx = 0; idx < 8; ++idx) {
            evidence += std::exp(model.log_joint(x, bits_of(idx, 3)));
        }
        double kl = 0.0;
        for (std::size_t idx = 0; idx < 8; ++idx) {
            if (q[idx] > 0.0) kl += q[idx] * std::log(q[idx] / post[idx]);
        }
        CHECK(loss == doctest::Approx(kl - std::log(evidence)).epsilon(1e-9));
    }
}

TEST_CASE("born gradient") {
    SUBCASE("constant integrand gives zero gradient") {
        auto model = constant_likelihood_model();
        auto machine = random_test_machine(3, 1, 5);
        const Observation dataset[] = {model.observation()};
        LogitFn constant = [](const BitVector&, const Observation&) { return 1.3; };
        for (int j : {0, 3, 7, 11}) {
            CHECK(std::abs(born_gradient(machine, model, constant, dataset, j,
                                         {true, 0, 0})) < 1e-12);
        }
    }
    SUBCASE("ideal-classifier gradient matches finite differences") {
        auto r = check_kl_gradients(91, 40, 1e-6);
        INFO(r.detail);
        CHECK(r.pass);
    }
    SUBCASE("shift-invariant parameters have zero gradient at theta = 0") {
        BayesNetPosterior model(models::random_sprinkler(31), models::sprinkler_evidence());
        BornMachine machine{AnsatzSpec{3, 1, Encoding::HadamardPrep},
                            std::vector<double>(12, 0.0)};
        const Observation dataset[] = {model.observation()};
        Mlp mlp = init_mlp(3, 6, 6);
        int invariant_params = 0;
        for (int j = 0; j < 12; ++j) {
            auto [plus, minus] = shifted_machines(machine, j);
            auto qp = exact_distribution(plus, dataset[0]);
            auto qm = exact_distribution(minus, dataset[0]);
            bool invariant = true;
            for (std::size_t idx = 0; idx < qp.size(); ++idx) {
                if (std::abs(qp[idx] - qm[idx]) > 1e-14) invariant = false;
            }
            if (!invariant) continue;
            ++invariant_params;
            double g = born_gradient(machine, model, mlp_logit_fn(mlp, false), dataset, j,
                                     {true, 0, 0});
            CHECK(std::abs(g) < 1e-12);
        }
        CHECK(invariant_params >= 6); // every RotZ angle qualifies at theta = 0
    }
    SUBCASE("entropy term of the gradient vanishes") {
        // d/dtheta sum_z q log q equals sum_z (dq) log q because
        // sum_z q dlog q = sum_z dq = 0.
        auto machine = random_test_machine(3, 1, 13);
        Observation x;
        auto entropy_like = [&x](const BornMachine& m) {
            auto q = exact_distribution(m, x);
            double acc = 0.0;
            for (double p : q) {
                if (p > 0.0) acc += p * std::log(p);
            }
            return acc;
        };
        for (int j = 0; j < machine.spec.param_count(); ++j) {
            const double h = 1e-6;
            BornMachine up = machine, down = machine;
            up.theta[static_cast<std::size_t>(j)] += h;
            down.theta[static_cast<std::size_t>(j)] -= h;
            double fd = (entropy_like(up) - entropy_like(down)) / (2.0 * h);
            auto q = exact_distribution(machine, x);
            double shift_sum = 0.0;
            for (std::size_t idx = 0; idx < q.size(); ++idx) {
                if (q[idx] <= 0.0) continue;
                shift_sum += prob_gradient(machine, x, bits_of(idx, 3), j) * std::log(q[idx]);
            }
            CHECK(std::abs(fd - shift_sum) < 1e-9);
        }
    }
}

TEST_CASE("adversarial training") {
    BayesNetPosterior model(models::random_sprinkler(8), models::sprinkler_evidence());
    const Observation dataset[] = {model.observation()};
    AdvConfig config;
    config.epochs = 0;
    config.seed = 5;

    SUBCASE("zero epochs returns the machine unchanged") {
        auto machine = init_machine(AnsatzSpec{3, 2, Encoding::HadamardPrep}, 3);
        auto theta = machine.theta;
        auto result = train_adversarial(std::move(machine), model, dataset, config);
        CHECK(result.final_machine.theta == theta);
        CHECK(result.logs.empty());
    }
    SUBCASE("fixed seed reproduces the log stream bit for bit") {
        config.epochs = 8;
        config.use_exact_expectations = true;
        auto run = [&] {
            return train_adversarial(init_machine(AnsatzSpec{3, 1, Encoding::HadamardPrep}, 3),
                                     model, dataset, config);
        };
        auto a = run();
        auto b = run();
        REQUIRE(a.logs.size() == b.logs.size());
        CHECK(a.final_machine.theta == b.final_machine.theta);
        for (std::size_t e = 0; e < a.logs.size(); ++e) {
            CHECK(*a.logs[e].born_loss == *b.logs[e].born_loss);
            CHECK(*a.logs[e].mlp_objective == *b.logs[e].mlp_objective);
            CHECK(*a.logs[e].tvd == *b.logs[e].tvd);
        }
    }
    SUBCASE("training improves the posterior approximation") {
        config.epochs = 300;
        config.use_exact_expectations = true;
        config.lr_born = 0.01; // a touch faster than the benchmark setting
        auto machine = init_machine(AnsatzSpec{3, 2, Encoding::HadamardPrep}, 21);
        auto posterior = exact_posterior(model, dataset[0]);
        double before = tvd(posterior, exact_distribution(machine, dataset[0]));
        auto result = train_adversarial(std::move(machine), model, dataset, config);
        double after = tvd(posterior, exact_distribution(result.final_machine, dataset[0]));
        CHECK(after < before);
        CHECK(result.best_epoch >= 0);
        CHECK(result.best_loss <= *result.logs.back().born_loss + 1e-12);
    }
    SUBCASE("trained classifier never beats the ideal classifier") {
        config.epochs = 60;
        config.use_exact_expectations = true;
        auto result = train_adversarial(init_machine(AnsatzSpec{3, 1, Encoding::HadamardPrep}, 2),
                                        model, dataset, config);
        const auto& machine = result.final_machine;
        auto q = exact_distribution(machine, dataset[0]);
        std::vector<double> prior(8);
        for (std::size_t idx = 0; idx < 8; ++idx) {
            prior[idx] = std::exp(model.log_prior(bits_of(idx, 3)));
        }
        // Fresh large sample; compare per-sample (star - mlp) terms for a
        // classifier trained on the spot against the current machine.
        const int m = 4000;
        Rng rng(404);
        auto q_samples = born_sample(machine, dataset[0], m, rng.next_u64());
        std::vector<BitVector> p_samples;
        for (int i = 0; i < m; ++i) p_samples.push_back(model.sample_prior(rng));
        Mlp fresh = init_mlp(3, 6, 777);
        for (int step = 0; step < 200; ++step) {
            LabeledBatch batch;
            for (int i = 0; i < 10; ++i) {
                std::size_t pick = rng.uniform_int(static_cast<std::uint64_t>(m));
                const auto& zq = q_samples[pick];
                batch.inputs.push_back({double(zq[0]), double(zq[1]), double(zq[2])});
                batch.labels.push_back(1);
                const auto& zp = p_samples[rng.uniform_int(static_cast<std::uint64_t>(m))];
                batch.inputs.push_back({double(zp[0]), double(zp[1]), double(zp[2])});
                batch.labels.push_back(0);
            }
            fresh = train_step(fresh, batch, 0.03);
        }
        double mean_diff = 0.0, var_acc = 0.0;
        std::vector<double> diffs;
        for (int i = 0; i < m; ++i) {
            const auto& zq = q_samples[static_cast<std::size_t>(i)];
            std::vector<double> in_q{double(zq[0]), double(zq[1]), double(zq[2])};
            double star_q = std::log(ideal_classifier_value(q, prior, zq));
            double mlp_q = std::log(mlp_forward(fresh, in_q));
            const auto& zp = p_samples[static_cast<std::size_t>(i)];
            std::vector<double> in_p{double(zp[0]), double(zp[1]), double(zp[2])};
            double star_p = std::log(1.0 - ideal_classifier_value(q, prior, zp));
            double mlp_p = std::log(1.0 - mlp_forward(fresh, in_p));
            diffs.push_back((star_q - mlp_q) + (star_p - mlp_p));
        }
        for (double d : diffs) mean_diff += d;
        mean_diff /= m;
        for (double d : diffs) var_acc += (d - mean_diff) * (d - mean_diff);
        double se = std::sqrt(var_acc / (static_cast<double>(m) - 1.0) / m);
        CHECK(mean_diff >= -3.0 * se);
    }
}
