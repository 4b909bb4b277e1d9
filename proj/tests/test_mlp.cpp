#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "qvi/checks.hpp"
#include "qvi/mlp.hpp"
#include "qvi/rng.hpp"

using namespace qvi;

TEST_CASE("forward pass") {
    SUBCASE("all-zero parameters output 0.5 everywhere") {
        Mlp mlp;
        mlp.in_dim = 3;
        mlp.hidden_dim = 4;
        mlp.w1.assign(12, 0.0);
        mlp.b1.assign(4, 0.0);
        mlp.w2.assign(4, 0.0);
        std::vector<double> input{0.2, -1.0, 4.0};
        CHECK(mlp_forward(mlp, input) == doctest::Approx(0.5));
        CHECK(mlp_logit(mlp, input) == doctest::Approx(0.0));
    }
    SUBCASE("hand-computed 2-2-1 network") {
        Mlp mlp;
        mlp.in_dim = 2;
        mlp.hidden_dim = 2;
        mlp.w1 = {1.0, -2.0, 0.5, 0.25};
        mlp.b1 = {0.1, -0.2};
        mlp.w2 = {2.0, -1.0};
        mlp.b2 = 0.3;
        std::vector<double> input{1.0, 2.0};
        // u = (1 - 4 + 0.1, 0.5 + 0.5 - 0.2) = (-2.9, 0.8); relu = (0, 0.8)
        // a = 2*0 - 1*0.8 + 0.3 = -0.5
        CHECK(mlp_logit(mlp, input) == doctest::Approx(-0.5).epsilon(1e-12));
        CHECK(mlp_forward(mlp, input) ==
              doctest::Approx(1.0 / (1.0 + std::exp(0.5))).epsilon(1e-12));
    }
    SUBCASE("output stays strictly inside (0, 1)") {
        Mlp mlp = init_mlp(2, 3, 1);
        mlp.b2 = 500.0;
        std::vector<double> input{0.0, 0.0};
        double d = mlp_forward(mlp, input);
        CHECK(d > 0.0);
        CHECK(d <= 1.0);
        CHECK(mlp_logit(mlp, input) == doctest::Approx(500.0));
    }
    SUBCASE("logit agrees with log(d / (1 - d)) away from saturation") {
        Mlp mlp = init_mlp(3, 5, 2);
        Rng rng(3);
        for (int t = 0; t < 50; ++t) {
            std::vector<double> input{rng.normal(0.0, 1.0), rng.normal(0.0, 1.0),
                                      rng.normal(0.0, 1.0)};
            double d = mlp_forward(mlp, input);
            if (d < 1e-6 || d > 1.0 - 1e-6) continue;
            CHECK(std::abs(mlp_logit(mlp, input) - std::log(d / (1.0 - d))) < 1e-9);
        }
    }
    SUBCASE("dimension mismatch") {
        Mlp mlp = init_mlp(3, 2, 1);
        std::vector<double> input{1.0};
        CHECK_THROWS_AS(mlp_forward(mlp, input), std::invalid_argument);
    }
}

TEST_CASE("training") {
    SUBCASE("separated classes: objective increases over the first steps") {
        Rng rng(14);
        LabeledBatch batch;
        for (int i = 0; i < 20; ++i) {
            double center = i % 2 ? 2.0 : -2.0;
            batch.inputs.push_back({center + rng.normal(0.0, 0.3), center + rng.normal(0.0, 0.3)});
            batch.labels.push_back(i % 2);
        }
        Mlp mlp = init_mlp(2, 4, 7);
        double prev = classifier_objective(mlp, batch);
        for (int step = 0; step < 10; ++step) {
            mlp = train_step(mlp, batch, 0.1);
            double now = classifier_objective(mlp, batch);
            CHECK(now >= prev - 1e-12);
            prev = now;
        }
    }
    SUBCASE("identical class distributions converge to d = 1/2") {
        Rng rng(25);
        std::vector<std::vector<double>> pool;
        for (int i = 0; i < 40; ++i) pool.push_back({rng.normal(0.0, 1.0), rng.normal(0.0, 1.0)});
        LabeledBatch batch;
        for (int i = 0; i < 40; ++i) {
            batch.inputs.push_back(pool[static_cast<std::size_t>(i)]);
            batch.labels.push_back(0);
            batch.inputs.push_back(pool[static_cast<std::size_t>(i)]);
            batch.labels.push_back(1);
        }
        Mlp mlp = init_mlp(2, 4, 9);
        for (int step = 0; step < 400; ++step) mlp = train_step(mlp, batch, 0.05);
        for (const auto& input : pool) {
            CHECK(std::abs(mlp_forward(mlp, input) - 0.5) < 0.05);
        }
        CHECK(classifier_objective(mlp, batch) ==
              doctest::Approx(2.0 * std::log(0.5)).epsilon(0.01));
    }
    SUBCASE("backpropagation matches finite differences") {
        auto r = check_classifier_gradients(33, 100, 1e-5);
        INFO(r.detail);
        CHECK(r.pass);
    }
    SUBCASE("fixed seed gives an identical trajectory") {
        Rng rng(50);
        LabeledBatch batch;
        for (int i = 0; i < 12; ++i) {
            batch.inputs.push_back({rng.normal(0.0, 1.0)});
            batch.labels.push_back(i % 2);
        }
        Mlp a = init_mlp(1, 3, 4);
        Mlp b = init_mlp(1, 3, 4);
        for (int step = 0; step < 5; ++step) {
            a = train_step(a, batch, 0.02);
            b = train_step(b, batch, 0.02);
        }
        CHECK(mlp_params(a) == mlp_params(b));
    }
}

TEST_CASE("ideal classifier") {
    std::vector<double> q{0.3, 0.7};
    std::vector<double> p{0.1, 0.9};
    CHECK(ideal_classifier_value(q, q, {0}) == doctest::Approx(0.5));
    CHECK(ideal_classifier_value(q, p, {0}) == doctest::Approx(0.75));
    double d = ideal_classifier_value(q, p, {1});
    CHECK(std::log(d / (1.0 - d)) == doctest::Approx(std::log(0.7 / 0.9)).epsilon(1e-12));
    std::vector<double> zeros{0.0, 1.0};
    CHECK_THROWS_AS(ideal_classifier_value(zeros, zeros, {0}), std::invalid_argument);
}
