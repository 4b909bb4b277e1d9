#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "qvi/bench.hpp"
#include "qvi/checks.hpp"

namespace {

void add_common_flags(CLI::App* cmd, qvi::ExperimentConfig& config, std::string& method,
                      std::string& cadence) {
    cmd->add_option("--method", method, "Objective: kl or ksd")
        ->check(CLI::IsMember({"kl", "ksd"}));
    cmd->add_option("--update-cadence", cadence,
                    "KL method: Born step after every classifier minibatch or once per epoch")
        ->check(CLI::IsMember({"minibatch", "epoch"}));
    cmd->add_option("--layers", config.layers, "Entangling layers in the ansatz")
        ->check(CLI::NonNegativeNumber);
    cmd->add_option("--epochs", config.epochs, "Training epochs")->check(CLI::NonNegativeNumber);
    cmd->add_option("--lr-born", config.lr_born, "Born machine learning rate");
    cmd->add_option("--lr-mlp", config.lr_mlp, "Classifier learning rate");
    cmd->add_option("--shots", config.shots, "Samples per expectation value");
    cmd->add_option("--samples-per-class", config.samples_per_class,
                    "Classifier dataset size per class, per epoch");
    cmd->add_option("--minibatch", config.minibatch, "Classifier minibatch size");
    cmd->add_option("--mlp-hidden", config.mlp_hidden, "Classifier hidden units");
    cmd->add_option("--seed", config.seed, "Master seed; fixes every random draw");
    cmd->add_flag("--exact-expectations", config.exact_expectations,
                  "Enumerate expectations instead of sampling");
    cmd->add_option("--out", config.out_dir, "Output directory for CSV logs and summary JSON");
    cmd->add_flag("--timing", config.timing,
                  "Record wall time in CSV logs (output no longer byte-reproducible)");
}

qvi::Method parse_method(const std::string& method) {
    return method == "ksd" ? qvi::Method::KSD : qvi::Method::KL;
}

int run_sprinkler_cmd(qvi::ExperimentConfig config) {
    auto result = qvi::run_sprinkler(config);
    std::printf("sprinkler: %d instances, median final TVD %.6f (68%% CI [%.6f, %.6f]), "
                "median initial TVD %.6f, factorized baseline median %.6f\n",
                static_cast<int>(result.instances.size()), result.median_final_tvd,
                result.ci68.lo, result.ci68.hi, result.median_initial_tvd,
                result.baseline_median_tvd);
    return 0;
}

int run_hmm_cmd(qvi::ExperimentConfig config) {
    auto result = qvi::run_hmm(config);
    std::printf("hmm: attempts %d, modes within distance 1: %s\n", result.attempts,
                result.mode_ok ? "yes" : "no");
    for (std::size_t d = 0; d < result.reports.size(); ++d) {
        const auto& rep = result.reports[d];
        std::string tm, lm;
        for (auto b : rep.true_mode) tm.push_back(b ? '1' : '0');
        for (auto b : rep.learned_mode) lm.push_back(b ? '1' : '0');
        std::printf("  x(%zu): true mode %s, learned mode %s (distance %d), TVD %.6f, "
                    "P(z_T+1=1) = %.4f\n",
                    d + 1, tm.c_str(), lm.c_str(), rep.mode_distance, rep.final_tvd,
                    rep.next_regime_estimate);
    }
    return 0;
}

int run_lungcancer_cmd(qvi::ExperimentConfig config) {
    auto result = qvi::run_lungcancer(config);
    std::printf("lungcancer: final TVD %.6f, top-4 overlap %d/4\n", result.final_tvd,
                result.top4_overlap);
    return 0;
}

int report(const qvi::CheckResult& r) {
    std::printf("[%s] %s: %s\n", r.pass ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    return r.pass ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Variational inference over discrete graphical models with a simulated "
                 "quantum Born machine"};
    app.require_subcommand(1);

    qvi::ExperimentConfig sprinkler_cfg;
    std::string sprinkler_method = "kl";
    std::string sprinkler_cadence = "minibatch";
    auto* sprinkler = app.add_subcommand("sprinkler",
                                         "Thirty random sprinkler networks, wet grass observed");
    add_common_flags(sprinkler, sprinkler_cfg, sprinkler_method, sprinkler_cadence);
    sprinkler->add_option("--instances", sprinkler_cfg.instances, "Number of random networks")
        ->check(CLI::PositiveNumber);

    qvi::ExperimentConfig hmm_cfg;
    hmm_cfg.epochs = 3000;
    hmm_cfg.lr_born = 0.006;
    hmm_cfg.mlp_hidden = 24;
    hmm_cfg.layers = 1;
    std::string hmm_method = "kl";
    std::string hmm_cadence = "minibatch";
    auto* hmm = app.add_subcommand("hmm", "Amortized inference on a regime-switching time series");
    add_common_flags(hmm, hmm_cfg, hmm_method, hmm_cadence);
    hmm->add_option("--steps", hmm_cfg.hmm_steps, "Time steps (= qubits)")
        ->check(CLI::PositiveNumber);
    hmm->add_option("--max-reseeds", hmm_cfg.max_reseeds,
                    "Retraining attempts if a posterior mode is off by more than one bit");

    qvi::ExperimentConfig lung_cfg;
    lung_cfg.epochs = 400;
    lung_cfg.shots = 1024;
    lung_cfg.lr_born = 0.003;
    lung_cfg.samples_per_class = 800;
    lung_cfg.mlp_hidden = 10;
    std::string lung_method = "kl";
    std::string lung_cadence = "minibatch";
    auto* lung = app.add_subcommand("lungcancer",
                                    "Lung-cancer network: illness observed, x-ray and dyspnoea negative");
    add_common_flags(lung, lung_cfg, lung_method, lung_cadence);
    lung->add_option("--network", lung_cfg.network_path,
                     "Network JSON file (defaults to the bundled tables)");

    std::uint64_t check_seed = 7;
    auto* stein = app.add_subcommand("stein-check",
                                     "Verify the Stein identity and the KSD zero at the truth");
    stein->add_option("--seed", check_seed, "Seed for the random models");

    auto* grad = app.add_subcommand("grad-check",
                                    "Verify every gradient against central finite differences");
    grad->add_option("--seed", check_seed, "Seed for the random configurations");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sprinkler->parsed()) {
            sprinkler_cfg.method = parse_method(sprinkler_method);
            sprinkler_cfg.update_per_minibatch = sprinkler_cadence == "minibatch";
            return run_sprinkler_cmd(sprinkler_cfg);
        }
        if (hmm->parsed()) {
            hmm_cfg.method = parse_method(hmm_method);
            hmm_cfg.update_per_minibatch = hmm_cadence == "minibatch";
            return run_hmm_cmd(hmm_cfg);
        }
        if (lung->parsed()) {
            lung_cfg.method = parse_method(lung_method);
            lung_cfg.update_per_minibatch = lung_cadence == "minibatch";
            return run_lungcancer_cmd(lung_cfg);
        }
        if (stein->parsed()) {
            int rc = 0;
            rc |= report(qvi::check_stein_identity(check_seed));
            rc |= report(qvi::check_ksd_truth_zero(check_seed));
            return rc;
        }
        if (grad->parsed()) {
            int rc = 0;
            rc |= report(qvi::check_prob_gradients(check_seed));
            rc |= report(qvi::check_classifier_gradients(check_seed));
            rc |= report(qvi::check_kl_gradients(check_seed));
            rc |= report(qvi::check_ksd_gradients(check_seed));
            rc |= report(qvi::check_gradient_zero_sum(check_seed));
            return rc;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
