#include "qvi/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "qvi/hmm.hpp"
#include "qvi/models.hpp"

namespace qvi {

namespace {

int hamming_distance(const BitVector& a, const BitVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("bit vectors differ in length");
    int d = 0;
    for (std::size_t i = 0; i < a.size(); ++i) d += (a[i] != b[i]) ? 1 : 0;
    return d;
}

std::string bitstring(const BitVector& z) {
    std::string s;
    s.reserve(z.size());
    for (auto b : z) s.push_back(b ? '1' : '0');
    return s;
}

std::size_t argmax_index(std::span<const double> values) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        if (values[i] > values[best]) best = i;
    }
    return best;
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir + "'");
}

nlohmann::json config_snapshot(const ExperimentConfig& config) {
    nlohmann::json j;
    j["method"] = config.method == Method::KL ? "kl" : "ksd";
    j["layers"] = config.layers;
    j["epochs"] = config.epochs;
    j["lr_born"] = config.lr_born;
    j["lr_mlp"] = config.lr_mlp;
    j["shots"] = config.shots;
    j["samples_per_class"] = config.samples_per_class;
    j["minibatch"] = config.minibatch;
    j["mlp_hidden"] = config.mlp_hidden;
    j["seed"] = config.seed;
    j["exact_expectations"] = config.exact_expectations;
    j["update_cadence"] = config.update_per_minibatch ? "minibatch" : "epoch";
    return j;
}

void write_json_file(const std::string& path, const nlohmann::json& doc) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << doc.dump(2) << '\n';
}

AdvConfig adversarial_config(const ExperimentConfig& config, std::uint64_t seed, bool track) {
    AdvConfig adv;
    adv.epochs = config.epochs;
    adv.lr_born = config.lr_born;
    adv.lr_mlp = config.lr_mlp;
    adv.shots_born = config.shots;
    adv.samples_per_class = config.samples_per_class;
    adv.minibatch = config.minibatch;
    adv.mlp_hidden = config.mlp_hidden;
    adv.seed = seed;
    adv.use_exact_expectations = config.exact_expectations;
    adv.update_per_minibatch = config.update_per_minibatch;
    adv.track_tvd = track;
    adv.track_ideal_classifier = track;
    return adv;
}

KsdConfig ksd_config(const ExperimentConfig& config, std::uint64_t seed, bool track) {
    KsdConfig kc;
    kc.epochs = config.epochs;
    kc.lr_born = config.lr_born;
    kc.shots = config.shots;
    kc.seed = seed;
    kc.use_exact_expectations = config.exact_expectations;
    kc.track_tvd = track;
    return kc;
}

TrainResult train_with_method(const ExperimentConfig& config, BornMachine machine,
                              const JointModel& model, std::span<const Observation> dataset,
                              std::uint64_t seed) {
    if (config.method == Method::KL) {
        return train_adversarial(std::move(machine), model, dataset,
                                 adversarial_config(config, seed, true));
    }
    return train_ksd(std::move(machine), model, dataset, ksd_config(config, seed, true));
}

} // namespace

FactorizedFit best_factorized(std::span<const double> posterior, double grid_step) {
    std::size_t dim = posterior.size();
    int n = 0;
    while ((std::size_t{1} << n) < dim) ++n;
    if (dim < 2 || (std::size_t{1} << n) != dim) {
        throw std::invalid_argument("posterior length must be a power of two");
    }
    if (n > 5) throw std::invalid_argument("factorized search supports at most 5 variables");
    if (!(grid_step > 0.0 && grid_step <= 0.5)) {
        throw std::invalid_argument("grid step must be in (0, 0.5]");
    }

    const int steps = static_cast<int>(std::lround(1.0 / grid_step));
    std::vector<double> grid(static_cast<std::size_t>(steps) + 1);
    for (int i = 0; i <= steps; ++i) grid[static_cast<std::size_t>(i)] = i * grid_step;
    grid.back() = 1.0;

    FactorizedFit best;
    best.tvd = std::numeric_limits<double>::infinity();
    std::vector<int> choice(static_cast<std::size_t>(n), 0);
    std::vector<double> prob(dim);

    for (;;) {
        // Product distribution for the current parameter vector. Bit k of a
        // basis index is variable k (most significant first).
        for (std::size_t idx = 0; idx < dim; ++idx) {
            double p = 1.0;
            for (int k = 0; k < n; ++k) {
                double pk = grid[static_cast<std::size_t>(choice[static_cast<std::size_t>(k)])];
                p *= ((idx >> (n - 1 - k)) & 1u) ? pk : 1.0 - pk;
            }
            prob[idx] = p;
        }
        double dist = 0.0;
        for (std::size_t idx = 0; idx < dim; ++idx) dist += std::abs(posterior[idx] - prob[idx]);
        dist *= 0.5;
        if (dist < best.tvd) {
            best.tvd = dist;
            best.params.assign(static_cast<std::size_t>(n), 0.0);
            for (int k = 0; k < n; ++k) {
                best.params[static_cast<std::size_t>(k)] =
                    grid[static_cast<std::size_t>(choice[static_cast<std::size_t>(k)])];
            }
        }
        // Odometer in lexicographic order so ties keep the smallest vector.
        int k = n - 1;
        while (k >= 0 && choice[static_cast<std::size_t>(k)] == steps) {
            choice[static_cast<std::size_t>(k)] = 0;
            --k;
        }
        if (k < 0) break;
        ++choice[static_cast<std::size_t>(k)];
    }
    return best;
}

std::vector<std::size_t> top_indices(std::span<const double> probs, int k) {
    std::vector<std::size_t> order(probs.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&probs](std::size_t a, std::size_t b) {
        if (probs[a] != probs[b]) return probs[a] > probs[b];
        return a < b;
    });
    if (k > 0 && static_cast<std::size_t>(k) < order.size()) order.resize(static_cast<std::size_t>(k));
    return order;
}

void write_histogram_csv(const std::string& path, std::span<const double> p_true,
                         std::span<const double> q_learned, int top_k) {
    if (p_true.size() != q_learned.size()) {
        throw std::invalid_argument("histogram inputs differ in length");
    }
    int n = 0;
    while ((std::size_t{1} << n) < p_true.size()) ++n;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write '" + path + "'");
    out << "basis_index,bitstring,p_true,q_learned\n";
    for (auto idx : top_indices(p_true, top_k)) {
        out << idx << ',' << bitstring(bits_of(idx, n)) << ',' << format_double(p_true[idx])
            << ',' << format_double(q_learned[idx]) << '\n';
    }
}

SprinklerResult run_sprinkler(const ExperimentConfig& config) {
    if (config.instances <= 0) throw std::invalid_argument("instance count must be positive");

    auto run_instance = [&config](int i) {
        InstanceResult r;
        r.instance = i;
        r.net_seed = derive_seed(config.seed, 0x100u + static_cast<std::uint64_t>(i));
        BayesNetPosterior model(models::random_sprinkler(r.net_seed),
                                models::sprinkler_evidence());
        Observation x = model.observation();
        auto posterior = exact_posterior(model, x);
        r.baseline_tvd = best_factorized(posterior).tvd;

        AnsatzSpec spec{model.latent_dim(), config.layers, Encoding::HadamardPrep};
        auto machine =
            init_machine(spec, derive_seed(config.seed, 0x200u + static_cast<std::uint64_t>(i)));
        r.initial_tvd = tvd(posterior, exact_distribution(machine, x));

        const Observation dataset[] = {x};
        auto trained =
            train_with_method(config, std::move(machine), model, dataset,
                              derive_seed(config.seed, 0x300u + static_cast<std::uint64_t>(i)));
        r.final_tvd = tvd(posterior, exact_distribution(trained.final_machine, x));
        r.best_loss = trained.best_loss;
        r.logs = std::move(trained.logs);
        return r;
    };

    SprinklerResult result;
    std::vector<std::future<InstanceResult>> futures;
    futures.reserve(static_cast<std::size_t>(config.instances));
    for (int i = 0; i < config.instances; ++i) {
        futures.push_back(std::async(std::launch::async, run_instance, i));
    }
    for (auto& f : futures) result.instances.push_back(f.get());

    std::vector<double> finals, initials, baselines;
    for (const auto& inst : result.instances) {
        finals.push_back(inst.final_tvd);
        initials.push_back(inst.initial_tvd);
        baselines.push_back(inst.baseline_tvd);
    }
    result.median_final_tvd = median(finals);
    result.median_initial_tvd = median(initials);
    result.baseline_median_tvd = median(baselines);
    result.ci68 = bootstrap_median_ci(finals, 10000, derive_seed(config.seed, 0xB007u));

    if (!config.out_dir.empty()) {
        ensure_dir(config.out_dir);
        for (const auto& inst : result.instances) {
            char name[32];
            std::snprintf(name, sizeof(name), "instance_%03d.csv", inst.instance);
            write_epoch_csv_file(config.out_dir + "/" + name, inst.logs, config.timing);
        }
        nlohmann::json doc;
        doc["config"] = config_snapshot(config);
        doc["config"]["instances"] = config.instances;
        doc["median_tvd_final"] = result.median_final_tvd;
        doc["median_tvd_initial"] = result.median_initial_tvd;
        doc["ci68"] = {result.ci68.lo, result.ci68.hi};
        doc["baseline_median_tvd"] = result.baseline_median_tvd;
        auto& per = doc["per_instance"];
        per = nlohmann::json::array();
        for (const auto& inst : result.instances) {
            per.push_back({{"instance", inst.instance},
                           {"net_seed", inst.net_seed},
                           {"initial_tvd", inst.initial_tvd},
                           {"final_tvd", inst.final_tvd},
                           {"baseline_tvd", inst.baseline_tvd},
                           {"best_loss", inst.best_loss}});
        }
        write_json_file(config.out_dir + "/summary.json", doc);
    }
    return result;
}

HmmResult run_hmm(const ExperimentConfig& config) {
    HmmModel model = models::default_hmm(config.hmm_steps);
    const int T = model.steps();

    // The two conditioning time series, drawn once from the joint.
    Rng data_rng(derive_seed(config.seed, 1));
    std::vector<Observation> dataset;
    for (int i = 0; i < 2; ++i) dataset.push_back(model.sample_joint(data_rng).first);

    std::vector<std::vector<double>> posteriors;
    std::vector<BitVector> true_modes;
    for (const auto& x : dataset) {
        posteriors.push_back(exact_posterior(model, x));
        true_modes.push_back(bits_of(argmax_index(posteriors.back()), T));
    }

    HmmResult result;
    AnsatzSpec spec{T, config.layers, Encoding::AngleEncoding};
    for (int attempt = 0; attempt <= config.max_reseeds; ++attempt) {
        result.attempts = attempt + 1;
        auto machine = init_machine(
            spec, derive_seed(config.seed, 0x500u + static_cast<std::uint64_t>(attempt)));
        auto trained =
            train_with_method(config, std::move(machine), model, dataset,
                              derive_seed(config.seed, 0x600u + static_cast<std::uint64_t>(attempt)));

        result.reports.clear();
        bool all_close = true;
        for (std::size_t d = 0; d < dataset.size(); ++d) {
            HmmObservationReport rep;
            rep.x = dataset[d];
            rep.true_mode = true_modes[d];
            auto learned = exact_distribution(trained.best_machine, dataset[d]);
            rep.learned_mode = bits_of(argmax_index(learned), T);
            rep.mode_distance = hamming_distance(rep.true_mode, rep.learned_mode);
            rep.final_tvd = tvd(posteriors[d], learned);
            auto samples = born_sample(trained.best_machine, dataset[d], 10000,
                                       derive_seed(config.seed, 0x700u + d));
            double acc = 0.0;
            for (const auto& z : samples) acc += model.rate_given(z.back());
            rep.next_regime_estimate = acc / static_cast<double>(samples.size());
            all_close = all_close && rep.mode_distance <= 1;
            result.reports.push_back(std::move(rep));
        }
        result.logs = std::move(trained.logs);
        result.machine = std::move(trained.best_machine);
        result.mode_ok = all_close;
        if (all_close) break;
    }

    if (!config.out_dir.empty()) {
        ensure_dir(config.out_dir);
        write_epoch_csv_file(config.out_dir + "/epochs.csv", result.logs, config.timing);
        for (std::size_t d = 0; d < dataset.size(); ++d) {
            auto learned = exact_distribution(result.machine, dataset[d]);
            write_histogram_csv(config.out_dir + "/histogram_x" + std::to_string(d + 1) + ".csv",
                                posteriors[d], learned, 10);
        }
        save_checkpoint({result.machine, config.seed, config.epochs},
                        config.out_dir + "/checkpoint.json");
        nlohmann::json doc;
        doc["config"] = config_snapshot(config);
        doc["config"]["hmm_steps"] = config.hmm_steps;
        doc["config"]["max_reseeds"] = config.max_reseeds;
        doc["attempts"] = result.attempts;
        doc["mode_ok"] = result.mode_ok;
        auto& per = doc["per_observation"];
        per = nlohmann::json::array();
        for (const auto& rep : result.reports) {
            per.push_back({{"x", rep.x.values},
                           {"true_mode", bitstring(rep.true_mode)},
                           {"learned_mode", bitstring(rep.learned_mode)},
                           {"mode_distance", rep.mode_distance},
                           {"final_tvd", rep.final_tvd},
                           {"next_regime_estimate", rep.next_regime_estimate}});
        }
        write_json_file(config.out_dir + "/summary.json", doc);
    }
    return result;
}

LungCancerResult run_lungcancer(const ExperimentConfig& config) {
    BayesNet net = config.network_path.empty() ? models::lung_cancer()
                                               : load_network_file(config.network_path);
    BayesNetPosterior model(std::move(net), models::lung_cancer_evidence());
    Observation x = model.observation();
    auto posterior = exact_posterior(model, x);

    AnsatzSpec spec{model.latent_dim(), config.layers, Encoding::HadamardPrep};
    auto machine = init_machine(spec, derive_seed(config.seed, 2));
    const Observation dataset[] = {x};
    auto trained = train_with_method(config, std::move(machine), model, dataset,
                                     derive_seed(config.seed, 3));

    LungCancerResult result;
    result.true_posterior = posterior;
    result.learned = exact_distribution(trained.best_machine, x);
    result.final_tvd = tvd(posterior, result.learned);
    auto top_true = top_indices(posterior, 4);
    auto top_learned = top_indices(result.learned, 4);
    for (auto t : top_true) {
        if (std::find(top_learned.begin(), top_learned.end(), t) != top_learned.end()) {
            ++result.top4_overlap;
        }
    }
    result.logs = std::move(trained.logs);
    result.machine = std::move(trained.best_machine);

    if (!config.out_dir.empty()) {
        ensure_dir(config.out_dir);
        write_epoch_csv_file(config.out_dir + "/epochs.csv", result.logs, config.timing);
        write_histogram_csv(config.out_dir + "/histogram.csv", result.true_posterior,
                            result.learned);
        save_checkpoint({result.machine, config.seed, config.epochs},
                        config.out_dir + "/checkpoint.json");
        nlohmann::json doc;
        doc["config"] = config_snapshot(config);
        doc["final_tvd"] = result.final_tvd;
        doc["top4_overlap"] = result.top4_overlap;
        write_json_file(config.out_dir + "/summary.json", doc);
    }
    return result;
}

} // namespace qvi
