#include "qvi/hmm.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qvi {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
}

double gaussian_log_density(double x, const GaussianParams& g) {
    double u = (x - g.mean) / g.stddev;
    return -0.5 * kLogTwoPi - std::log(g.stddev) - 0.5 * u * u;
}

HmmModel::HmmModel(int T, double init_rate, double rate_given_zero, double rate_given_one,
                   GaussianParams emission_zero, GaussianParams emission_one)
    : T_(T), init_rate_(init_rate), rate_given_zero_(rate_given_zero),
      rate_given_one_(rate_given_one), emission_zero_(emission_zero),
      emission_one_(emission_one) {
    if (T <= 0) throw std::invalid_argument("time steps must be positive");
    auto in_unit = [](double r) { return r > 0.0 && r < 1.0; };
    if (!in_unit(init_rate) || !in_unit(rate_given_zero) || !in_unit(rate_given_one)) {
        throw std::invalid_argument("Bernoulli rates must lie in (0, 1)");
    }
    if (!(emission_zero_.stddev > 0.0) || !(emission_one_.stddev > 0.0)) {
        throw std::invalid_argument("emission standard deviations must be positive");
    }
}

double HmmModel::log_prior(const BitVector& z) const {
    if (static_cast<int>(z.size()) != T_) throw std::invalid_argument("latent length mismatch");
    auto log_bern = [](double rate, int bit) { return std::log(bit ? rate : 1.0 - rate); };
    double acc = log_bern(init_rate_, z[0]);
    for (int t = 1; t < T_; ++t) acc += log_bern(rate_given(z[t - 1]), z[t]);
    return acc;
}

double HmmModel::log_likelihood(const Observation& x, const BitVector& z) const {
    if (static_cast<int>(x.values.size()) != T_ || static_cast<int>(z.size()) != T_) {
        throw std::invalid_argument("observation/latent length mismatch");
    }
    double acc = 0.0;
    for (int t = 0; t < T_; ++t) acc += gaussian_log_density(x.values[t], emission(z[t]));
    return acc;
}

BitVector HmmModel::sample_prior(Rng& rng) const {
    BitVector z(static_cast<std::size_t>(T_));
    z[0] = rng.bernoulli(init_rate_) ? 1 : 0;
    for (int t = 1; t < T_; ++t) z[t] = rng.bernoulli(rate_given(z[t - 1])) ? 1 : 0;
    return z;
}

Observation HmmModel::sample_observation(const BitVector& z, Rng& rng) const {
    if (static_cast<int>(z.size()) != T_) throw std::invalid_argument("latent length mismatch");
    Observation x;
    x.values.reserve(z.size());
    for (int t = 0; t < T_; ++t) {
        const auto& g = emission(z[t]);
        x.values.push_back(rng.normal(g.mean, g.stddev));
    }
    return x;
}

std::pair<Observation, BitVector> HmmModel::sample_joint(Rng& rng) const {
    BitVector z = sample_prior(rng);
    Observation x = sample_observation(z, rng);
    return {std::move(x), std::move(z)};
}

double hmm_log_likelihood(const HmmModel& model, const Observation& x, const BitVector& z) {
    return model.log_likelihood(x, z);
}

HmmModel load_hmm_text(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("model JSON parse error: ") + e.what());
    }
    const auto& em = doc.at("emissions");
    if (!em.is_array() || em.size() != 2) {
        throw std::invalid_argument("'emissions' must list the two regimes");
    }
    auto gaussian = [](const nlohmann::json& j) {
        return GaussianParams{j.at("mean").get<double>(), j.at("stddev").get<double>()};
    };
    return HmmModel(doc.at("steps").get<int>(), doc.at("init_rate").get<double>(),
                    doc.at("rate_given_zero").get<double>(),
                    doc.at("rate_given_one").get<double>(), gaussian(em[0]), gaussian(em[1]));
}

HmmModel load_hmm_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open model file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_hmm_text(buf.str());
}

} // namespace qvi
