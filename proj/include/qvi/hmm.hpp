#pragma once

#include <utility>

#include "qvi/bayesnet.hpp"

namespace qvi {

struct GaussianParams {
    double mean = 0.0;
    double stddev = 1.0;
};

double gaussian_log_density(double x, const GaussianParams& g);

// Two-regime hidden Markov model over T time steps. The latent chain is
// Bernoulli: P(z_1 = 1) = init_rate, P(z_t = 1 | z_{t-1} = b) = rate_given[b].
// Each observation x_t is Gaussian with parameters emission[z_t].
class HmmModel : public JointModel {
  public:
    HmmModel(int T, double init_rate, double rate_given_zero, double rate_given_one,
             GaussianParams emission_zero, GaussianParams emission_one);

    int latent_dim() const override { return T_; }
    double log_prior(const BitVector& z) const override;
    double log_likelihood(const Observation& x, const BitVector& z) const override;
    BitVector sample_prior(Rng& rng) const override;

    Observation sample_observation(const BitVector& z, Rng& rng) const;
    std::pair<Observation, BitVector> sample_joint(Rng& rng) const;

    int steps() const { return T_; }
    double init_rate() const { return init_rate_; }
    double rate_given(int bit) const { return bit ? rate_given_one_ : rate_given_zero_; }
    const GaussianParams& emission(int bit) const { return bit ? emission_one_ : emission_zero_; }

  private:
    int T_;
    double init_rate_;
    double rate_given_zero_;
    double rate_given_one_;
    GaussianParams emission_zero_;
    GaussianParams emission_one_;
};

// Emission log-likelihood sum_t log N(x_t; emission[z_t]).
double hmm_log_likelihood(const HmmModel& model, const Observation& x, const BitVector& z);

// Parameter-file schema: {"steps", "init_rate", "rate_given_zero",
// "rate_given_one", "emissions": [{"mean", "stddev"}, {"mean", "stddev"}]}.
HmmModel load_hmm_text(const std::string& json_text);
HmmModel load_hmm_file(const std::string& path);

} // namespace qvi
