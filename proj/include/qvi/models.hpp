#pragma once

#include "qvi/bayesnet.hpp"
#include "qvi/hmm.hpp"

namespace qvi::models {

// Sprinkler network (Cloudy, Sprinkler, Rain, Wet grass) with every
// P(node = true | parents) drawn from U([0.01, 0.99]), one independent draw
// per CPT row.
BayesNet random_sprinkler(std::uint64_t seed);

// A fixed sprinkler instance with textbook-flavored probabilities, clipped
// to keep every entry positive. Matches data/sprinkler.json.
BayesNet sprinkler_example();

// The eight-node lung-cancer ("Asia") network with the smoothed probability
// tables. Matches data/lungcancer.json.
BayesNet lung_cancer();

// Regime-switching model: T steps, uniform start,
// P(z_t=1 | z_{t-1}=0) = 1/3, P(z_t=1 | z_{t-1}=1) = 2/3,
// emissions N(0, 1) for regime 0 and N(1, 1/2) for regime 1.
HmmModel default_hmm(int T = 8);

Evidence sprinkler_evidence();   // grass wet
Evidence lung_cancer_evidence(); // X = false, D = false, I = true

} // namespace qvi::models
