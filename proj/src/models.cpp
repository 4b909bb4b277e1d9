#include "qvi/models.hpp"

namespace qvi::models {

BayesNet random_sprinkler(std::uint64_t seed) {
    Rng rng(seed);
    auto row = [&rng] { return rng.uniform(0.01, 0.99); };
    BayesNet net;
    net.name = "sprinkler";
    net.nodes.push_back(make_node("C", {}, {row()}));
    net.nodes.push_back(make_node("S", {0}, {row(), row()}));
    net.nodes.push_back(make_node("R", {0}, {row(), row()}));
    net.nodes.push_back(make_node("W", {1, 2}, {row(), row(), row(), row()}));
    validate_network(net);
    return net;
}

BayesNet sprinkler_example() {
    BayesNet net;
    net.name = "sprinkler";
    net.nodes.push_back(make_node("C", {}, {0.5}));
    net.nodes.push_back(make_node("S", {0}, {0.5, 0.1}));
    net.nodes.push_back(make_node("R", {0}, {0.2, 0.8}));
    net.nodes.push_back(make_node("W", {1, 2}, {0.01, 0.9, 0.9, 0.99}));
    validate_network(net);
    return net;
}

BayesNet lung_cancer() {
    BayesNet net;
    net.name = "lung-cancer";
    // Node order: A, S, T, L, B, I, X, D. Parent rows are indexed with the
    // first listed parent as the most significant bit.
    net.nodes.push_back(make_node("A", {}, {0.01}));
    net.nodes.push_back(make_node("S", {}, {0.5}));
    net.nodes.push_back(make_node("T", {0}, {0.01, 0.05}));
    net.nodes.push_back(make_node("L", {1}, {0.01, 0.1}));
    net.nodes.push_back(make_node("B", {1}, {0.3, 0.6}));
    net.nodes.push_back(make_node("I", {2, 3}, {0.05, 0.95, 0.95, 0.95}));
    net.nodes.push_back(make_node("X", {5}, {0.05, 0.98}));
    net.nodes.push_back(make_node("D", {4, 5}, {0.1, 0.7, 0.8, 0.9}));
    validate_network(net);
    return net;
}

HmmModel default_hmm(int T) {
    return HmmModel(T, 0.5, 1.0 / 3.0, 2.0 / 3.0, GaussianParams{0.0, 1.0},
                    GaussianParams{1.0, 0.5});
}

Evidence sprinkler_evidence() { return {{"W", true}}; }

Evidence lung_cancer_evidence() { return {{"X", false}, {"D", false}, {"I", true}}; }

} // namespace qvi::models
