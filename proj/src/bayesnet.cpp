#include "qvi/bayesnet.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace qvi {

int BayesNet::node_index(const std::string& node_name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i].name == node_name) return static_cast<int>(i);
    }
    return -1;
}

BayesNode make_node(std::string name, std::vector<int> parents, std::vector<double> true_probs) {
    BayesNode node;
    node.name = std::move(name);
    node.parents = std::move(parents);
    node.cpt.resize(true_probs.size() * 2);
    for (std::size_t row = 0; row < true_probs.size(); ++row) {
        node.cpt[row * 2 + 0] = 1.0 - true_probs[row];
        node.cpt[row * 2 + 1] = true_probs[row];
    }
    return node;
}

void validate_network(const BayesNet& net) {
    if (net.nodes.empty()) throw std::invalid_argument("network has no nodes");
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const auto& node = net.nodes[i];
        for (std::size_t j = 0; j < i; ++j) {
            if (net.nodes[j].name == node.name) {
                throw std::invalid_argument("duplicate node name '" + node.name + "'");
            }
        }
        for (int p : node.parents) {
            if (p < 0 || static_cast<std::size_t>(p) >= i) {
                throw std::invalid_argument("node '" + node.name +
                                            "' has a parent that is not an earlier node; the "
                                            "node list must be a topological order (no cycles)");
            }
        }
        const std::size_t rows = std::size_t{1} << node.parents.size();
        if (node.cpt.size() != rows * 2) {
            throw std::invalid_argument("node '" + node.name + "' CPT has " +
                                        std::to_string(node.cpt.size()) + " entries, expected " +
                                        std::to_string(rows * 2));
        }
        for (std::size_t row = 0; row < rows; ++row) {
            double p0 = node.cpt[row * 2 + 0];
            double p1 = node.cpt[row * 2 + 1];
            if (!(p0 > 0.0) || !(p1 > 0.0)) {
                throw std::invalid_argument("node '" + node.name +
                                            "' has a nonpositive CPT entry; all conditional "
                                            "probabilities must be strictly positive");
            }
            if (std::abs(p0 + p1 - 1.0) > 1e-9) {
                throw std::invalid_argument("node '" + node.name + "' CPT row " +
                                            std::to_string(row) + " sums to " +
                                            std::to_string(p0 + p1) + ", expected 1");
            }
        }
    }
}

BayesNet smooth_cpts(const BayesNet& net, double eps) {
    if (!(eps > 0.0)) throw std::invalid_argument("smoothing eps must be positive");
    BayesNet out = net;
    for (auto& node : out.nodes) {
        for (std::size_t row = 0; row * 2 < node.cpt.size(); ++row) {
            double p0 = node.cpt[row * 2 + 0] + eps;
            double p1 = node.cpt[row * 2 + 1] + eps;
            node.cpt[row * 2 + 0] = p0 / (p0 + p1);
            node.cpt[row * 2 + 1] = p1 / (p0 + p1);
        }
    }
    return out;
}

namespace {

std::size_t parent_assignment_index(const BayesNode& node, const std::vector<int>& values) {
    std::size_t idx = 0;
    for (int p : node.parents) idx = (idx << 1) | static_cast<std::size_t>(values[p] & 1);
    return idx;
}

} // namespace

double joint_probability(const BayesNet& net, const std::map<std::string, bool>& assignment) {
    std::vector<int> values(net.nodes.size());
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        auto it = assignment.find(net.nodes[i].name);
        if (it == assignment.end()) {
            throw std::invalid_argument("missing assignment for node '" + net.nodes[i].name + "'");
        }
        values[i] = it->second ? 1 : 0;
    }
    double prob = 1.0;
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const auto& node = net.nodes[i];
        prob *= node.cpt[parent_assignment_index(node, values) * 2 + values[i]];
    }
    return prob;
}

std::map<std::string, bool> ancestral_sample(const BayesNet& net, Rng& rng) {
    std::vector<int> values(net.nodes.size());
    std::map<std::string, bool> out;
    for (std::size_t i = 0; i < net.nodes.size(); ++i) {
        const auto& node = net.nodes[i];
        double p_true = node.cpt[parent_assignment_index(node, values) * 2 + 1];
        values[i] = rng.bernoulli(p_true) ? 1 : 0;
        out[node.name] = values[i] != 0;
    }
    return out;
}

std::map<std::string, bool> ancestral_sample(const BayesNet& net, std::uint64_t seed) {
    Rng rng(seed);
    return ancestral_sample(net, rng);
}

BayesNet load_network_text(const std::string& json_text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(json_text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("network JSON parse error: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("nodes") || !doc["nodes"].is_array()) {
        throw std::invalid_argument("network JSON must be an object with a 'nodes' array");
    }
    BayesNet net;
    net.name = doc.value("name", std::string{});
    for (const auto& jnode : doc["nodes"]) {
        if (!jnode.contains("name") || !jnode["name"].is_string() || !jnode.contains("cpt") ||
            !jnode["cpt"].is_array()) {
            throw std::invalid_argument("each node needs a 'name' string and a 'cpt' array");
        }
        std::vector<int> parents;
        if (jnode.contains("parents")) {
            for (const auto& jparent : jnode["parents"]) {
                int idx = net.node_index(jparent.get<std::string>());
                if (idx < 0) {
                    throw std::invalid_argument(
                        "node '" + jnode["name"].get<std::string>() + "' references parent '" +
                        jparent.get<std::string>() +
                        "' that is not an earlier node; the node list must be a topological "
                        "order (no cycles)");
                }
                parents.push_back(idx);
            }
        }
        std::vector<double> true_probs;
        for (const auto& v : jnode["cpt"]) {
            if (!v.is_number()) throw std::invalid_argument("CPT entries must be numbers");
            true_probs.push_back(v.get<double>());
        }
        net.nodes.push_back(make_node(jnode["name"].get<std::string>(), std::move(parents),
                                      std::move(true_probs)));
    }
    validate_network(net);
    return net;
}

BayesNet load_network_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open network file '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_network_text(buf.str());
}

BayesNetPosterior::BayesNetPosterior(BayesNet net, Evidence evidence)
    : net_(std::move(net)), evidence_(std::move(evidence)) {
    validate_network(net_);
    evidence_value_.assign(net_.nodes.size(), -1);
    latent_pos_.assign(net_.nodes.size(), -1);
    for (const auto& [name, value] : evidence_) {
        int idx = net_.node_index(name);
        if (idx < 0) throw std::invalid_argument("evidence node '" + name + "' not in network");
        evidence_value_[idx] = value ? 1 : 0;
    }
    for (std::size_t i = 0; i < net_.nodes.size(); ++i) {
        if (evidence_value_[i] >= 0) continue;
        latent_pos_[i] = static_cast<int>(latent_nodes_.size());
        latent_nodes_.push_back(static_cast<int>(i));
    }
    if (latent_nodes_.empty()) throw std::invalid_argument("no latent variables left");
    // The latent prior factorizes only if no evidence node feeds a latent one.
    for (int node : latent_nodes_) {
        for (int p : net_.nodes[node].parents) {
            if (evidence_value_[p] >= 0) {
                throw std::invalid_argument("evidence node '" + net_.nodes[p].name +
                                            "' is a parent of latent node '" +
                                            net_.nodes[node].name + "'; conditioning requires "
                                            "latent variables to form an ancestral set");
            }
        }
    }
}

std::vector<int> BayesNetPosterior::full_values(const BitVector& z) const {
    if (z.size() != latent_nodes_.size()) {
        throw std::invalid_argument("latent assignment has wrong length");
    }
    std::vector<int> values(net_.nodes.size());
    for (std::size_t i = 0; i < net_.nodes.size(); ++i) {
        values[i] = evidence_value_[i] >= 0 ? evidence_value_[i]
                                            : static_cast<int>(z[latent_pos_[i]]);
    }
    return values;
}

double BayesNetPosterior::node_log_prob(int node, const std::vector<int>& values) const {
    const auto& n = net_.nodes[node];
    return std::log(n.cpt[parent_assignment_index(n, values) * 2 + values[node]]);
}

double BayesNetPosterior::log_prior(const BitVector& z) const {
    auto values = full_values(z);
    double acc = 0.0;
    for (int node : latent_nodes_) acc += node_log_prob(node, values);
    return acc;
}

double BayesNetPosterior::log_likelihood(const Observation&, const BitVector& z) const {
    auto values = full_values(z);
    double acc = 0.0;
    for (std::size_t i = 0; i < net_.nodes.size(); ++i) {
        if (evidence_value_[i] >= 0) acc += node_log_prob(static_cast<int>(i), values);
    }
    return acc;
}

BitVector BayesNetPosterior::sample_prior(Rng& rng) const {
    std::vector<int> values(net_.nodes.size());
    BitVector z(latent_nodes_.size());
    for (int node : latent_nodes_) {
        const auto& n = net_.nodes[node];
        double p_true = n.cpt[parent_assignment_index(n, values) * 2 + 1];
        values[node] = rng.bernoulli(p_true) ? 1 : 0;
        z[latent_pos_[node]] = static_cast<std::uint8_t>(values[node]);
    }
    return z;
}

Observation BayesNetPosterior::observation() const {
    Observation x;
    for (std::size_t i = 0; i < net_.nodes.size(); ++i) {
        if (evidence_value_[i] >= 0) x.values.push_back(static_cast<double>(evidence_value_[i]));
    }
    return x;
}

std::vector<double> exact_posterior(const JointModel& model, const Observation& x,
                                    int enumeration_cap) {
    const int n = model.latent_dim();
    if (n > enumeration_cap) {
        throw std::invalid_argument("latent dimension " + std::to_string(n) +
                                    " exceeds enumeration cap " + std::to_string(enumeration_cap));
    }
    const std::size_t dim = std::size_t{1} << n;
    std::vector<double> log_joint(dim);
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t idx = 0; idx < dim; ++idx) {
        log_joint[idx] = model.log_joint(x, bits_of(idx, n));
        max_log = std::max(max_log, log_joint[idx]);
    }
    double total = 0.0;
    std::vector<double> posterior(dim);
    for (std::size_t idx = 0; idx < dim; ++idx) {
        posterior[idx] = std::exp(log_joint[idx] - max_log);
        total += posterior[idx];
    }
    for (auto& p : posterior) p /= total;
    return posterior;
}

std::vector<double> difference_score(const JointModel& model, const Observation& x,
                                     const BitVector& z) {
    const double base = model.log_joint(x, z);
    if (!std::isfinite(base)) throw std::runtime_error("log joint is not finite");
    std::vector<double> score(z.size());
    for (std::size_t i = 0; i < z.size(); ++i) {
        double flipped = model.log_joint(x, flip_bit(z, i));
        if (!std::isfinite(flipped)) throw std::runtime_error("log joint is not finite");
        score[i] = 1.0 - std::exp(flipped - base);
    }
    return score;
}

} // namespace qvi
