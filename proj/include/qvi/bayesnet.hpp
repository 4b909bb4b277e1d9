#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "qvi/rng.hpp"
#include "qvi/types.hpp"

namespace qvi {

// Latent spaces are enumerated for exact posteriors and TVD tracking; these
// are test-time tools, so the cap stays small.
inline constexpr int kEnumerationCap = 20;

// One binary node of a Bayesian network. `cpt` stores full rows,
// cpt[parent_index * 2 + value] = P(node = value | parents), where the
// parent assignment index treats the first listed parent as the most
// significant bit. Rows must sum to 1 and every entry must be positive.
struct BayesNode {
    std::string name;
    std::vector<int> parents; // indices of earlier nodes
    std::vector<double> cpt;
};

struct BayesNet {
    std::string name;
    std::vector<BayesNode> nodes;

    int node_index(const std::string& node_name) const;
};

// Convenience builder: `true_probs[i] = P(node = true | parent assignment i)`,
// the complements are implied.
BayesNode make_node(std::string name, std::vector<int> parents, std::vector<double> true_probs);

// Checks acyclicity (parents listed before children), CPT shapes, row sums
// within 1e-9, and strict positivity of every entry. Throws on violation.
void validate_network(const BayesNet& net);

// Additive smoothing for deterministic tables: adds eps to every CPT entry
// and renormalizes each row.
BayesNet smooth_cpts(const BayesNet& net, double eps = 1e-2);

// Product of CPT entries along the node order. Every node must be assigned.
double joint_probability(const BayesNet& net, const std::map<std::string, bool>& assignment);

// Forward pass: draws each node given its already-sampled parents.
std::map<std::string, bool> ancestral_sample(const BayesNet& net, Rng& rng);
std::map<std::string, bool> ancestral_sample(const BayesNet& net, std::uint64_t seed);

// Parses the network JSON schema:
//   {"name": str, "nodes": [{"name": str, "parents": [str], "cpt": [real]}]}
// where cpt holds P(node=true | parents) ordered by parent-assignment index.
BayesNet load_network_text(const std::string& json_text);
BayesNet load_network_file(const std::string& path);

using Evidence = std::map<std::string, bool>;

// A classical model p(x, z) = p(x|z) p(z) over binary latents z and observed
// values x, with positive joint everywhere. Implementations are immutable
// after construction; all members are safe for concurrent reads.
class JointModel {
  public:
    virtual ~JointModel() = default;

    virtual int latent_dim() const = 0;
    virtual double log_prior(const BitVector& z) const = 0;
    virtual double log_likelihood(const Observation& x, const BitVector& z) const = 0;
    virtual BitVector sample_prior(Rng& rng) const = 0;

    double log_joint(const Observation& x, const BitVector& z) const {
        return log_prior(z) + log_likelihood(x, z);
    }
};

// Bayesian network conditioned on evidence. The latent variables keep their
// network order; the evidence nodes must not be parents of any latent node,
// so the latent prior is the product of the latent CPTs and the likelihood
// is the product of the evidence CPTs.
class BayesNetPosterior : public JointModel {
  public:
    BayesNetPosterior(BayesNet net, Evidence evidence);

    int latent_dim() const override { return static_cast<int>(latent_nodes_.size()); }
    double log_prior(const BitVector& z) const override;
    double log_likelihood(const Observation& x, const BitVector& z) const override;
    BitVector sample_prior(Rng& rng) const override;

    // The conditioned evidence values as 0/1 reals, in evidence-node network
    // order. This is the single point of the data distribution.
    Observation observation() const;

    const BayesNet& network() const { return net_; }
    const std::vector<int>& latent_nodes() const { return latent_nodes_; }

  private:
    double node_log_prob(int node, const std::vector<int>& values) const;
    std::vector<int> full_values(const BitVector& z) const;

    BayesNet net_;
    Evidence evidence_;
    std::vector<int> latent_nodes_;   // network order
    std::vector<int> evidence_value_; // -1 for latent nodes
    std::vector<int> latent_pos_;     // node index -> position in z, or -1
};

// Normalized posterior over all 2^n latent configurations by enumeration.
std::vector<double> exact_posterior(const JointModel& model, const Observation& x,
                                    int enumeration_cap = kEnumerationCap);

// Difference score of the joint, component i = 1 - p(x, flip_i z) / p(x, z).
std::vector<double> difference_score(const JointModel& model, const Observation& x,
                                     const BitVector& z);

} // namespace qvi
