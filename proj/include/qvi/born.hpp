#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "qvi/statevector.hpp"
#include "qvi/types.hpp"

namespace qvi {

enum class Encoding { HadamardPrep, AngleEncoding };

// Hardware-efficient ansatz: the encoding layer S(x), a rotation layer, then
// `layers` repetitions of [linear CZ chain; rotation layer]. Each rotation
// layer applies RotX then RotZ on every qubit in index order, each with its
// own angle, so the parameter count is 2 * n_qubits * (layers + 1).
struct AnsatzSpec {
    int n_qubits = 1;
    int layers = 0;
    Encoding encoding = Encoding::HadamardPrep;

    int param_count() const { return 2 * n_qubits * (layers + 1); }
};

// The variational family: q_theta(z|x) is the outcome distribution of the
// ansatz circuit. A BornMachine is a value; training produces new ones.
struct BornMachine {
    AnsatzSpec spec;
    std::vector<double> theta;
};

// Fresh machine with angles drawn from N(0, 0.01^2): approximately zero
// without sitting exactly on the symmetric initial point.
BornMachine init_machine(const AnsatzSpec& spec, std::uint64_t seed);

Circuit build_circuit(const BornMachine& machine, const Observation& x);

// q_theta(.|x) over all 2^n outcomes, by dense simulation.
std::vector<double> exact_distribution(const BornMachine& machine, const Observation& x);

std::vector<BitVector> born_sample(const BornMachine& machine, const Observation& x, int shots,
                                   std::uint64_t seed);

// Copies with theta_j shifted by +pi/2 and -pi/2.
std::pair<BornMachine, BornMachine> shifted_machines(const BornMachine& machine, int j);

// Exact derivative of q_theta(z|x) with respect to theta_j: half the
// difference of the outcome probabilities at the two shifted machines.
double prob_gradient(const BornMachine& machine, const Observation& x, const BitVector& z, int j);

// Outcome distributions of every (theta_j + pi/2, theta_j - pi/2) pair,
// computed in a single sweep that reuses the circuit prefix before each
// parameterized gate. Bitwise identical to evaluating the shifted machines
// one by one.
struct ShiftedPair {
    std::vector<double> plus;
    std::vector<double> minus;
};

std::vector<ShiftedPair> shifted_distributions(const BornMachine& machine, const Observation& x);

// Checkpoint format: flat JSON {spec, theta[], seed, epoch}.
struct Checkpoint {
    BornMachine machine;
    std::uint64_t seed = 0;
    int epoch = 0;
};

std::string checkpoint_to_json(const Checkpoint& ckpt);
Checkpoint checkpoint_from_json(const std::string& text);
void save_checkpoint(const Checkpoint& ckpt, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

} // namespace qvi
