#include "qvi/born.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "qvi/rng.hpp"

namespace qvi {

namespace {

constexpr double kHalfPi = 1.57079632679489661923;

void check_spec(const AnsatzSpec& spec) {
    if (spec.n_qubits <= 0 || spec.n_qubits > kMaxQubits) {
        throw std::invalid_argument("ansatz qubit count out of range");
    }
    if (spec.layers < 0) throw std::invalid_argument("layer count must be non-negative");
}

} // namespace

BornMachine init_machine(const AnsatzSpec& spec, std::uint64_t seed) {
    check_spec(spec);
    Rng rng(seed);
    BornMachine machine{spec, {}};
    machine.theta.resize(static_cast<std::size_t>(spec.param_count()));
    for (auto& t : machine.theta) t = rng.normal(0.0, 0.01);
    return machine;
}

Circuit build_circuit(const BornMachine& machine, const Observation& x) {
    const auto& spec = machine.spec;
    check_spec(spec);
    if (machine.theta.size() != static_cast<std::size_t>(spec.param_count())) {
        throw std::invalid_argument("theta length does not match ansatz spec");
    }
    const int n = spec.n_qubits;

    Circuit circuit;
    circuit.n_qubits = n;
    switch (spec.encoding) {
    case Encoding::HadamardPrep:
        for (int q = 0; q < n; ++q) circuit.ops.push_back(GateOp::h(q));
        break;
    case Encoding::AngleEncoding:
        if (static_cast<int>(x.values.size()) != n) {
            throw std::invalid_argument("angle encoding needs one observed value per qubit");
        }
        for (int q = 0; q < n; ++q) circuit.ops.push_back(GateOp::rx(q, x.values[q]));
        break;
    }

    // RotZ precedes RotX on each qubit: after the Hadamard preparation the
    // opposite order would leave every outcome probability fixed at uniform
    // (RotX acts on |+> as a phase, RotZ never changes Z-basis weights).
    std::size_t k = 0;
    auto rotation_layer = [&] {
        for (int q = 0; q < n; ++q) {
            circuit.ops.push_back(GateOp::rz(q, machine.theta[k++]));
            circuit.ops.push_back(GateOp::rx(q, machine.theta[k++]));
        }
    };
    rotation_layer();
    for (int layer = 0; layer < spec.layers; ++layer) {
        for (int q = 0; q + 1 < n; ++q) circuit.ops.push_back(GateOp::cz(q, q + 1));
        rotation_layer();
    }
    return circuit;
}

std::vector<double> exact_distribution(const BornMachine& machine, const Observation& x) {
    return outcome_probabilities(run_circuit(build_circuit(machine, x)));
}

std::vector<BitVector> born_sample(const BornMachine& machine, const Observation& x, int shots,
                                   std::uint64_t seed) {
    return sample_outcomes(run_circuit(build_circuit(machine, x)), shots, seed);
}

std::pair<BornMachine, BornMachine> shifted_machines(const BornMachine& machine, int j) {
    if (j < 0 || static_cast<std::size_t>(j) >= machine.theta.size()) {
        throw std::out_of_range("parameter index out of range");
    }
    BornMachine plus = machine;
    BornMachine minus = machine;
    plus.theta[static_cast<std::size_t>(j)] += kHalfPi;
    minus.theta[static_cast<std::size_t>(j)] -= kHalfPi;
    return {std::move(plus), std::move(minus)};
}

double prob_gradient(const BornMachine& machine, const Observation& x, const BitVector& z,
                     int j) {
    auto [plus, minus] = shifted_machines(machine, j);
    const std::size_t idx = index_of(z);
    return 0.5 * (exact_distribution(plus, x)[idx] - exact_distribution(minus, x)[idx]);
}

std::vector<ShiftedPair> shifted_distributions(const BornMachine& machine, const Observation& x) {
    const Circuit circuit = build_circuit(machine, x);
    const std::size_t n_params = machine.theta.size();

    // Parameterized gates appear in theta order. Both encodings emit one
    // gate per qubit first; those rotations do not consume parameters.
    const auto encoding_gates = static_cast<std::size_t>(machine.spec.n_qubits);

    std::vector<ShiftedPair> out(n_params);
    StateVector state(circuit.n_qubits);
    std::size_t param = 0;
    for (std::size_t g = 0; g < circuit.ops.size(); ++g) {
        const GateOp& op = circuit.ops[g];
        const bool parameterized =
            g >= encoding_gates && (op.kind == GateKind::RotX || op.kind == GateKind::RotZ);
        if (parameterized) {
            for (int sign : {+1, -1}) {
                GateOp shifted = op;
                shifted.angle += sign * kHalfPi;
                StateVector branch = apply_gate(state, shifted);
                for (std::size_t h = g + 1; h < circuit.ops.size(); ++h) {
                    branch = apply_gate(branch, circuit.ops[h]);
                }
                (sign > 0 ? out[param].plus : out[param].minus) =
                    outcome_probabilities(branch);
            }
            ++param;
        }
        state = apply_gate(state, op);
    }
    if (param != n_params) throw std::logic_error("parameterized gate count mismatch");
    return out;
}

std::string checkpoint_to_json(const Checkpoint& ckpt) {
    nlohmann::json doc;
    doc["spec"]["n_qubits"] = ckpt.machine.spec.n_qubits;
    doc["spec"]["layers"] = ckpt.machine.spec.layers;
    doc["spec"]["encoding"] =
        ckpt.machine.spec.encoding == Encoding::HadamardPrep ? "hadamard" : "angle";
    doc["theta"] = ckpt.machine.theta;
    doc["seed"] = ckpt.seed;
    doc["epoch"] = ckpt.epoch;
    return doc.dump(2);
}

Checkpoint checkpoint_from_json(const std::string& text) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("checkpoint parse error: ") + e.what());
    }
    Checkpoint ckpt;
    ckpt.machine.spec.n_qubits = doc.at("spec").at("n_qubits").get<int>();
    ckpt.machine.spec.layers = doc.at("spec").at("layers").get<int>();
    std::string enc = doc.at("spec").at("encoding").get<std::string>();
    if (enc == "hadamard") ckpt.machine.spec.encoding = Encoding::HadamardPrep;
    else if (enc == "angle") ckpt.machine.spec.encoding = Encoding::AngleEncoding;
    else throw std::invalid_argument("unknown encoding '" + enc + "'");
    ckpt.machine.theta = doc.at("theta").get<std::vector<double>>();
    ckpt.seed = doc.value("seed", std::uint64_t{0});
    ckpt.epoch = doc.value("epoch", 0);
    if (ckpt.machine.theta.size() != static_cast<std::size_t>(ckpt.machine.spec.param_count())) {
        throw std::invalid_argument("checkpoint theta length does not match spec");
    }
    return ckpt;
}

void save_checkpoint(const Checkpoint& ckpt, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint '" + path + "'");
    out << checkpoint_to_json(ckpt) << '\n';
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return checkpoint_from_json(buf.str());
}

} // namespace qvi
