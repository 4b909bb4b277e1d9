#pragma once

#include <complex>
#include <span>
#include <cstdint>
#include <vector>

#include "qvi/rng.hpp"
#include "qvi/types.hpp"

namespace qvi {

// Dense simulation is capped: every experiment in the benchmark suite needs
// at most 8 qubits.
inline constexpr int kMaxQubits = 16;

enum class GateKind { Hadamard, RotX, RotZ, Entangle2 };

// A single circuit operation. RotX(a) = exp(-i a/2 X) and RotZ(a) =
// exp(-i a/2 Z), so every parameterized gate has a generator with eigenvalues
// +/-1 as required by the parameter-shift rule. Entangle2 is a controlled-Z;
// it is symmetric in its two qubits.
struct GateOp {
    GateKind kind = GateKind::Hadamard;
    int target = 0;
    int partner = -1;   // Entangle2 only
    double angle = 0.0; // RotX / RotZ only

    static GateOp h(int q) { return {GateKind::Hadamard, q, -1, 0.0}; }
    static GateOp rx(int q, double angle) { return {GateKind::RotX, q, -1, angle}; }
    static GateOp rz(int q, double angle) { return {GateKind::RotZ, q, -1, angle}; }
    static GateOp cz(int a, int b) { return {GateKind::Entangle2, a, b, 0.0}; }
};

struct Circuit {
    int n_qubits = 0;
    std::vector<GateOp> ops;
};

// Normalized n-qubit state as a dense vector of 2^n amplitudes. Operations
// are pure: they return a new state and never mutate shared data.
struct StateVector {
    int n_qubits = 0;
    std::vector<std::complex<double>> amplitudes;

    StateVector() = default;
    explicit StateVector(int n); // |0...0>

    // Builds a state from explicit amplitudes (length must be a power of
    // two, norm 1 within 1e-10). Used e.g. to load sqrt(p) for a target
    // distribution p.
    static StateVector from_amplitudes(std::vector<std::complex<double>> amps);

    double norm_squared() const;
};

StateVector apply_gate(const StateVector& state, const GateOp& op);

// Applies the ops in order to |0...0>.
StateVector run_circuit(const Circuit& circuit);

// |amplitude|^2 for every basis state, indexed per the global bit convention.
std::vector<double> outcome_probabilities(const StateVector& state);

// i.i.d. computational-basis measurements; deterministic for a fixed seed.
std::vector<BitVector> sample_outcomes(const StateVector& state, int shots, std::uint64_t seed);

// Draws `shots` basis indices from an explicit distribution via its CDF.
std::vector<std::size_t> sample_indices(std::span<const double> probs, int shots, Rng& rng);

} // namespace qvi
