#include "qvi/statevector.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace qvi {

namespace {

constexpr double kSqrtHalf = 0.70710678118654752440;

void check_qubit(int q, int n, const char* what) {
    if (q < 0 || q >= n) {
        throw std::out_of_range(std::string(what) + " qubit index " + std::to_string(q) +
                                " out of range for " + std::to_string(n) + " qubits");
    }
}

} // namespace

StateVector::StateVector(int n) {
    if (n <= 0 || n > kMaxQubits) {
        throw std::invalid_argument("qubit count must be in [1, " + std::to_string(kMaxQubits) +
                                    "], got " + std::to_string(n));
    }
    n_qubits = n;
    amplitudes.assign(std::size_t{1} << n, {0.0, 0.0});
    amplitudes[0] = {1.0, 0.0};
}

StateVector StateVector::from_amplitudes(std::vector<std::complex<double>> amps) {
    std::size_t dim = amps.size();
    int n = 0;
    while ((std::size_t{1} << n) < dim && n <= kMaxQubits) ++n;
    if (dim == 0 || (std::size_t{1} << n) != dim) {
        throw std::invalid_argument("amplitude vector length must be a power of two");
    }
    StateVector state;
    state.n_qubits = n;
    state.amplitudes = std::move(amps);
    if (std::abs(state.norm_squared() - 1.0) > 1e-10) {
        throw std::invalid_argument("amplitude vector is not normalized");
    }
    return state;
}

double StateVector::norm_squared() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return s;
}

StateVector apply_gate(const StateVector& state, const GateOp& op) {
    const int n = state.n_qubits;
    check_qubit(op.target, n, "target");

    StateVector out = state;
    auto& amps = out.amplitudes;
    const std::size_t dim = amps.size();

    switch (op.kind) {
    case GateKind::Hadamard: {
        const std::size_t stride = std::size_t{1} << (n - 1 - op.target);
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                auto a0 = amps[i];
                auto a1 = amps[i + stride];
                amps[i] = kSqrtHalf * (a0 + a1);
                amps[i + stride] = kSqrtHalf * (a0 - a1);
            }
        }
        break;
    }
    case GateKind::RotX: {
        const std::size_t stride = std::size_t{1} << (n - 1 - op.target);
        const double c = std::cos(op.angle / 2.0);
        const std::complex<double> ms{0.0, -std::sin(op.angle / 2.0)};
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                auto a0 = amps[i];
                auto a1 = amps[i + stride];
                amps[i] = c * a0 + ms * a1;
                amps[i + stride] = ms * a0 + c * a1;
            }
        }
        break;
    }
    case GateKind::RotZ: {
        const std::size_t stride = std::size_t{1} << (n - 1 - op.target);
        const std::complex<double> e0{std::cos(op.angle / 2.0), -std::sin(op.angle / 2.0)};
        const std::complex<double> e1 = std::conj(e0);
        for (std::size_t base = 0; base < dim; base += 2 * stride) {
            for (std::size_t i = base; i < base + stride; ++i) {
                amps[i] *= e0;
                amps[i + stride] *= e1;
            }
        }
        break;
    }
    case GateKind::Entangle2: {
        check_qubit(op.partner, n, "partner");
        if (op.partner == op.target) {
            throw std::invalid_argument("Entangle2 requires two distinct qubits");
        }
        const std::size_t bit_a = std::size_t{1} << (n - 1 - op.target);
        const std::size_t bit_b = std::size_t{1} << (n - 1 - op.partner);
        for (std::size_t i = 0; i < dim; ++i) {
            if ((i & bit_a) && (i & bit_b)) amps[i] = -amps[i];
        }
        break;
    }
    }
    return out;
}

StateVector run_circuit(const Circuit& circuit) {
    StateVector state(circuit.n_qubits);
    for (const auto& op : circuit.ops) state = apply_gate(state, op);
    return state;
}

std::vector<double> outcome_probabilities(const StateVector& state) {
    std::vector<double> probs(state.amplitudes.size());
    for (std::size_t i = 0; i < probs.size(); ++i) probs[i] = std::norm(state.amplitudes[i]);
    return probs;
}

std::vector<std::size_t> sample_indices(std::span<const double> probs, int shots, Rng& rng) {
    if (shots <= 0) throw std::invalid_argument("shots must be positive");
    std::vector<double> cdf(probs.size());
    double acc = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        acc += probs[i];
        cdf[i] = acc;
    }
    std::vector<std::size_t> out(static_cast<std::size_t>(shots));
    for (auto& idx : out) {
        double u = rng.uniform() * acc;
        std::size_t lo = 0, hi = cdf.size() - 1;
        while (lo < hi) {
            std::size_t mid = (lo + hi) / 2;
            if (cdf[mid] > u) hi = mid;
            else lo = mid + 1;
        }
        idx = lo;
    }
    return out;
}

std::vector<BitVector> sample_outcomes(const StateVector& state, int shots, std::uint64_t seed) {
    Rng rng(seed);
    auto probs = outcome_probabilities(state);
    auto indices = sample_indices(probs, shots, rng);
    std::vector<BitVector> out;
    out.reserve(indices.size());
    for (auto idx : indices) out.push_back(bits_of(idx, state.n_qubits));
    return out;
}

} // namespace qvi
