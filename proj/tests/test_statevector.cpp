#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "qvi/checks.hpp"
#include "qvi/rng.hpp"
#include "qvi/statevector.hpp"

using namespace qvi;

TEST_CASE("hadamard on |0>") {
    StateVector state(1);
    state = apply_gate(state, GateOp::h(0));
    CHECK(state.amplitudes[0].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(state.amplitudes[1].real() == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(std::abs(state.amplitudes[0].imag()) < 1e-15);
}

TEST_CASE("rotations") {
    StateVector state(1);
    SUBCASE("RotX(0) is the identity") {
        auto out = apply_gate(state, GateOp::rx(0, 0.0));
        CHECK(std::abs(out.amplitudes[0] - std::complex<double>{1.0, 0.0}) < 1e-15);
        CHECK(std::abs(out.amplitudes[1]) < 1e-15);
    }
    SUBCASE("RotX(pi) maps |0> to -i|1>") {
        // exp(-i pi/2 X) = -iX, worked out from the 2x2 matrix exponential.
        auto out = apply_gate(state, GateOp::rx(0, 3.14159265358979323846));
        CHECK(std::abs(out.amplitudes[0]) < 1e-15);
        CHECK(std::abs(out.amplitudes[1] - std::complex<double>{0.0, -1.0}) < 1e-12);
    }
    SUBCASE("RotX then its inverse restores the state") {
        Rng rng(11);
        for (int trial = 0; trial < 20; ++trial) {
            StateVector s(3);
            s = apply_gate(s, GateOp::h(0));
            s = apply_gate(s, GateOp::h(1));
            s = apply_gate(s, GateOp::h(2));
            double angle = rng.uniform(-3.0, 3.0);
            int q = static_cast<int>(rng.uniform_int(3));
            auto back = apply_gate(apply_gate(s, GateOp::rx(q, angle)), GateOp::rx(q, -angle));
            for (std::size_t i = 0; i < s.amplitudes.size(); ++i) {
                CHECK(std::abs(back.amplitudes[i] - s.amplitudes[i]) < 1e-12);
            }
        }
    }
}

TEST_CASE("controlled-Z flips the sign of |11> only") {
    StateVector state(2);
    state = apply_gate(state, GateOp::h(0));
    state = apply_gate(state, GateOp::h(1));
    auto out = apply_gate(state, GateOp::cz(0, 1));
    CHECK(out.amplitudes[0].real() == doctest::Approx(0.5));
    CHECK(out.amplitudes[1].real() == doctest::Approx(0.5));
    CHECK(out.amplitudes[2].real() == doctest::Approx(0.5));
    CHECK(out.amplitudes[3].real() == doctest::Approx(-0.5));
}

TEST_CASE("run_circuit") {
    SUBCASE("empty circuit leaves |00>") {
        auto state = run_circuit(Circuit{2, {}});
        CHECK(state.amplitudes[0].real() == doctest::Approx(1.0));
    }
    SUBCASE("H on each of 3 qubits gives the uniform superposition") {
        Circuit c{3, {GateOp::h(0), GateOp::h(1), GateOp::h(2)}};
        auto state = run_circuit(c);
        for (const auto& a : state.amplitudes) {
            CHECK(std::abs(a - std::complex<double>{1.0 / std::sqrt(8.0), 0.0}) < 1e-12);
        }
    }
}

TEST_CASE("outcome probabilities and basis ordering") {
    SUBCASE("equal superposition") {
        auto state = apply_gate(StateVector(1), GateOp::h(0));
        auto probs = outcome_probabilities(state);
        CHECK(probs[0] == doctest::Approx(0.5));
        CHECK(probs[1] == doctest::Approx(0.5));
    }
    SUBCASE("|01> lands at index 1: qubit 0 is the most significant bit") {
        StateVector state = StateVector::from_amplitudes({{0, 0}, {1, 0}, {0, 0}, {0, 0}});
        auto probs = outcome_probabilities(state);
        CHECK(probs[0] == 0.0);
        CHECK(probs[1] == 1.0);
        auto samples = sample_outcomes(state, 3, 5);
        for (const auto& z : samples) {
            CHECK(z == BitVector{0, 1});
        }
    }
    SUBCASE("uniform 3-qubit state") {
        Circuit c{3, {GateOp::h(0), GateOp::h(1), GateOp::h(2)}};
        for (double p : outcome_probabilities(run_circuit(c))) {
            CHECK(p == doctest::Approx(0.125));
        }
    }
    SUBCASE("index round trip") {
        for (std::size_t idx = 0; idx < 32; ++idx) {
            CHECK(index_of(bits_of(idx, 5)) == idx);
        }
    }
}

TEST_CASE("sampling") {
    SUBCASE("deterministic distribution") {
        StateVector state = StateVector::from_amplitudes({{0, 0}, {0, 0}, {0, 0}, {1, 0}});
        for (const auto& z : sample_outcomes(state, 5, 99)) {
            CHECK(z == BitVector{1, 1});
        }
    }
    SUBCASE("uniform single qubit frequency") {
        auto state = apply_gate(StateVector(1), GateOp::h(0));
        auto samples = sample_outcomes(state, 100000, 1234);
        double ones = 0;
        for (const auto& z : samples) ones += z[0];
        // 6+ sigma window for a fair coin with 1e5 flips.
        CHECK(ones / 100000.0 > 0.49);
        CHECK(ones / 100000.0 < 0.51);
    }
    SUBCASE("same seed reproduces the sample list") {
        Circuit c{3, {GateOp::h(0), GateOp::h(1), GateOp::rx(2, 0.7)}};
        auto state = run_circuit(c);
        CHECK(sample_outcomes(state, 200, 42) == sample_outcomes(state, 200, 42));
    }
    SUBCASE("zero shots is an error") {
        CHECK_THROWS_AS(sample_outcomes(StateVector(1), 0, 1), std::invalid_argument);
    }
    SUBCASE("chi-square goodness of fit on random 4-qubit circuits") {
        auto r = check_sampling_chisquare(2024, 5, 100000, 0.001);
        INFO(r.detail);
        CHECK(r.pass);
    }
}

TEST_CASE("norm preservation on random circuits") {
    auto r = check_norm_preservation(77, 50, 1e-10);
    INFO(r.detail);
    CHECK(r.pass);
}

TEST_CASE("validation errors") {
    CHECK_THROWS_AS(apply_gate(StateVector(2), GateOp::h(2)), std::out_of_range);
    CHECK_THROWS_AS(apply_gate(StateVector(2), GateOp::cz(1, 1)), std::invalid_argument);
    CHECK_THROWS_AS(StateVector::from_amplitudes({{1, 0}, {0, 0}, {0, 0}}),
                    std::invalid_argument);
    CHECK_THROWS_AS(StateVector::from_amplitudes({{0.5, 0}, {0.5, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(StateVector(0), std::invalid_argument);
    CHECK_THROWS_AS(StateVector(kMaxQubits + 1), std::invalid_argument);
}
