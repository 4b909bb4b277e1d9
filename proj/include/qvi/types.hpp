#pragma once

#include <cstdint>
#include <vector>

namespace qvi {

// A length-n binary assignment of the unobserved variables. Bit i of the
// vector corresponds to qubit i of the Born machine.
using BitVector = std::vector<std::uint8_t>;

// Values of the observed variables. Binary evidence is stored as 0/1 reals;
// the HMM stores the raw time series.
struct Observation {
    std::vector<double> values;
};

// Global basis-ordering convention: qubit 0 (bit 0 of a BitVector) is the
// most significant bit of the basis-state index.
inline std::size_t index_of(const BitVector& bits) {
    std::size_t idx = 0;
    for (std::uint8_t b : bits) idx = (idx << 1) | (b & 1u);
    return idx;
}

inline BitVector bits_of(std::size_t index, int n_bits) {
    BitVector bits(static_cast<std::size_t>(n_bits));
    for (int i = 0; i < n_bits; ++i) {
        bits[static_cast<std::size_t>(i)] =
            static_cast<std::uint8_t>((index >> (n_bits - 1 - i)) & 1u);
    }
    return bits;
}

inline BitVector flip_bit(BitVector z, std::size_t i) {
    z[i] ^= 1u;
    return z;
}

} // namespace qvi
