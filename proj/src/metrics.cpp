#include "qvi/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "qvi/rng.hpp"

namespace qvi {

double tvd(std::span<const double> p, std::span<const double> q) {
    if (p.size() != q.size()) throw std::invalid_argument("distributions differ in length");
    double sp = 0.0, sq = 0.0, acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        sp += p[i];
        sq += q[i];
        acc += std::abs(p[i] - q[i]);
    }
    if (std::abs(sp - 1.0) > 1e-8 || std::abs(sq - 1.0) > 1e-8) {
        throw std::invalid_argument("distributions must each sum to 1 within 1e-8");
    }
    return 0.5 * acc;
}

double median(std::vector<double> values) {
    if (values.empty()) throw std::invalid_argument("median of empty set");
    std::sort(values.begin(), values.end());
    std::size_t m = values.size() / 2;
    if (values.size() % 2 == 1) return values[m];
    return 0.5 * (values[m - 1] + values[m]);
}

double percentile_sorted(std::span<const double> sorted_values, double q) {
    if (sorted_values.empty()) throw std::invalid_argument("percentile of empty set");
    if (q <= 0.0) return sorted_values.front();
    if (q >= 1.0) return sorted_values.back();
    double pos = q * static_cast<double>(sorted_values.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    double frac = pos - static_cast<double>(lo);
    if (lo + 1 >= sorted_values.size()) return sorted_values.back();
    return sorted_values[lo] * (1.0 - frac) + sorted_values[lo + 1] * frac;
}

BootstrapCI bootstrap_median_ci(std::span<const double> values, int resamples,
                                std::uint64_t seed, double q_lo, double q_hi) {
    if (values.empty()) throw std::invalid_argument("bootstrap of empty set");
    if (resamples <= 0) throw std::invalid_argument("resample count must be positive");
    Rng rng(seed);
    std::vector<double> medians(static_cast<std::size_t>(resamples));
    std::vector<double> draw(values.size());
    for (auto& m : medians) {
        for (auto& v : draw) v = values[rng.uniform_int(values.size())];
        m = median(draw);
    }
    std::sort(medians.begin(), medians.end());
    return {percentile_sorted(medians, q_lo), percentile_sorted(medians, q_hi)};
}

} // namespace qvi
