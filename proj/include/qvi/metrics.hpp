#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace qvi {

// Total variation distance between two distributions on the same index set.
// Both inputs must sum to 1 within 1e-8.
double tvd(std::span<const double> p, std::span<const double> q);

// Median as the midpoint of the two central order statistics.
double median(std::vector<double> values);

// q-th quantile of sorted values with linear interpolation between order
// statistics.
double percentile_sorted(std::span<const double> sorted_values, double q);

struct BootstrapCI {
    double lo = 0.0;
    double hi = 0.0;
};

// Percentile-bootstrap confidence interval for the median: resamples the
// values with replacement, takes the median of each resample, and returns
// the [q_lo, q_hi] percentiles of the resampled medians.
BootstrapCI bootstrap_median_ci(std::span<const double> values, int resamples,
                                std::uint64_t seed, double q_lo = 0.16, double q_hi = 0.84);

} // namespace qvi
