#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace qvi {

// Per-epoch training record. Columns that a method or a configuration cannot
// compute stay empty. Values describe the state at the end of the epoch.
struct EpochLog {
    int epoch = 0;
    std::optional<double> born_loss;
    std::optional<double> mlp_objective;
    std::optional<double> ideal_mlp_objective;
    std::optional<double> ksd;
    std::optional<double> tvd;
    std::optional<double> wall_ms;
};

// Shortest round-trip decimal text for a double; locale independent.
std::string format_double(double value);

// CSV with header epoch,born_loss,mlp_objective,ideal_mlp_objective,ksd,tvd,
// wall_time_ms. Timing is opt-in so that fixed-seed runs stay byte-identical.
void write_epoch_csv(std::ostream& out, const std::vector<EpochLog>& logs,
                     bool include_timing = false);
void write_epoch_csv_file(const std::string& path, const std::vector<EpochLog>& logs,
                          bool include_timing = false);

} // namespace qvi
