#include "qvi/trainlog.hpp"

#include <charconv>
#include <fstream>
#include <stdexcept>

namespace qvi {

std::string format_double(double value) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, res.ptr);
}

namespace {

void put(std::ostream& out, const std::optional<double>& v) {
    out << ',';
    if (v) out << format_double(*v);
}

} // namespace

void write_epoch_csv(std::ostream& out, const std::vector<EpochLog>& logs, bool include_timing) {
    out << "epoch,born_loss,mlp_objective,ideal_mlp_objective,ksd,tvd,wall_time_ms\n";
    for (const auto& log : logs) {
        out << log.epoch;
        put(out, log.born_loss);
        put(out, log.mlp_objective);
        put(out, log.ideal_mlp_objective);
        put(out, log.ksd);
        put(out, log.tvd);
        put(out, include_timing ? log.wall_ms : std::nullopt);
        out << '\n';
    }
}

void write_epoch_csv_file(const std::string& path, const std::vector<EpochLog>& logs,
                          bool include_timing) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write log file '" + path + "'");
    write_epoch_csv(out, logs, include_timing);
}

} // namespace qvi
