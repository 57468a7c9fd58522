#pragma once

#include "uavsim/engine.hpp"
#include "uavsim/scenario.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>

namespace uavsim {

/// Six significant digits, the precision of every emitted float.
std::string format_number(double v);

void write_summary_json(std::ostream& os, const Scenario& s, const BatchResult& batch);
void write_per_ue_csv(std::ostream& os, std::span<const RunResult> runs);
void write_cdf_csv(std::ostream& os, std::span<const CdfPoint> cdf);

/// Writes summary.json, per_ue.csv, cdf_per_ue.csv and cdf_per_cell.csv.
/// Throws std::runtime_error on I/O failure.
void write_run_outputs(const std::filesystem::path& dir, const Scenario& s, const BatchResult& batch);

struct SweepRow
{
    std::string value;
    double mean_throughput_bps{0.0};
    double jain_mean{0.0};
    double jain_std{0.0};
    double drop_fraction{0.0};
};

void write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows);

} // namespace uavsim
