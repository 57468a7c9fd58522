#include "uavsim/report.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

namespace uavsim {

using nlohmann::ordered_json;

namespace {

ordered_json
rounded(double v)
{
    if (!std::isfinite(v))
    {
        return nullptr;
    }
    return std::stod(format_number(v));
}

std::ofstream
open_for_write(const std::filesystem::path& path)
{
    std::ofstream os(path, std::ios::binary);
    if (!os)
    {
        throw std::runtime_error("cannot write " + path.string());
    }
    return os;
}

} // namespace

std::string
format_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void
write_summary_json(std::ostream& os, const Scenario& s, const BatchResult& batch)
{
    const auto& a = batch.summary;
    ordered_json j;
    j["scenario"] = ordered_json::parse(serialize_scenario(s));
    j["n_seeds"] = a.n_seeds;
    j["mean_throughput_bps"] = rounded(a.mean_throughput_bps);
    j["throughput_std_bps"] = rounded(a.throughput_std_bps);
    j["jain_mean"] = rounded(a.jain_mean);
    j["jain_std"] = rounded(a.jain_std);
    j["jain_sem"] = rounded(a.jain_sem);
    j["drop_fraction"] = rounded(a.drop_fraction);
    j["dropped_bytes"] = a.dropped_bytes;
    j["dropped_packets"] = a.dropped_bytes / s.packet_size_bytes;

    ordered_json per_seed = ordered_json::array();
    for (const auto& r : batch.runs)
    {
        per_seed.push_back({
            {"seed", r.seed},
            {"mean_throughput_bps", rounded(r.mean_throughput_bps)},
            {"jain", rounded(r.jain)},
            {"sourced_bytes", r.sourced_bytes},
            {"delivered_bytes", r.delivered_bytes},
            {"dropped_bytes", r.dropped_bytes},
            {"backlog_bytes", r.backlog_bytes},
        });
    }
    j["per_seed"] = std::move(per_seed);
    os << j.dump(2) << '\n';
}

void
write_per_ue_csv(std::ostream& os, std::span<const RunResult> runs)
{
    os << "seed,ue_id,mean_bps\n";
    for (const auto& r : runs)
    {
        for (std::size_t i = 0; i < r.per_ue_mean_bps.size(); ++i)
        {
            os << r.seed << ',' << i << ',' << format_number(r.per_ue_mean_bps[i]) << '\n';
        }
    }
}

void
write_cdf_csv(std::ostream& os, std::span<const CdfPoint> cdf)
{
    os << "value_bps,cdf\n";
    for (const auto& p : cdf)
    {
        os << format_number(p.value) << ',' << format_number(p.probability) << '\n';
    }
}

void
write_run_outputs(const std::filesystem::path& dir, const Scenario& s, const BatchResult& batch)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec)
    {
        throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
    }
    {
        auto os = open_for_write(dir / "summary.json");
        write_summary_json(os, s, batch);
    }
    {
        auto os = open_for_write(dir / "per_ue.csv");
        write_per_ue_csv(os, batch.runs);
    }
    {
        auto os = open_for_write(dir / "cdf_per_ue.csv");
        write_cdf_csv(os, empirical_cdf(batch.summary.per_ue_samples));
    }
    {
        auto os = open_for_write(dir / "cdf_per_cell.csv");
        write_cdf_csv(os, empirical_cdf(batch.summary.per_cell_samples));
    }
}

void
write_sweep_csv(std::ostream& os, std::span<const SweepRow> rows)
{
    os << "value,mean_throughput_bps,jain_mean,jain_std,drop_fraction\n";
    for (const auto& r : rows)
    {
        os << r.value << ',' << format_number(r.mean_throughput_bps) << ',' << format_number(r.jain_mean) << ','
           << format_number(r.jain_std) << ',' << format_number(r.drop_fraction) << '\n';
    }
}

} // namespace uavsim
