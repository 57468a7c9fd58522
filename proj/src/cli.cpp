#include "uavsim/cli.hpp"

#include "uavsim/engine.hpp"
#include "uavsim/report.hpp"
#include "uavsim/scenario.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace uavsim {

namespace fs = std::filesystem;

namespace {

struct CommonFlags
{
    std::string scenario_path;
    std::optional<std::string> mode;
    std::optional<std::string> placement;
    std::optional<int> seeds;
    std::optional<std::uint64_t> seed;
    std::optional<int> uavs;
    std::optional<int> clusters;
    std::string out{"results"};
    int threads{0};
    bool dump_trajectories{false};
    bool dump_links{false};
    bool dump_cells{false};
    bool dump_pso{false};

    bool any_dump() const
    {
        return dump_trajectories || dump_links || dump_cells || dump_pso;
    }
};

struct SweepFlags
{
    std::string parameter;
    std::vector<std::string> values;
};

/// Failure carrying an exit code and the lines to print.
struct CliFailure
{
    int code;
    std::vector<std::string> lines;
};

void
add_common(CLI::App* cmd, CommonFlags& f)
{
    cmd->add_option("--scenario", f.scenario_path, "scenario JSON file");
    cmd->add_option("--mode", f.mode, "ideal | bh-unaware | bh-aware");
    cmd->add_option("--placement", f.placement, "pso | grid");
    cmd->add_option("--seeds", f.seeds, "number of seeds");
    cmd->add_option("--seed", f.seed, "base seed");
    cmd->add_option("--uavs", f.uavs, "number of UAV-BSs");
    cmd->add_option("--clusters", f.clusters, "number of UE clusters");
    cmd->add_option("--out", f.out, "output directory");
    cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
    cmd->add_flag("--dump-trajectories", f.dump_trajectories, "per-seed node trajectory CSV");
    cmd->add_flag("--dump-links", f.dump_links, "per-seed serving link CSV");
    cmd->add_flag("--dump-cells", f.dump_cells, "per-seed cell allocation CSV");
    cmd->add_flag("--dump-pso", f.dump_pso, "per-seed PSO trace CSV");
}

Scenario
resolve_scenario(const CommonFlags& f)
{
    Scenario s;
    std::string text = "{}";
    if (!f.scenario_path.empty())
    {
        std::ifstream in(f.scenario_path, std::ios::binary);
        if (!in)
        {
            throw CliFailure{kExitIo, {"cannot read scenario file: " + f.scenario_path}};
        }
        std::ostringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    try
    {
        // validation happens after the flag overrides below
        s = load_scenario(text);
    }
    catch (const ScenarioError& e)
    {
        if (e.violations().empty())
        {
            throw CliFailure{kExitValidation, {e.what()}};
        }
        // reparse without validation is not offered; report violations
        std::vector<std::string> lines;
        for (const auto& v : e.violations())
        {
            lines.push_back(v.field + ": " + v.message);
        }
        throw CliFailure{kExitValidation, lines};
    }

    try
    {
        if (f.mode)
            s.mode = parse_mode(*f.mode);
        if (f.placement)
            s.placement = parse_placement(*f.placement);
    }
    catch (const std::invalid_argument& e)
    {
        throw CliFailure{kExitValidation, {e.what()}};
    }
    if (f.seeds)
        s.n_seeds = *f.seeds;
    if (f.seed)
        s.seed = *f.seed;
    if (f.uavs)
        s.n_uavs = *f.uavs;
    if (f.clusters)
        s.n_clusters = *f.clusters;
    return s;
}

void
require_valid(const Scenario& s)
{
    const auto violations = validate_scenario(s);
    if (!violations.empty())
    {
        std::vector<std::string> lines;
        for (const auto& v : violations)
        {
            lines.push_back(v.field + ": " + v.message);
        }
        throw CliFailure{kExitValidation, lines};
    }
}

std::ofstream
open_dump(const fs::path& dir, const std::string& stem, std::uint64_t seed, const char* header)
{
    const fs::path path = dir / (stem + "_seed" + std::to_string(seed) + ".csv");
    std::ofstream os(path, std::ios::binary);
    if (!os)
    {
        throw CliFailure{kExitIo, {"cannot write " + path.string()}};
    }
    os << header << '\n';
    return os;
}

BatchResult
execute(const Scenario& s, const CommonFlags& f, const fs::path& dir)
{
    if (!f.any_dump())
    {
        return run_batch(s, s.n_seeds, s.seed, f.threads);
    }
    std::error_code ec;
    fs::create_directories(dir, ec);
    BatchResult batch;
    for (int k = 0; k < s.n_seeds; ++k)
    {
        const std::uint64_t seed = s.seed + static_cast<std::uint64_t>(k);
        std::ofstream traj, links, cells, pso;
        RunObserver obs;
        if (f.dump_trajectories)
        {
            traj = open_dump(dir, "trajectories", seed, "t_s,node_id,kind,x,y,z");
            obs.trajectories = &traj;
        }
        if (f.dump_links)
        {
            links = open_dump(dir, "links", seed, "t_s,tx_id,rx_id,pl_db,sinr_db,rate_bps");
            obs.links = &links;
        }
        if (f.dump_cells)
        {
            cells = open_dump(dir, "cells", seed, "t_s,cell,ue_id,time_share,access_rate_bps,backhaul_bps");
            obs.cells = &cells;
        }
        if (f.dump_pso)
        {
            pso = open_dump(dir, "pso", seed, "epoch,iteration,gbest_fitness");
            obs.pso = &pso;
        }
        batch.runs.push_back(run(s, seed, &obs));
    }
    batch.summary = summarize(batch.runs);
    return batch;
}

void
write_outputs(const fs::path& dir, const Scenario& s, const BatchResult& batch)
{
    try
    {
        write_run_outputs(dir, s, batch);
    }
    catch (const std::runtime_error& e)
    {
        throw CliFailure{kExitIo, {e.what()}};
    }
}

int
cmd_run(const CommonFlags& f)
{
    const Scenario s = resolve_scenario(f);
    require_valid(s);
    const fs::path dir(f.out);
    const auto batch = execute(s, f, dir);
    write_outputs(dir, s, batch);
    std::cout << "mean_throughput_bps " << format_number(batch.summary.mean_throughput_bps) << "\n"
              << "jain_mean " << format_number(batch.summary.jain_mean) << "\n"
              << "drop_fraction " << format_number(batch.summary.drop_fraction) << "\n";
    return kExitOk;
}

bool
is_numeric_parameter(const std::string& p)
{
    return p == "n_uavs" || p == "n_clusters";
}

int
cmd_sweep(const CommonFlags& f, SweepFlags sw)
{
    static const std::vector<std::string> allowed = {"n_uavs", "n_clusters", "mode", "placement"};
    if (std::find(allowed.begin(), allowed.end(), sw.parameter) == allowed.end())
    {
        throw CliFailure{kExitValidation,
                         {"unknown sweep parameter '" + sw.parameter + "' (expected n_uavs, n_clusters, mode or placement)"}};
    }
    if (sw.values.empty())
    {
        throw CliFailure{kExitValidation, {"--values must list at least one value"}};
    }
    const Scenario base = resolve_scenario(f);

    std::vector<std::pair<Scenario, std::string>> points;
    for (const auto& v : sw.values)
    {
        Scenario s = base;
        try
        {
            if (sw.parameter == "n_uavs")
                s.n_uavs = std::stoi(v);
            else if (sw.parameter == "n_clusters")
                s.n_clusters = std::stoi(v);
            else if (sw.parameter == "mode")
                s.mode = parse_mode(v);
            else
                s.placement = parse_placement(v);
        }
        catch (const std::exception&)
        {
            throw CliFailure{kExitValidation, {"bad value '" + v + "' for " + sw.parameter}};
        }
        require_valid(s);
        points.emplace_back(s, v);
    }
    if (is_numeric_parameter(sw.parameter))
    {
        std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) {
            return std::stoi(a.second) < std::stoi(b.second);
        });
    }
    else
    {
        std::stable_sort(points.begin(), points.end(), [](const auto& a, const auto& b) { return a.second < b.second; });
    }

    const fs::path root(f.out);
    std::vector<SweepRow> rows;
    for (const auto& [s, label] : points)
    {
        const fs::path dir = root / (sw.parameter + "_" + label);
        const auto batch = execute(s, f, dir);
        write_outputs(dir, s, batch);
        rows.push_back({label,
                        batch.summary.mean_throughput_bps,
                        batch.summary.jain_mean,
                        batch.summary.jain_std,
                        batch.summary.drop_fraction});
        std::cout << sw.parameter << "=" << label << " mean_throughput_bps "
                  << format_number(batch.summary.mean_throughput_bps) << " jain "
                  << format_number(batch.summary.jain_mean) << "\n";
    }
    std::ofstream os(root / "sweep.csv", std::ios::binary);
    if (!os)
    {
        throw CliFailure{kExitIo, {"cannot write " + (root / "sweep.csv").string()}};
    }
    write_sweep_csv(os, rows);
    return kExitOk;
}

} // namespace

int
run_cli(int argc, const char* const* argv)
{
    CLI::App app{"System-level simulator for UAV-carried mmWave base stations with wireless backhaul"};
    app.require_subcommand(1);

    CommonFlags run_flags;
    auto* run_cmd = app.add_subcommand("run", "run a batch of seeds for one scenario");
    add_common(run_cmd, run_flags);

    CommonFlags sweep_flags;
    SweepFlags sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a batch per value of one parameter");
    add_common(sweep_cmd, sweep_flags);
    sweep_cmd->add_option("--sweep", sweep.parameter, "n_uavs | n_clusters | mode | placement")->required();
    sweep_cmd->add_option("--values", sweep.values, "comma-separated values")->delimiter(',')->required();

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try
    {
        if (*run_cmd)
        {
            return cmd_run(run_flags);
        }
        return cmd_sweep(sweep_flags, sweep);
    }
    catch (const CliFailure& failure)
    {
        for (const auto& line : failure.lines)
        {
            std::cerr << line << '\n';
        }
        return failure.code;
    }
    catch (const std::exception& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return kExitIo;
    }
}

} // namespace uavsim
