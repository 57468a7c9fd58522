// Acceptance gate: one PASS/FAIL line per criterion. Thresholds are fixed here.

#include "oracles.hpp"

#include "uavsim/channel.hpp"
#include "uavsim/cli.hpp"
#include "uavsim/engine.hpp"
#include "uavsim/placement.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

using namespace uavsim;
namespace fs = std::filesystem;

namespace {

struct Verdict
{
    bool pass{false};
    std::string detail;
};

std::string
fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double
seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<double>
ranks(const std::vector<double>& v)
{
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> r(v.size());
    for (std::size_t i = 0; i < idx.size();)
    {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]])
        {
            ++j;
        }
        for (std::size_t k = i; k <= j; ++k)
        {
            r[idx[k]] = 0.5 * static_cast<double>(i + j) + 1.0;
        }
        i = j + 1;
    }
    return r;
}

double
spearman(const std::vector<double>& x, const std::vector<double>& y)
{
    const auto rx = ranks(x);
    const auto ry = ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < rx.size(); ++i)
    {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxx > 0 && syy > 0 ? sxy / std::sqrt(sxx * syy) : 0.0;
}

constexpr int kSeeds = 20;

// --- 1 ---------------------------------------------------------------------

Verdict
mode_ordering()
{
    const auto t0 = std::chrono::steady_clock::now();
    Scenario s;
    s.placement = PlacementStrategy::Pso;
    s.duration_s = 60.0;
    std::map<BackhaulMode, double> mean;
    for (auto m : {BackhaulMode::Ideal, BackhaulMode::BackhaulUnaware, BackhaulMode::BackhaulAware})
    {
        s.mode = m;
        mean[m] = run_batch(s, kSeeds).summary.mean_throughput_bps;
    }
    const double ideal = mean[BackhaulMode::Ideal];
    const double aware = mean[BackhaulMode::BackhaulAware];
    const double unaware = mean[BackhaulMode::BackhaulUnaware];
    const bool ok = ideal > aware && aware > unaware && ideal >= 1.05 * aware && aware >= 1.10 * unaware;
    return {ok,
            fmt("ideal %.4g, aware %.4g, unaware %.4g b/s; ideal/aware %.4f (need >= 1.05), aware/unaware %.4f "
                "(need >= 1.10); %.0f s",
                ideal,
                aware,
                unaware,
                ideal / aware,
                aware / unaware,
                seconds_since(t0))};
}

// --- 2 ---------------------------------------------------------------------

Verdict
upper_tail()
{
    Scenario s;
    s.placement = PlacementStrategy::Grid;
    int compared = 0;
    int mismatched = 0;
    for (std::uint64_t seed = 0; seed < 3; ++seed)
    {
        std::vector<RunResult> r;
        for (auto m : {BackhaulMode::Ideal, BackhaulMode::BackhaulUnaware, BackhaulMode::BackhaulAware})
        {
            s.mode = m;
            r.push_back(run(s, seed));
        }
        for (std::size_t i = 0; i < r[0].per_ue_mean_bps.size(); ++i)
        {
            const bool ap_only = r[0].always_ap_attached[i] && r[1].always_ap_attached[i] && r[2].always_ap_attached[i];
            if (!ap_only)
            {
                continue;
            }
            ++compared;
            const double v = r[0].per_ue_mean_bps[i];
            mismatched += (std::memcmp(&v, &r[1].per_ue_mean_bps[i], sizeof v) != 0 ||
                           std::memcmp(&v, &r[2].per_ue_mean_bps[i], sizeof v) != 0)
                              ? 1
                              : 0;
        }
    }
    return {compared > 0 && mismatched == 0,
            fmt("%d AP-attached UE samples over 3 seeds, %d differ across modes", compared, mismatched)};
}

// --- 3 ---------------------------------------------------------------------

Verdict
uav_count_trend()
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> counts{1, 2, 3, 5, 8};
    std::map<PlacementStrategy, std::vector<double>> mean;
    for (auto p : {PlacementStrategy::Pso, PlacementStrategy::Grid})
    {
        for (int n : counts)
        {
            Scenario s;
            s.n_clusters = 4;
            s.n_uavs = n;
            s.placement = p;
            mean[p].push_back(run_batch(s, kSeeds).summary.mean_throughput_bps);
        }
    }
    const std::vector<double> x(counts.begin(), counts.end());
    const auto& pso = mean[PlacementStrategy::Pso];
    const auto& grid = mean[PlacementStrategy::Grid];
    const double rho_pso = spearman(x, pso);
    const double rho_grid = spearman(x, grid);
    bool dominates = true;
    std::string rows;
    for (std::size_t k = 0; k < counts.size(); ++k)
    {
        dominates = dominates && pso[k] >= grid[k];
        rows += fmt(" n=%d pso %.4g grid %.4g;", counts[k], pso[k], grid[k]);
    }
    const double gap1 = pso[0] - grid[0];
    const double gap2 = pso[1] - grid[1];
    const double gap8 = pso[4] - grid[4];
    const bool ok = rho_pso >= 0.9 && rho_grid >= 0.9 && dominates && gap1 > gap8 && gap2 > gap8;
    return {ok,
            fmt("spearman pso %.3f grid %.3f (need >= 0.9); pso>=grid everywhere: %s; gaps n=1 %.4g n=2 %.4g n=8 "
                "%.4g;",
                rho_pso,
                rho_grid,
                dominates ? "yes" : "no",
                gap1,
                gap2,
                gap8) +
                rows + fmt(" %.0f s", seconds_since(t0))};
}

// --- 4 ---------------------------------------------------------------------

Verdict
fairness_trend()
{
    const auto t0 = std::chrono::steady_clock::now();
    const std::vector<int> clusters{1, 2, 3, 4, 5, 6};
    std::map<PlacementStrategy, std::vector<AggregateSummary>> sum;
    for (auto p : {PlacementStrategy::Pso, PlacementStrategy::Grid})
    {
        for (int c : clusters)
        {
            Scenario s;
            s.n_uavs = 5;
            s.n_clusters = c;
            s.placement = p;
            sum[p].push_back(run_batch(s, kSeeds).summary);
        }
    }
    const auto& pso = sum[PlacementStrategy::Pso];
    const auto& grid = sum[PlacementStrategy::Grid];
    const bool drop_pso = pso.back().jain_mean < pso.front().jain_mean;
    const bool drop_grid = grid.back().jain_mean < grid.front().jain_mean;
    bool within = true;
    std::string rows;
    for (std::size_t k = 0; k < clusters.size(); ++k)
    {
        const double se = std::hypot(pso[k].jain_sem, grid[k].jain_sem);
        within = within && pso[k].jain_mean + se >= grid[k].jain_mean;
        rows += fmt(" c=%d pso %.4f grid %.4f se %.4f;", clusters[k], pso[k].jain_mean, grid[k].jain_mean, se);
    }
    return {drop_pso && drop_grid && within,
            fmt("jain drop 1->6 pso: %s grid: %s; pso >= grid within 1 SE everywhere: %s;",
                drop_pso ? "yes" : "no",
                drop_grid ? "yes" : "no",
                within ? "yes" : "no") +
                rows + fmt(" %.0f s", seconds_since(t0))};
}

// --- 5 ---------------------------------------------------------------------

Verdict
alpha_fair_oracle()
{
    const auto t0 = std::chrono::steady_clock::now();
    Rng rng(derive_seed(5, 5));
    double worst = 0.0;
    int instances = 0;
    for (double alpha : {1.0, 2.0, 4.0})
    {
        for (int k = 0; k < 100; ++k)
        {
            const auto n = 2 + static_cast<std::size_t>(rng.uniform() * 19);
            std::vector<double> r(std::min<std::size_t>(n, 20));
            for (auto& v : r)
            {
                v = std::exp(rng.uniform(std::log(10e6), std::log(5e9)));
            }
            const auto tau = alpha_fair_shares(r, alpha);
            const auto ref = oracle::maximize_alpha_utility(r, alpha);
            const double u = oracle::total_utility(tau, r, alpha);
            const double u_ref = oracle::total_utility(ref, r, alpha);
            worst = std::max(worst, std::abs(u - u_ref) / std::abs(u_ref));
            ++instances;
        }
    }
    const double elapsed = seconds_since(t0);
    return {worst <= 1e-6 && elapsed < 10.0,
            fmt("%d instances, worst relative utility gap %.3g (need <= 1e-6), %.2f s (need < 10)", instances, worst, elapsed)};
}

// --- 6 ---------------------------------------------------------------------

Verdict
pso_sanity()
{
    PsoParams p;
    p.swarm_size = 30;
    p.iterations = 100;
    std::string detail;
    bool ok = true;
    for (std::size_t d : {1u, 2u, 4u})
    {
        const Bounds b{std::vector<double>(d, 0.0), std::vector<double>(d, 600.0)};
        int hits = 0;
        bool monotone = true;
        for (std::uint64_t seed = 0; seed < 20; ++seed)
        {
            const auto r = pso_optimize(
                [](std::span<const double> x) {
                    double f = 0.0;
                    for (double v : x)
                    {
                        f -= (v - 300.0) * (v - 300.0);
                    }
                    return f;
                },
                b,
                p,
                derive_seed(6, d, seed));
            double dist = 0.0;
            for (double v : r.best)
            {
                dist += (v - 300.0) * (v - 300.0);
            }
            hits += std::sqrt(dist) <= 1.0 ? 1 : 0;
            monotone = monotone && std::is_sorted(r.trace.begin(), r.trace.end());
        }
        ok = ok && hits >= 19 && monotone;
        detail += fmt("d=%zu: %d/20 within 1 m, trace monotone %s; ", d, hits, monotone ? "yes" : "no");
    }
    return {ok, detail + "need >= 19/20"};
}

// --- 7 ---------------------------------------------------------------------

Verdict
link_budget()
{
    const double los = path_loss_db(100, 73, true, 1.5);
    const double nlos = path_loss_db(100, 73, false, 1.5);
    const double noise = noise_dbm(Scenario{});
    const double p = los_probability(36);
    const bool ok = std::abs(los - 111.666) <= 0.01 && std::abs(nlos - 132.688) <= 0.01 &&
                    std::abs(noise - -79.519) <= 0.01 && std::abs(p - 0.68394) <= 1e-5;
    return {ok, fmt("PL_LOS %.4f dB, PL_NLOS %.4f dB, noise %.4f dBm, p_LOS(36) %.6f", los, nlos, noise, p)};
}

// --- 8 ---------------------------------------------------------------------

std::string
slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream b;
    b << in.rdbuf();
    return b.str();
}

int
cli(std::vector<std::string> args)
{
    args.insert(args.begin(), "uavsim");
    std::vector<const char*> argv;
    for (const auto& a : args)
    {
        argv.push_back(a.c_str());
    }
    std::ostringstream sink;
    auto* old = std::cout.rdbuf(sink.rdbuf());
    const int code = run_cli(static_cast<int>(argv.size()), argv.data());
    std::cout.rdbuf(old);
    return code;
}

Verdict
conservation_determinism()
{
    const auto t0 = std::chrono::steady_clock::now();
    const fs::path root = fs::temp_directory_path() / ("uavsim_acceptance_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);

    Scenario s; // full default run
    bool conserved = true;
    std::int64_t sourced = 0;
    for (std::uint64_t seed = 0; seed < 2; ++seed)
    {
        const auto r = run(s, seed);
        conserved = conserved && r.queues_conserved &&
                    r.sourced_bytes == r.delivered_bytes + r.dropped_bytes + r.backlog_bytes;
        sourced += r.sourced_bytes;
    }

    const auto a = root / "sequential";
    const auto b = root / "concurrent";
    const auto c = root / "again";
    const int ca = cli({"run", "--seeds", "4", "--seed", "11", "--threads", "1", "--out", a.string()});
    const int cb = cli({"run", "--seeds", "4", "--seed", "11", "--threads", "4", "--out", b.string()});
    const int cc = cli({"run", "--seeds", "4", "--seed", "11", "--threads", "4", "--out", c.string()});
    int files = 0;
    int identical = 0;
    for (const char* f : {"summary.json", "per_ue.csv", "cdf_per_ue.csv", "cdf_per_cell.csv"})
    {
        ++files;
        const auto x = slurp(a / f);
        identical += (!x.empty() && x == slurp(b / f) && x == slurp(c / f)) ? 1 : 0;
    }
    fs::remove_all(root);
    const bool ok = conserved && ca == 0 && cb == 0 && cc == 0 && identical == files;
    return {ok,
            fmt("byte ledger closes: %s (%lld bytes sourced over 2 full runs); %d/%d output files byte-identical "
                "across sequential and concurrent batches; %.0f s",
                conserved ? "yes" : "no",
                static_cast<long long>(sourced),
                identical,
                files,
                seconds_since(t0))};
}

// --- 9 ---------------------------------------------------------------------

Verdict
jain_bounds()
{
    Rng rng(derive_seed(9, 9));
    int bad = 0;
    for (int k = 0; k < 10000; ++k)
    {
        const auto n = 1 + static_cast<std::size_t>(rng.uniform() * 50);
        const double nn = static_cast<double>(n);
        std::vector<double> x(n);
        const int kind = k % 4;
        for (auto& v : x)
        {
            v = rng.uniform(0, 1e9);
        }
        if (kind == 1)
        {
            std::fill(x.begin(), x.end(), rng.uniform(1e-3, 1e9));
        }
        else if (kind == 2)
        {
            std::fill(x.begin(), x.end(), 0.0);
            x[static_cast<std::size_t>(rng.uniform() * nn)] = rng.uniform(1e-3, 1e9);
        }
        else if (kind == 3)
        {
            for (auto& v : x)
            {
                v = rng.bernoulli(0.5) ? 0.0 : v;
            }
            x[0] = std::max(x[0], 1.0);
        }
        const double j = jain_index(x);
        const bool all_equal = std::all_of(x.begin(), x.end(), [&](double v) { return v == x[0]; });
        bool ok = j >= 1.0 / nn && j <= 1.0;
        ok = ok && ((std::abs(j - 1.0) <= 1e-12) == all_equal);
        if (kind == 2)
        {
            ok = ok && std::abs(j - 1.0 / nn) <= 1e-12;
        }
        bad += ok ? 0 : 1;
    }
    return {bad == 0, fmt("10000 vectors, %d violations", bad)};
}

struct Criterion
{
    int id;
    const char* name;
    std::function<Verdict()> check;
};

} // namespace

int
main(int argc, char** argv)
{
    const std::vector<Criterion> all{
        {1, "mode ordering", mode_ordering},
        {2, "upper tail coincidence", upper_tail},
        {3, "UAV count trend", uav_count_trend},
        {4, "fairness trend", fairness_trend},
        {5, "alpha-fair oracle", alpha_fair_oracle},
        {6, "PSO sanity", pso_sanity},
        {7, "link budget analytics", link_budget},
        {8, "conservation and determinism", conservation_determinism},
        {9, "Jain bounds", jain_bounds},
    };

    CLI::App app{"acceptance checks"};
    std::vector<int> selected;
    app.add_option("--criterion,-c", selected, "criterion ids to run (default: all)");
    CLI11_PARSE(app, argc, argv);

    int failed = 0;
    for (const auto& c : all)
    {
        if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end())
        {
            continue;
        }
        const Verdict v = c.check();
        std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << c.id << " (" << c.name << "): " << v.detail
                  << std::endl;
        failed += v.pass ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
