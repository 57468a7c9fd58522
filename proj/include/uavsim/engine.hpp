#pragma once

#include "uavsim/access.hpp"
#include "uavsim/channel.hpp"
#include "uavsim/mobility.hpp"
#include "uavsim/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <vector>

namespace uavsim {

struct NetworkState
{
    double time_s{0.0};
    NodeLayout nodes; ///< APs then UAVs; UAV entries mirror `uavs`
    std::vector<UavState> uavs;
    std::vector<GroupState> groups;
    std::vector<Position> ues;
    UplinkQueues queues;
    Association assoc;

    std::span<const Position> aps() const
    {
        return {nodes.pos.data(), static_cast<std::size_t>(nodes.n_aps)};
    }
};

/// Optional per-run CSV dumps; null streams are skipped.
struct RunObserver
{
    std::ostream* trajectories{nullptr};
    std::ostream* links{nullptr};
    std::ostream* cells{nullptr};
    std::ostream* pso{nullptr};
};

struct RunResult
{
    std::uint64_t seed{0};
    std::vector<double> per_ue_mean_bps;
    std::vector<std::vector<double>> cell_series_bps; ///< [node][measured slot]
    std::vector<double> slot_mean_bps;                 ///< per measured slot, mean over UEs
    std::vector<std::uint8_t> always_ap_attached;      ///< per UE, over every slot of the run
    double mean_throughput_bps{0.0};
    double jain{0.0};

    // byte ledger over the full run, all queues
    std::int64_t sourced_bytes{0};
    std::int64_t delivered_bytes{0};
    std::int64_t dropped_bytes{0};
    std::int64_t backlog_bytes{0};
    bool queues_conserved{false};

    /// Per-cell mean throughput over the measurement window.
    std::vector<double> cell_mean_bps() const;
    double drop_fraction() const;

    friend bool operator==(const RunResult&, const RunResult&) = default;
};

class RunError : public std::runtime_error
{
  public:
    using std::runtime_error::runtime_error;
};

/// Initial state: APs and UAVs on grid positions, clusters drawn from `rng`.
NetworkState init_state(const Scenario& s, Rng& rng);

/// One simulated run. Throws RunError for an empty measurement window or an
/// invalid scenario.
RunResult run(const Scenario& s, std::uint64_t seed, const RunObserver* observer = nullptr);

/// Same slot loop, starting from a caller-built state (layout must match `s`).
RunResult run_from(const Scenario& s, NetworkState initial, std::uint64_t seed, const RunObserver* observer = nullptr);

struct AggregateSummary
{
    int n_seeds{0};
    double mean_throughput_bps{0.0};
    double throughput_std_bps{0.0};
    double jain_mean{0.0};
    double jain_std{0.0};
    double jain_sem{0.0};
    double drop_fraction{0.0};
    std::int64_t dropped_bytes{0};
    std::vector<double> per_ue_samples;  ///< pooled per-UE means, sorted
    std::vector<double> per_cell_samples; ///< pooled per-cell means, sorted
};

struct BatchResult
{
    std::vector<RunResult> runs; ///< ordered by seed
    AggregateSummary summary;
};

AggregateSummary summarize(std::span<const RunResult> runs);

/**
 * Runs seeds base_seed .. base_seed + n_seeds - 1 on up to `threads` worker
 * threads (0 = hardware concurrency). Results do not depend on `threads`.
 */
BatchResult run_batch(const Scenario& s, int n_seeds, std::uint64_t base_seed = 0, int threads = 0);

/// (sum x)^2 / (N sum x^2). Throws std::invalid_argument on empty or all-zero input.
double jain_index(std::span<const double> x);

struct CdfPoint
{
    double value{0.0};
    double probability{0.0};

    friend bool operator==(const CdfPoint&, const CdfPoint&) = default;
};

std::vector<CdfPoint> empirical_cdf(std::vector<double> samples);

} // namespace uavsim
