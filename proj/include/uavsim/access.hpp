#pragma once

#include "uavsim/channel.hpp"
#include "uavsim/scenario.hpp"

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace uavsim {

constexpr double kUnlimitedRate = std::numeric_limits<double>::infinity();

/**
 * Attach each UE to the node with the highest expected received power
 * (main-lobe gains, LOS-probability-weighted path loss). `expected_links`
 * must be built without a LOS matrix. Ties go to the lowest node id; UEs
 * whose best expected SNR is below the floor are out of coverage.
 */
Association associate(const LinkTable& expected_links, const NodeLayout& nodes, const Scenario& s);

/// Time shares maximizing the sum of alpha-fair utilities of tau_i * r_i.
/// Throws std::invalid_argument on empty input or non-positive rates.
std::vector<double> alpha_fair_shares(std::span<const double> rates, double alpha);

/// Alpha-fair utility; log for alpha == 1.
double alpha_utility(double x, double alpha);

struct CellAllocation
{
    int cell{0};
    std::vector<int> members;
    std::vector<double> time_share;
    std::vector<double> access_rate;
    double backhaul_rate_bps{kUnlimitedRate};
    std::vector<double> delivered_rate;

    double total_access() const;
    double total_delivered() const;
};

/// Splits one cell's time among its members. Zero-rate members get no time.
CellAllocation allocate_cell(int cell,
                             std::vector<int> members,
                             std::span<const double> full_rates,
                             double alpha);

/// One allocation per node, in node-id order. Delivered equals access.
std::vector<CellAllocation> allocate_cells(const Association& assoc,
                                           std::span<const double> full_rates,
                                           int n_nodes,
                                           double alpha);

/// Scales delivered rates so the cell total fits the backhaul capacity.
CellAllocation apply_backhaul_cap(CellAllocation alloc, double c_bh);

/// Per-UE access throughput x_i from the cell allocations.
std::vector<double> access_throughputs(std::span<const CellAllocation> cells, int n_ues);

/// Byte-granular fluid queue with per-flow backlogs and a shared capacity.
struct QueueState
{
    std::vector<std::int64_t> backlog;
    std::int64_t capacity{0};
    std::int64_t arrived{0};
    std::int64_t served{0};
    std::int64_t dropped{0};

    QueueState() = default;
    QueueState(std::size_t flows, std::int64_t capacity_bytes)
        : backlog(flows, 0),
          capacity(capacity_bytes)
    {
    }

    std::int64_t total_backlog() const;
    bool conserved() const
    {
        return arrived == served + dropped + total_backlog();
    }

    friend bool operator==(const QueueState&, const QueueState&) = default;
};

struct QueueStep
{
    std::vector<std::int64_t> served;
    std::vector<std::int64_t> dropped;
};

/**
 * Serves each flow from backlog plus arrivals, then tail-drops any excess
 * over capacity from the newly arrived bytes in proportion to arrivals.
 */
QueueStep update_queue(QueueState& q,
                       std::span<const std::int64_t> arrivals,
                       std::span<const std::int64_t> service);

/**
 * Splits `total` integer units over flows proportionally to `weights`,
 * never exceeding `caps`. Leftover units go by largest remainder, ties to
 * the lowest index.
 */
std::vector<std::int64_t> proportional_split(std::int64_t total,
                                             std::span<const std::int64_t> weights,
                                             std::span<const std::int64_t> caps);

/// Queues of one run: a single-flow queue per UE, a per-UE-flow queue per UAV.
struct UplinkQueues
{
    std::vector<QueueState> ue;
    std::vector<QueueState> uav;

    UplinkQueues() = default;
    UplinkQueues(int n_ues, int n_uavs, std::int64_t capacity_bytes);

    friend bool operator==(const UplinkQueues&, const UplinkQueues&) = default;
};

struct UplinkSlot
{
    std::vector<std::int64_t> delivered_bytes; ///< per UE, arriving at any AP
    std::vector<std::int64_t> cell_bytes;      ///< per node: AP direct, UAV backhaul
    std::int64_t sourced_bytes{0};
};

/**
 * One slot of uplink traffic. Every UE sources its offered load, sends
 * x_i * slot toward its server, UAVs forward up to their backhaul capacity
 * (per-UAV, may be kUnlimitedRate) split over flows by backlog.
 */
UplinkSlot serve_uplink(UplinkQueues& queues,
                        const Association& assoc,
                        std::span<const double> access_throughput_bps,
                        std::span<const double> backhaul_bps,
                        int n_aps,
                        const Scenario& s);

/// Bytes a rate moves in one slot, rounded down.
std::int64_t bytes_in_slot(double rate_bps, double slot_s);

} // namespace uavsim
