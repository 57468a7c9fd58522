#pragma once

#include "uavsim/access.hpp"
#include "uavsim/channel.hpp"
#include "uavsim/geometry.hpp"
#include "uavsim/scenario.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace uavsim {

/// Row-major cell centers of a ceil(sqrt(n))-column grid over the area.
std::vector<Vec2> grid_positions(int n, double width, double height);

/// Per-UE throughput floor inside the placement utility, bit/s.
constexpr double kUtilityFloorBps = 1e3;

/**
 * Placement objective for one network snapshot. A candidate is the flat
 * vector (x0, y0, x1, y1, ...) of UAV horizontal positions. The AP side of
 * the link table is computed once per snapshot.
 */
class PlacementEvaluator
{
  public:
    PlacementEvaluator(const Scenario& s,
                       std::span<const Position> ues,
                       std::span<const Position> aps,
                       BackhaulMode mode);

    struct Breakdown
    {
        Association assoc;
        std::vector<CellAllocation> cells;
        std::vector<double> backhaul_bps; ///< per UAV, finite even when not applied
        std::vector<double> delivered_bps;
        double utility{0.0};
    };

    Breakdown evaluate(std::span<const double> candidate) const;
    double operator()(std::span<const double> candidate) const
    {
        return evaluate(candidate).utility;
    }

  private:
    const Scenario& s_;
    std::vector<Position> ues_;
    NodeLayout base_nodes_;
    LinkTable base_links_;
    BackhaulMode mode_;
};

/// Convenience wrapper around PlacementEvaluator for a single candidate.
double placement_fitness(std::span<const double> candidate,
                         std::span<const Position> ues,
                         std::span<const Position> aps,
                         BackhaulMode mode,
                         const Scenario& s);

struct Bounds
{
    std::vector<double> lo;
    std::vector<double> hi;
};

/// Box [0, W] x [0, H] repeated for every UAV.
Bounds placement_bounds(const Scenario& s);

struct PsoResult
{
    std::vector<double> best;
    double fitness{0.0};
    std::vector<double> trace; ///< gbest fitness after init and after each iteration
};

using Objective = std::function<double(std::span<const double>)>;

/**
 * Global-best PSO (maximization). Random numbers come from substreams of
 * `seed` indexed by (iteration, particle), so results do not depend on the
 * evaluation order. A non-empty `warm_start` replaces particle 0.
 */
PsoResult pso_optimize(const Objective& fitness,
                       const Bounds& bounds,
                       const PsoParams& p,
                       std::uint64_t seed,
                       std::span<const double> warm_start = {});

/// Greedy matching over ascending UAV-target distance; returns the target
/// index for each UAV.
std::vector<int> match_targets(std::span<const Vec2> uavs, std::span<const Vec2> targets);

/**
 * New per-UAV targets (in UAV order). Grid ignores the snapshot; Pso
 * optimizes the mode's fitness warm-started from the current UAV positions.
 */
std::vector<Vec2> plan_targets(std::span<const Position> ues,
                               std::span<const Position> aps,
                               std::span<const Position> uavs,
                               BackhaulMode mode,
                               PlacementStrategy strategy,
                               const Scenario& s,
                               std::uint64_t seed,
                               PsoResult* pso_out = nullptr);

} // namespace uavsim
