#pragma once

#include "uavsim/geometry.hpp"
#include "uavsim/rng.hpp"
#include "uavsim/scenario.hpp"

#include <vector>

namespace uavsim {

/**
 * One RPGM group: a random-waypoint leader and members that keep a rigid
 * offset from it. Offsets are re-drawn whenever the leader picks a new
 * waypoint.
 */
struct GroupState
{
    Vec2 leader_pos;
    Vec2 leader_waypoint;
    std::vector<int> member_ids;
    std::vector<Vec2> member_offsets;

    int member_count() const
    {
        return static_cast<int>(member_ids.size());
    }
};

struct UavState
{
    Position pos;
    Position target;
};

struct ClusterLayout
{
    std::vector<GroupState> groups;
    std::vector<Position> ues;
};

/// Uniform point in the disc of the given radius centered on the origin.
Vec2 draw_offset_in_disc(double radius, Rng& rng);

ClusterLayout init_clusters(const Scenario& s, Rng& rng);

/// Advances every group by dt and rewrites `ues` with the members' positions.
void step_groups(std::vector<GroupState>& groups,
                 std::vector<Position>& ues,
                 double dt,
                 const Scenario& s,
                 Rng& rng);

/// Straight-line horizontal move toward the target at fixed speed, no overshoot.
UavState step_uav(const UavState& u, double dt, double speed);

} // namespace uavsim
