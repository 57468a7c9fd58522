#include "uavsim/mobility.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace uavsim {

namespace {

Vec2
draw_inset_point(const Scenario& s, Rng& rng)
{
    const double r = s.cluster_radius_m;
    return {rng.uniform(r, s.area_width_m - r), rng.uniform(r, s.area_height_m - r)};
}

void
place_members(const GroupState& g, std::vector<Position>& ues, const Scenario& s)
{
    for (std::size_t k = 0; k < g.member_ids.size(); ++k)
    {
        const Vec2& off = g.member_offsets[k];
        auto& p = ues[static_cast<std::size_t>(g.member_ids[k])];
        p.x = std::clamp(g.leader_pos.x + off.x, 0.0, s.area_width_m);
        p.y = std::clamp(g.leader_pos.y + off.y, 0.0, s.area_height_m);
        p.z = s.ue_height_m;
    }
}

} // namespace

Vec2
draw_offset_in_disc(double radius, Rng& rng)
{
    // sqrt of a uniform radius fraction gives uniform area density
    const double rho = radius * std::sqrt(rng.uniform());
    const double phi = 2.0 * std::numbers::pi * rng.uniform();
    return {rho * std::cos(phi), rho * std::sin(phi)};
}

ClusterLayout
init_clusters(const Scenario& s, Rng& rng)
{
    ClusterLayout out;
    out.groups.resize(static_cast<std::size_t>(s.n_clusters));
    out.ues.assign(static_cast<std::size_t>(s.n_ues), Position{0.0, 0.0, s.ue_height_m});

    for (auto& g : out.groups)
    {
        g.leader_pos = draw_inset_point(s, rng);
        g.leader_waypoint = draw_inset_point(s, rng);
    }
    for (int ue = 0; ue < s.n_ues; ++ue)
    {
        out.groups[static_cast<std::size_t>(ue % s.n_clusters)].member_ids.push_back(ue);
    }
    for (auto& g : out.groups)
    {
        for (std::size_t k = 0; k < g.member_ids.size(); ++k)
        {
            g.member_offsets.push_back(draw_offset_in_disc(s.cluster_radius_m, rng));
        }
        place_members(g, out.ues, s);
    }
    return out;
}

void
step_groups(std::vector<GroupState>& groups,
            std::vector<Position>& ues,
            double dt,
            const Scenario& s,
            Rng& rng)
{
    if (dt <= 0.0)
    {
        return;
    }
    const double step = s.ue_speed_mps * dt;
    for (auto& g : groups)
    {
        const double dist = distance_2d(g.leader_pos, g.leader_waypoint);
        if (dist <= step)
        {
            g.leader_pos = g.leader_waypoint;
            g.leader_waypoint = draw_inset_point(s, rng);
            for (auto& off : g.member_offsets)
            {
                off = draw_offset_in_disc(s.cluster_radius_m, rng);
            }
        }
        else
        {
            const double f = step / dist;
            g.leader_pos.x += f * (g.leader_waypoint.x - g.leader_pos.x);
            g.leader_pos.y += f * (g.leader_waypoint.y - g.leader_pos.y);
        }
        place_members(g, ues, s);
    }
}

UavState
step_uav(const UavState& u, double dt, double speed)
{
    UavState next = u;
    const double dist = distance_2d(u.pos, u.target);
    const double step = speed * dt;
    if (dist <= step)
    {
        next.pos.x = u.target.x;
        next.pos.y = u.target.y;
    }
    else
    {
        const double f = step / dist;
        next.pos.x += f * (u.target.x - u.pos.x);
        next.pos.y += f * (u.target.y - u.pos.y);
    }
    return next;
}

} // namespace uavsim
