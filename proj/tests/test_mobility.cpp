#include "uavsim/geometry.hpp"
#include "uavsim/mobility.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace uavsim;

namespace {

double
max_member_spread(const std::vector<GroupState>& groups, const std::vector<Position>& ues)
{
    double worst = 0.0;
    for (const auto& g : groups)
    {
        for (int id : g.member_ids)
        {
            const auto& p = ues[static_cast<std::size_t>(id)];
            worst = std::max(worst, std::hypot(p.x - g.leader_pos.x, p.y - g.leader_pos.y));
        }
    }
    return worst;
}

} // namespace

TEST_SUITE("mobility")
{
    TEST_CASE("cluster sizes follow round robin")
    {
        Scenario s;
        Rng rng(1);
        auto four = init_clusters(s, rng);
        REQUIRE(four.groups.size() == 4);
        for (const auto& g : four.groups)
        {
            CHECK(g.member_count() == 25);
        }
        s.n_clusters = 3;
        auto three = init_clusters(s, rng);
        CHECK(three.groups[0].member_count() == 34);
        CHECK(three.groups[1].member_count() == 33);
        CHECK(three.groups[2].member_count() == 33);
        CHECK(three.ues.size() == 100);
    }

    TEST_CASE("members start inside the cluster disc")
    {
        const Scenario s;
        for (std::uint64_t seed = 0; seed < 50; ++seed)
        {
            Rng rng(seed);
            const auto l = init_clusters(s, rng);
            CHECK(max_member_spread(l.groups, l.ues) <= s.cluster_radius_m + 1e-9);
            for (const auto& p : l.ues)
            {
                CHECK(p.z == s.ue_height_m);
            }
        }
    }

    TEST_CASE("leader kinematics")
    {
        Scenario s;
        s.n_ues = 1;
        s.n_clusters = 1;
        std::vector<GroupState> g(1);
        g[0].leader_pos = {100, 100};
        g[0].leader_waypoint = {200, 100};
        g[0].member_ids = {0};
        g[0].member_offsets = {{0, 0}};
        std::vector<Position> ues{{100, 100, 1.5}};
        Rng rng(3);

        step_groups(g, ues, 0.0, s, rng);
        CHECK(g[0].leader_pos.x == 100.0);
        CHECK(ues[0].x == 100.0);

        step_groups(g, ues, 1.0, s, rng);
        CHECK(g[0].leader_pos.x == doctest::Approx(101.4).epsilon(1e-12));
        CHECK(g[0].leader_pos.y == doctest::Approx(100.0));
        CHECK(ues[0].x == doctest::Approx(101.4));
    }

    TEST_CASE("containment and cohesion over many steps")
    {
        Scenario s;
        s.ue_speed_mps = 15.0; // many waypoint renewals in the horizon
        Rng rng(11);
        auto l = init_clusters(s, rng);
        for (int k = 0; k < 10000; ++k)
        {
            step_groups(l.groups, l.ues, s.slot_s, s, rng);
            bool ok = max_member_spread(l.groups, l.ues) <= s.cluster_radius_m + 1e-9;
            for (const auto& p : l.ues)
            {
                ok = ok && p.x >= 0 && p.x <= s.area_width_m && p.y >= 0 && p.y <= s.area_height_m;
            }
            REQUIRE(ok);
        }
    }

    TEST_CASE("same seed, same trajectory")
    {
        const Scenario s;
        Rng a(5);
        Rng b(5);
        auto la = init_clusters(s, a);
        auto lb = init_clusters(s, b);
        for (int k = 0; k < 300; ++k)
        {
            step_groups(la.groups, la.ues, s.slot_s, s, a);
            step_groups(lb.groups, lb.ues, s.slot_s, s, b);
        }
        for (std::size_t i = 0; i < la.ues.size(); ++i)
        {
            CHECK(la.ues[i].x == lb.ues[i].x);
            CHECK(la.ues[i].y == lb.ues[i].y);
        }
    }

    TEST_CASE("uav steps")
    {
        const UavState u{{0, 0, 20}, {30, 40, 20}};
        const auto n = step_uav(u, 1.0, 10.0);
        CHECK(n.pos.x == doctest::Approx(6.0));
        CHECK(n.pos.y == doctest::Approx(8.0));
        CHECK(n.pos.z == 20.0);

        const UavState still{{10, 10, 20}, {10, 10, 20}};
        CHECK(step_uav(still, 1.0, 10.0).pos.x == 10.0);

        const UavState near{{0, 0, 20}, {3, 4, 20}};
        const auto arrived = step_uav(near, 1.0, 10.0);
        CHECK(arrived.pos.x == 3.0);
        CHECK(arrived.pos.y == 4.0);
    }

    TEST_CASE("uav speed bound")
    {
        Rng rng(8);
        for (int k = 0; k < 2000; ++k)
        {
            const UavState u{{rng.uniform(0, 600), rng.uniform(0, 600), 20}, {rng.uniform(0, 600), rng.uniform(0, 600), 20}};
            const double speed = rng.uniform(0.5, 30);
            const double dt = rng.uniform(0.01, 2);
            const auto n = step_uav(u, dt, speed);
            CHECK(distance_2d(u.pos, n.pos) <= speed * dt + 1e-9);
            CHECK(distance_2d(n.pos, u.target) <= distance_2d(u.pos, u.target) + 1e-9);
        }
    }

    TEST_CASE("offsets cover the disc uniformly by area")
    {
        Rng rng(2);
        int inner = 0;
        const int n = 100000;
        for (int k = 0; k < n; ++k)
        {
            const auto o = draw_offset_in_disc(50.0, rng);
            CHECK(std::hypot(o.x, o.y) <= 50.0);
            inner += std::hypot(o.x, o.y) <= 25.0 ? 1 : 0;
        }
        // a quarter of the area lies inside half the radius
        CHECK(static_cast<double>(inner) / n == doctest::Approx(0.25).epsilon(0.02));
    }
}
