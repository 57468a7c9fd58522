#include "uavsim/placement.hpp"

#include "uavsim/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <tuple>

namespace uavsim {

std::vector<Vec2>
grid_positions(int n, double width, double height)
{
    const int cols = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
    const int rows = (n + cols - 1) / cols;
    std::vector<Vec2> out;
    out.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
    {
        const int i = k / cols;
        const int j = k % cols;
        out.push_back({(j + 0.5) * width / cols, (i + 0.5) * height / rows});
    }
    return out;
}

PlacementEvaluator::PlacementEvaluator(const Scenario& s,
                                       std::span<const Position> ues,
                                       std::span<const Position> aps,
                                       BackhaulMode mode)
    : s_(s),
      ues_(ues.begin(), ues.end()),
      mode_(mode)
{
    base_nodes_.n_aps = static_cast<int>(aps.size());
    base_nodes_.pos.assign(aps.begin(), aps.end());
    base_nodes_.pos.resize(aps.size() + static_cast<std::size_t>(s.n_uavs),
                           Position{0.0, 0.0, s.uav_altitude_m});
    base_links_ = build_link_table(ues_, base_nodes_, s_, nullptr);
}

PlacementEvaluator::Breakdown
PlacementEvaluator::evaluate(std::span<const double> candidate) const
{
    NodeLayout nodes = base_nodes_;
    LinkTable links = base_links_;
    for (int u = 0; u < s_.n_uavs; ++u)
    {
        const int node = nodes.n_aps + u;
        Position& p = nodes.pos[static_cast<std::size_t>(node)];
        p = {candidate[2 * static_cast<std::size_t>(u)],
             candidate[2 * static_cast<std::size_t>(u) + 1],
             s_.uav_altitude_m};
        fill_link_column(links, node, p, ues_, s_, nullptr);
    }

    Breakdown b;
    b.assoc = associate(links, nodes, s_);
    const auto rates = access_rates(links, nodes, b.assoc, s_);
    b.cells = allocate_cells(b.assoc, rates, nodes.size(), s_.alpha);
    for (int u = 0; u < s_.n_uavs; ++u)
    {
        const int node = nodes.n_aps + u;
        const double c_bh = best_backhaul(nodes.pos[static_cast<std::size_t>(node)], nodes, s_).rate_bps;
        b.backhaul_bps.push_back(c_bh);
        if (mode_ == BackhaulMode::BackhaulAware)
        {
            auto& cell = b.cells[static_cast<std::size_t>(node)];
            cell = apply_backhaul_cap(std::move(cell), c_bh);
        }
    }

    b.delivered_bps.assign(ues_.size(), 0.0);
    for (const auto& c : b.cells)
    {
        for (std::size_t k = 0; k < c.members.size(); ++k)
        {
            b.delivered_bps[static_cast<std::size_t>(c.members[k])] = c.delivered_rate[k];
        }
    }
    b.utility = 0.0;
    for (double y : b.delivered_bps)
    {
        b.utility += alpha_utility(std::max(y, kUtilityFloorBps), s_.alpha);
    }
    return b;
}

double
placement_fitness(std::span<const double> candidate,
                  std::span<const Position> ues,
                  std::span<const Position> aps,
                  BackhaulMode mode,
                  const Scenario& s)
{
    return PlacementEvaluator(s, ues, aps, mode)(candidate);
}

Bounds
placement_bounds(const Scenario& s)
{
    Bounds b;
    for (int u = 0; u < s.n_uavs; ++u)
    {
        b.lo.insert(b.lo.end(), {0.0, 0.0});
        b.hi.insert(b.hi.end(), {s.area_width_m, s.area_height_m});
    }
    return b;
}

namespace {

constexpr std::uint64_t kInitStream = 0x1417;

struct Particle
{
    std::vector<double> x;
    std::vector<double> v;
    std::vector<double> best_x;
    double best_f{-std::numeric_limits<double>::infinity()};
};

} // namespace

PsoResult
pso_optimize(const Objective& fitness,
             const Bounds& bounds,
             const PsoParams& p,
             std::uint64_t seed,
             std::span<const double> warm_start)
{
    if (p.swarm_size < 2)
    {
        throw std::invalid_argument("pso_optimize: swarm_size must be >= 2");
    }
    const std::size_t dim = bounds.lo.size();
    std::vector<double> vmax(dim);
    for (std::size_t d = 0; d < dim; ++d)
    {
        vmax[d] = p.velocity_clamp_frac * (bounds.hi[d] - bounds.lo[d]);
    }

    std::vector<Particle> swarm(static_cast<std::size_t>(p.swarm_size));
    for (std::size_t k = 0; k < swarm.size(); ++k)
    {
        auto& pt = swarm[k];
        pt.x.resize(dim);
        pt.v.assign(dim, 0.0);
        if (k == 0 && warm_start.size() == dim)
        {
            for (std::size_t d = 0; d < dim; ++d)
            {
                pt.x[d] = std::clamp(warm_start[d], bounds.lo[d], bounds.hi[d]);
            }
        }
        else
        {
            Rng rng(derive_seed(seed, kInitStream, k));
            for (std::size_t d = 0; d < dim; ++d)
            {
                pt.x[d] = rng.uniform(bounds.lo[d], bounds.hi[d]);
            }
        }
        pt.best_x = pt.x;
        pt.best_f = fitness(pt.x);
    }

    PsoResult result;
    auto update_gbest = [&]() {
        for (const auto& pt : swarm)
        {
            if (result.best.empty() || pt.best_f > result.fitness)
            {
                result.best = pt.best_x;
                result.fitness = pt.best_f;
            }
        }
        result.trace.push_back(result.fitness);
    };
    update_gbest();

    for (int it = 1; it <= p.iterations; ++it)
    {
        for (std::size_t k = 0; k < swarm.size(); ++k)
        {
            auto& pt = swarm[k];
            Rng rng(derive_seed(seed, static_cast<std::uint64_t>(it), k));
            for (std::size_t d = 0; d < dim; ++d)
            {
                const double u1 = rng.uniform();
                const double u2 = rng.uniform();
                double v = p.inertia_w * pt.v[d] + p.cognitive_c1 * u1 * (pt.best_x[d] - pt.x[d]) +
                           p.social_c2 * u2 * (result.best[d] - pt.x[d]);
                v = std::clamp(v, -vmax[d], vmax[d]);
                pt.v[d] = v;
                pt.x[d] = std::clamp(pt.x[d] + v, bounds.lo[d], bounds.hi[d]);
            }
            const double f = fitness(pt.x);
            if (f > pt.best_f)
            {
                pt.best_f = f;
                pt.best_x = pt.x;
            }
        }
        update_gbest();
    }
    return result;
}

std::vector<int>
match_targets(std::span<const Vec2> uavs, std::span<const Vec2> targets)
{
    std::vector<std::tuple<double, int, int>> pairs;
    for (std::size_t u = 0; u < uavs.size(); ++u)
    {
        for (std::size_t t = 0; t < targets.size(); ++t)
        {
            pairs.emplace_back(distance_2d(uavs[u], targets[t]), static_cast<int>(u), static_cast<int>(t));
        }
    }
    std::sort(pairs.begin(), pairs.end());

    std::vector<int> assignment(uavs.size(), -1);
    std::vector<bool> taken(targets.size(), false);
    for (const auto& [d, u, t] : pairs)
    {
        if (assignment[static_cast<std::size_t>(u)] < 0 && !taken[static_cast<std::size_t>(t)])
        {
            assignment[static_cast<std::size_t>(u)] = t;
            taken[static_cast<std::size_t>(t)] = true;
        }
    }
    return assignment;
}

std::vector<Vec2>
plan_targets(std::span<const Position> ues,
             std::span<const Position> aps,
             std::span<const Position> uavs,
             BackhaulMode mode,
             PlacementStrategy strategy,
             const Scenario& s,
             std::uint64_t seed,
             PsoResult* pso_out)
{
    std::vector<Vec2> targets;
    if (strategy == PlacementStrategy::Grid)
    {
        targets = grid_positions(s.n_uavs, s.area_width_m, s.area_height_m);
    }
    else
    {
        const PlacementEvaluator evaluator(s, ues, aps, mode);
        std::vector<double> incumbent;
        for (const auto& u : uavs)
        {
            incumbent.insert(incumbent.end(), {u.x, u.y});
        }
        auto result = pso_optimize(
            [&evaluator](std::span<const double> c) { return evaluator(c); },
            placement_bounds(s),
            s.pso,
            seed,
            incumbent);
        for (int u = 0; u < s.n_uavs; ++u)
        {
            targets.push_back({result.best[2 * static_cast<std::size_t>(u)],
                               result.best[2 * static_cast<std::size_t>(u) + 1]});
        }
        if (pso_out)
        {
            *pso_out = std::move(result);
        }
    }

    std::vector<Vec2> current;
    for (const auto& u : uavs)
    {
        current.push_back(u.horizontal());
    }
    const auto assignment = match_targets(current, targets);
    std::vector<Vec2> out;
    out.reserve(current.size());
    for (int t : assignment)
    {
        out.push_back(targets[static_cast<std::size_t>(t)]);
    }
    return out;
}

} // namespace uavsim
