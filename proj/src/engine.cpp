#include "uavsim/engine.hpp"

#include "uavsim/placement.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <numeric>
#include <ostream>
#include <thread>

namespace uavsim {

namespace {

enum Stream : std::uint64_t
{
    kMobilityStream = 1,
    kLosStream = 2,
    kPsoStream = 3,
};

void
sync_uav_nodes(NetworkState& st)
{
    for (std::size_t u = 0; u < st.uavs.size(); ++u)
    {
        st.nodes.pos[static_cast<std::size_t>(st.nodes.n_aps) + u] = st.uavs[u].pos;
    }
}

void
dump_trajectories(std::ostream& os, const NetworkState& st)
{
    for (std::size_t u = 0; u < st.uavs.size(); ++u)
    {
        const auto& p = st.uavs[u].pos;
        os << st.time_s << ',' << st.nodes.n_aps + static_cast<int>(u) << ",uav," << p.x << ',' << p.y
           << ',' << p.z << '\n';
    }
    for (std::size_t i = 0; i < st.ues.size(); ++i)
    {
        const auto& p = st.ues[i];
        os << st.time_s << ',' << i << ",ue," << p.x << ',' << p.y << ',' << p.z << '\n';
    }
}

void
dump_links(std::ostream& os,
           const NetworkState& st,
           const LinkTable& links,
           std::span<const double> rates,
           std::span<const double> sinr_db)
{
    for (std::size_t i = 0; i < st.assoc.size(); ++i)
    {
        const int n = st.assoc[i];
        if (n == kOutOfCoverage)
        {
            continue;
        }
        os << st.time_s << ",ue" << i << ",node" << n << ',' << links.pl_db[links.index(static_cast<int>(i), n)]
           << ',' << sinr_db[i] << ',' << rates[i] << '\n';
    }
}

} // namespace

std::vector<double>
RunResult::cell_mean_bps() const
{
    std::vector<double> out;
    out.reserve(cell_series_bps.size());
    for (const auto& series : cell_series_bps)
    {
        const double sum = std::accumulate(series.begin(), series.end(), 0.0);
        out.push_back(series.empty() ? 0.0 : sum / static_cast<double>(series.size()));
    }
    return out;
}

double
RunResult::drop_fraction() const
{
    return sourced_bytes > 0 ? static_cast<double>(dropped_bytes) / static_cast<double>(sourced_bytes) : 0.0;
}

NetworkState
init_state(const Scenario& s, Rng& rng)
{
    NetworkState st;
    st.nodes.n_aps = s.n_aps;
    for (const auto& g : grid_positions(s.n_aps, s.area_width_m, s.area_height_m))
    {
        st.nodes.pos.push_back({g.x, g.y, s.ap_height_m});
    }
    for (const auto& g : grid_positions(s.n_uavs, s.area_width_m, s.area_height_m))
    {
        const Position p{g.x, g.y, s.uav_altitude_m};
        st.uavs.push_back({p, p});
        st.nodes.pos.push_back(p);
    }
    auto layout = init_clusters(s, rng);
    st.groups = std::move(layout.groups);
    st.ues = std::move(layout.ues);
    st.queues = UplinkQueues(s.n_ues, s.n_uavs, static_cast<std::int64_t>(s.buffer_capacity_bytes));
    st.assoc.assign(static_cast<std::size_t>(s.n_ues), kOutOfCoverage);
    return st;
}

namespace {

void
check_runnable(const Scenario& s)
{
    if (s.slots_total() - s.slots_warmup() <= 0 || s.duration_s <= s.warmup_s)
    {
        throw RunError("no measurement slots");
    }
    if (const auto v = validate_scenario(s); !v.empty())
    {
        throw RunError("invalid scenario: " + v.front().message);
    }
}

RunResult
simulate(const Scenario& s, NetworkState st, std::uint64_t seed, Rng& mobility_rng, const RunObserver* observer)
{
    const int n_slots = s.slots_total();
    const int warmup = s.slots_warmup();
    Rng los_rng(derive_seed(seed, kLosStream));

    const int measured = n_slots - warmup;
    const auto n_ues = static_cast<std::size_t>(s.n_ues);
    const auto n_nodes = static_cast<std::size_t>(s.n_nodes());
    const double to_bps = 8.0 / s.slot_s;

    RunResult r;
    r.seed = seed;
    r.cell_series_bps.assign(n_nodes, std::vector<double>(static_cast<std::size_t>(measured), 0.0));
    r.slot_mean_bps.reserve(static_cast<std::size_t>(measured));
    r.always_ap_attached.assign(n_ues, 1);
    std::vector<std::int64_t> measured_bytes(n_ues, 0);

    const bool ideal = s.mode == BackhaulMode::Ideal;
    const int reopt = s.slots_per_reopt();
    int epoch = 0;

    for (int k = 0; k < n_slots; ++k)
    {
        step_groups(st.groups, st.ues, s.slot_s, s, mobility_rng);

        if (k % reopt == 0)
        {
            std::vector<Position> uav_pos;
            for (const auto& u : st.uavs)
            {
                uav_pos.push_back(u.pos);
            }
            PsoResult pso;
            const auto targets = plan_targets(st.ues,
                                              st.aps(),
                                              uav_pos,
                                              s.mode,
                                              s.placement,
                                              s,
                                              derive_seed(seed, kPsoStream, static_cast<std::uint64_t>(epoch)),
                                              &pso);
            for (std::size_t u = 0; u < st.uavs.size(); ++u)
            {
                st.uavs[u].target = {targets[u].x, targets[u].y, s.uav_altitude_m};
            }
            if (observer && observer->pso)
            {
                for (std::size_t it = 0; it < pso.trace.size(); ++it)
                {
                    *observer->pso << epoch << ',' << it << ',' << pso.trace[it] << '\n';
                }
            }
            ++epoch;
        }

        for (auto& u : st.uavs)
        {
            u = step_uav(u, s.slot_s, s.uav_speed_mps);
        }
        sync_uav_nodes(st);

        const LinkTable expected = build_link_table(st.ues, st.nodes, s, nullptr);
        st.assoc = associate(expected, st.nodes, s);
        const LosMatrix los = draw_los(st.ues, st.nodes, los_rng);
        const LinkTable drawn = build_link_table(st.ues, st.nodes, s, &los);
        std::vector<double> sinr_db;
        const auto rates = access_rates(drawn, st.nodes, st.assoc, s, &sinr_db);
        const auto cells = allocate_cells(st.assoc, rates, st.nodes.size(), s.alpha);
        const auto x = access_throughputs(cells, s.n_ues);

        std::vector<double> backhaul(st.uavs.size(), kUnlimitedRate);
        if (!ideal)
        {
            for (std::size_t u = 0; u < st.uavs.size(); ++u)
            {
                backhaul[u] = best_backhaul(st.uavs[u].pos, st.nodes, s).rate_bps;
            }
        }
        const auto slot = serve_uplink(st.queues, st.assoc, x, backhaul, s.n_aps, s);

        for (std::size_t i = 0; i < n_ues; ++i)
        {
            if (st.assoc[i] == kOutOfCoverage || st.nodes.is_uav(st.assoc[i]))
            {
                r.always_ap_attached[i] = 0;
            }
        }
        r.sourced_bytes += slot.sourced_bytes;
        r.delivered_bytes += std::accumulate(slot.delivered_bytes.begin(), slot.delivered_bytes.end(), std::int64_t{0});

        if (observer && observer->trajectories)
        {
            dump_trajectories(*observer->trajectories, st);
        }
        if (observer && observer->links)
        {
            dump_links(*observer->links, st, drawn, rates, sinr_db);
        }
        if (observer && observer->cells)
        {
            for (const auto& c : cells)
            {
                for (std::size_t q = 0; q < c.members.size(); ++q)
                {
                    *observer->cells << st.time_s << ',' << c.cell << ',' << c.members[q] << ','
                                     << c.time_share[q] << ',' << c.access_rate[q] << ','
                                     << (c.cell >= s.n_aps ? backhaul[static_cast<std::size_t>(c.cell - s.n_aps)]
                                                           : kUnlimitedRate)
                                     << '\n';
                }
            }
        }

        if (k >= warmup)
        {
            const auto m = static_cast<std::size_t>(k - warmup);
            double slot_sum = 0.0;
            for (std::size_t i = 0; i < n_ues; ++i)
            {
                measured_bytes[i] += slot.delivered_bytes[i];
                slot_sum += static_cast<double>(slot.delivered_bytes[i]) * to_bps;
            }
            r.slot_mean_bps.push_back(slot_sum / static_cast<double>(n_ues));
            for (std::size_t n = 0; n < n_nodes; ++n)
            {
                r.cell_series_bps[n][m] = static_cast<double>(slot.cell_bytes[n]) * to_bps;
            }
        }
        st.time_s += s.slot_s;
    }

    const double window_s = measured * s.slot_s;
    r.per_ue_mean_bps.resize(n_ues);
    for (std::size_t i = 0; i < n_ues; ++i)
    {
        r.per_ue_mean_bps[i] = static_cast<double>(measured_bytes[i]) * 8.0 / window_s;
    }
    r.mean_throughput_bps =
        std::accumulate(r.per_ue_mean_bps.begin(), r.per_ue_mean_bps.end(), 0.0) / static_cast<double>(n_ues);
    const bool any = std::any_of(r.per_ue_mean_bps.begin(), r.per_ue_mean_bps.end(), [](double v) { return v > 0; });
    r.jain = any ? jain_index(r.per_ue_mean_bps) : 1.0 / static_cast<double>(n_ues);

    r.queues_conserved = true;
    auto tally = [&r](const QueueState& q) {
        r.dropped_bytes += q.dropped;
        r.backlog_bytes += q.total_backlog();
        r.queues_conserved = r.queues_conserved && q.conserved();
    };
    std::for_each(st.queues.ue.begin(), st.queues.ue.end(), tally);
    std::for_each(st.queues.uav.begin(), st.queues.uav.end(), tally);
    return r;
}

} // namespace

RunResult
run(const Scenario& s, std::uint64_t seed, const RunObserver* observer)
{
    check_runnable(s);
    Rng mobility_rng(derive_seed(seed, kMobilityStream));
    NetworkState st = init_state(s, mobility_rng);
    return simulate(s, std::move(st), seed, mobility_rng, observer);
}

RunResult
run_from(const Scenario& s, NetworkState initial, std::uint64_t seed, const RunObserver* observer)
{
    check_runnable(s);
    const auto n_nodes = static_cast<std::size_t>(s.n_nodes());
    if (initial.nodes.n_aps != s.n_aps || initial.nodes.pos.size() != n_nodes ||
        initial.uavs.size() != static_cast<std::size_t>(s.n_uavs) ||
        initial.ues.size() != static_cast<std::size_t>(s.n_ues) ||
        initial.groups.size() != static_cast<std::size_t>(s.n_clusters))
    {
        throw RunError("initial state does not match scenario");
    }
    Rng mobility_rng(derive_seed(seed, kMobilityStream));
    return simulate(s, std::move(initial), seed, mobility_rng, observer);
}

AggregateSummary
summarize(std::span<const RunResult> runs)
{
    AggregateSummary a;
    a.n_seeds = static_cast<int>(runs.size());
    if (runs.empty())
    {
        return a;
    }
    const double n = static_cast<double>(runs.size());
    double t_sum = 0.0;
    double j_sum = 0.0;
    std::int64_t sourced = 0;
    for (const auto& r : runs)
    {
        t_sum += r.mean_throughput_bps;
        j_sum += r.jain;
        sourced += r.sourced_bytes;
        a.dropped_bytes += r.dropped_bytes;
        a.per_ue_samples.insert(a.per_ue_samples.end(), r.per_ue_mean_bps.begin(), r.per_ue_mean_bps.end());
        const auto cm = r.cell_mean_bps();
        a.per_cell_samples.insert(a.per_cell_samples.end(), cm.begin(), cm.end());
    }
    a.mean_throughput_bps = t_sum / n;
    a.jain_mean = j_sum / n;
    double t_var = 0.0;
    double j_var = 0.0;
    for (const auto& r : runs)
    {
        t_var += (r.mean_throughput_bps - a.mean_throughput_bps) * (r.mean_throughput_bps - a.mean_throughput_bps);
        j_var += (r.jain - a.jain_mean) * (r.jain - a.jain_mean);
    }
    if (runs.size() > 1)
    {
        a.throughput_std_bps = std::sqrt(t_var / (n - 1.0));
        a.jain_std = std::sqrt(j_var / (n - 1.0));
        a.jain_sem = a.jain_std / std::sqrt(n);
    }
    a.drop_fraction = sourced > 0 ? static_cast<double>(a.dropped_bytes) / static_cast<double>(sourced) : 0.0;
    std::sort(a.per_ue_samples.begin(), a.per_ue_samples.end());
    std::sort(a.per_cell_samples.begin(), a.per_cell_samples.end());
    return a;
}

BatchResult
run_batch(const Scenario& s, int n_seeds, std::uint64_t base_seed, int threads)
{
    if (n_seeds < 1)
    {
        throw RunError("run_batch: n_seeds must be >= 1");
    }
    BatchResult out;
    out.runs.resize(static_cast<std::size_t>(n_seeds));

    int workers = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    workers = std::min(workers, n_seeds);

    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n_seeds));
    auto work = [&]() {
        for (int k = next.fetch_add(1); k < n_seeds; k = next.fetch_add(1))
        {
            try
            {
                out.runs[static_cast<std::size_t>(k)] = run(s, base_seed + static_cast<std::uint64_t>(k));
            }
            catch (...)
            {
                errors[static_cast<std::size_t>(k)] = std::current_exception();
            }
        }
    };
    if (workers == 1)
    {
        work();
    }
    else
    {
        std::vector<std::jthread> pool;
        for (int w = 0; w < workers; ++w)
        {
            pool.emplace_back(work);
        }
    }
    for (const auto& e : errors)
    {
        if (e)
        {
            std::rethrow_exception(e);
        }
    }
    out.summary = summarize(out.runs);
    return out;
}

double
jain_index(std::span<const double> x)
{
    if (x.empty())
    {
        throw std::invalid_argument("jain_index: empty input");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double v : x)
    {
        if (v < 0.0)
        {
            throw std::invalid_argument("jain_index: negative throughput");
        }
        sum += v;
        sum_sq += v * v;
    }
    if (sum_sq == 0.0)
    {
        throw std::invalid_argument("jain_index: all-zero input");
    }
    const double n = static_cast<double>(x.size());
    return std::clamp((sum * sum) / (n * sum_sq), 1.0 / n, 1.0);
}

std::vector<CdfPoint>
empirical_cdf(std::vector<double> samples)
{
    std::sort(samples.begin(), samples.end());
    std::vector<CdfPoint> out;
    const double n = static_cast<double>(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k)
    {
        // plateaus merge into the last occurrence of each value
        if (k + 1 < samples.size() && samples[k + 1] == samples[k])
        {
            continue;
        }
        out.push_back({samples[k], static_cast<double>(k + 1) / n});
    }
    return out;
}

} // namespace uavsim
