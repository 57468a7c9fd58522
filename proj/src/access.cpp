#include "uavsim/access.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace uavsim {

namespace {

// products of two byte counts can exceed 64 bits
__extension__ using Wide = __int128;

} // namespace

Association
associate(const LinkTable& expected_links, const NodeLayout& nodes, const Scenario& s)
{
    Association assoc(static_cast<std::size_t>(expected_links.n_ues), kOutOfCoverage);
    const double ue_gain = main_lobe_gain_db(s.ue_array);
    const double noise = noise_dbm(s);
    std::vector<double> eirp(static_cast<std::size_t>(expected_links.n_nodes));
    for (int node = 0; node < expected_links.n_nodes; ++node)
    {
        eirp[static_cast<std::size_t>(node)] =
            s.tx_power_dbm + ue_gain + main_lobe_gain_db(access_array(nodes, node, s));
    }
    for (int ue = 0; ue < expected_links.n_ues; ++ue)
    {
        int best = kOutOfCoverage;
        double best_power = -std::numeric_limits<double>::infinity();
        for (int node = 0; node < expected_links.n_nodes; ++node)
        {
            const double p =
                eirp[static_cast<std::size_t>(node)] - expected_links.pl_db[expected_links.index(ue, node)];
            if (p > best_power)
            {
                best_power = p;
                best = node;
            }
        }
        if (best != kOutOfCoverage && best_power - noise >= s.sinr_floor_db)
        {
            assoc[static_cast<std::size_t>(ue)] = best;
        }
    }
    return assoc;
}

std::vector<double>
alpha_fair_shares(std::span<const double> rates, double alpha)
{
    if (rates.empty())
    {
        throw std::invalid_argument("alpha_fair_shares: empty rate vector");
    }
    if (alpha < 1.0)
    {
        throw std::invalid_argument("alpha_fair_shares: alpha must be >= 1");
    }
    double r_max = 0.0;
    for (double r : rates)
    {
        if (!(r > 0.0))
        {
            throw std::invalid_argument("alpha_fair_shares: rates must be positive");
        }
        r_max = std::max(r_max, r);
    }
    // tau_i ~ r_i^((1 - alpha) / alpha), evaluated relative to the largest rate
    const double exponent = (1.0 - alpha) / alpha;
    std::vector<double> tau(rates.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < rates.size(); ++i)
    {
        const double rel = rates[i] / r_max;
        tau[i] = alpha == 2.0 ? 1.0 / std::sqrt(rel) : std::exp(exponent * std::log(rel));
        sum += tau[i];
    }
    for (double& t : tau)
    {
        t /= sum;
    }
    return tau;
}

double
alpha_utility(double x, double alpha)
{
    if (alpha == 1.0)
    {
        return std::log(x);
    }
    if (alpha == 2.0)
    {
        return -1.0 / x;
    }
    return std::pow(x, 1.0 - alpha) / (1.0 - alpha);
}

double
CellAllocation::total_access() const
{
    return std::accumulate(access_rate.begin(), access_rate.end(), 0.0);
}

double
CellAllocation::total_delivered() const
{
    return std::accumulate(delivered_rate.begin(), delivered_rate.end(), 0.0);
}

CellAllocation
allocate_cell(int cell, std::vector<int> members, std::span<const double> full_rates, double alpha)
{
    CellAllocation a;
    a.cell = cell;
    a.members = std::move(members);
    const std::size_t n = a.members.size();
    a.time_share.assign(n, 0.0);
    a.access_rate.assign(n, 0.0);

    std::vector<std::size_t> active;
    std::vector<double> active_rates;
    for (std::size_t k = 0; k < n; ++k)
    {
        const double r = full_rates[static_cast<std::size_t>(a.members[k])];
        if (r > 0.0)
        {
            active.push_back(k);
            active_rates.push_back(r);
        }
    }
    if (!active.empty())
    {
        const auto tau = alpha_fair_shares(active_rates, alpha);
        for (std::size_t q = 0; q < active.size(); ++q)
        {
            a.time_share[active[q]] = tau[q];
            a.access_rate[active[q]] = tau[q] * active_rates[q];
        }
    }
    a.delivered_rate = a.access_rate;
    return a;
}

std::vector<CellAllocation>
allocate_cells(const Association& assoc, std::span<const double> full_rates, int n_nodes, double alpha)
{
    std::vector<std::vector<int>> members(static_cast<std::size_t>(n_nodes));
    for (std::size_t ue = 0; ue < assoc.size(); ++ue)
    {
        if (assoc[ue] != kOutOfCoverage)
        {
            members[static_cast<std::size_t>(assoc[ue])].push_back(static_cast<int>(ue));
        }
    }
    std::vector<CellAllocation> cells;
    cells.reserve(static_cast<std::size_t>(n_nodes));
    for (int node = 0; node < n_nodes; ++node)
    {
        cells.push_back(allocate_cell(node, std::move(members[static_cast<std::size_t>(node)]), full_rates, alpha));
    }
    return cells;
}

CellAllocation
apply_backhaul_cap(CellAllocation alloc, double c_bh)
{
    if (c_bh < 0.0 || std::isnan(c_bh))
    {
        throw std::invalid_argument("apply_backhaul_cap: negative backhaul capacity");
    }
    alloc.backhaul_rate_bps = c_bh;
    const double total = alloc.total_access();
    const double scale = (total > 0.0 && c_bh < total) ? c_bh / total : 1.0;
    alloc.delivered_rate.resize(alloc.access_rate.size());
    for (std::size_t k = 0; k < alloc.access_rate.size(); ++k)
    {
        alloc.delivered_rate[k] = scale * alloc.access_rate[k];
    }
    return alloc;
}

std::vector<double>
access_throughputs(std::span<const CellAllocation> cells, int n_ues)
{
    std::vector<double> x(static_cast<std::size_t>(n_ues), 0.0);
    for (const auto& c : cells)
    {
        for (std::size_t k = 0; k < c.members.size(); ++k)
        {
            x[static_cast<std::size_t>(c.members[k])] = c.access_rate[k];
        }
    }
    return x;
}

std::int64_t
QueueState::total_backlog() const
{
    return std::accumulate(backlog.begin(), backlog.end(), std::int64_t{0});
}

std::vector<std::int64_t>
proportional_split(std::int64_t total,
                   std::span<const std::int64_t> weights,
                   std::span<const std::int64_t> caps)
{
    const std::size_t n = weights.size();
    std::vector<std::int64_t> out(n, 0);
    std::vector<bool> open(n);
    for (std::size_t f = 0; f < n; ++f)
    {
        open[f] = weights[f] > 0 && caps[f] > 0;
    }

    std::int64_t remaining = total;
    while (remaining > 0)
    {
        Wide weight_sum = 0;
        for (std::size_t f = 0; f < n; ++f)
        {
            if (open[f])
                weight_sum += weights[f];
        }
        if (weight_sum == 0)
        {
            break;
        }
        // Flows whose exact share reaches their cap are filled and closed;
        // repeat until no cap binds.
        bool saturated = false;
        for (std::size_t f = 0; f < n; ++f)
        {
            if (!open[f])
                continue;
            const Wide room = caps[f] - out[f];
            if (static_cast<Wide>(remaining) * weights[f] >= room * weight_sum)
            {
                saturated = true;
            }
        }
        if (saturated)
        {
            std::int64_t used = 0;
            for (std::size_t f = 0; f < n; ++f)
            {
                if (!open[f])
                    continue;
                const Wide room = caps[f] - out[f];
                if (static_cast<Wide>(remaining) * weights[f] >= room * weight_sum)
                {
                    out[f] += static_cast<std::int64_t>(room);
                    used += static_cast<std::int64_t>(room);
                    open[f] = false;
                }
            }
            remaining -= used;
            continue;
        }

        std::vector<std::int64_t> frac(n, -1);
        std::int64_t used = 0;
        for (std::size_t f = 0; f < n; ++f)
        {
            if (!open[f])
                continue;
            const Wide num = static_cast<Wide>(remaining) * weights[f];
            const auto share = static_cast<std::int64_t>(num / weight_sum);
            frac[f] = static_cast<std::int64_t>(num % weight_sum);
            out[f] += share;
            used += share;
        }
        std::int64_t leftover = remaining - used;
        std::vector<std::size_t> order;
        for (std::size_t f = 0; f < n; ++f)
        {
            if (open[f])
                order.push_back(f);
        }
        std::stable_sort(order.begin(), order.end(), [&frac](std::size_t a, std::size_t b) {
            return frac[a] > frac[b];
        });
        for (std::size_t q = 0; q < order.size() && leftover > 0; ++q)
        {
            ++out[order[q]];
            --leftover;
        }
        remaining = 0;
    }
    return out;
}

QueueStep
update_queue(QueueState& q, std::span<const std::int64_t> arrivals, std::span<const std::int64_t> service)
{
    const std::size_t n = q.backlog.size();
    QueueStep step{std::vector<std::int64_t>(n, 0), std::vector<std::int64_t>(n, 0)};

    std::int64_t total = 0;
    for (std::size_t f = 0; f < n; ++f)
    {
        const std::int64_t available = q.backlog[f] + arrivals[f];
        step.served[f] = std::min(std::max<std::int64_t>(service[f], 0), available);
        q.backlog[f] = available - step.served[f];
        q.arrived += arrivals[f];
        q.served += step.served[f];
        total += q.backlog[f];
    }

    const std::int64_t excess = total - q.capacity;
    if (excess > 0)
    {
        std::vector<std::int64_t> caps(n);
        for (std::size_t f = 0; f < n; ++f)
        {
            caps[f] = std::min(arrivals[f], q.backlog[f]);
        }
        step.dropped = proportional_split(excess, arrivals, caps);
        for (std::size_t f = 0; f < n; ++f)
        {
            q.backlog[f] -= step.dropped[f];
            q.dropped += step.dropped[f];
        }
    }
    return step;
}

UplinkQueues::UplinkQueues(int n_ues, int n_uavs, std::int64_t capacity_bytes)
{
    ue.assign(static_cast<std::size_t>(n_ues), QueueState(1, capacity_bytes));
    uav.assign(static_cast<std::size_t>(n_uavs),
               QueueState(static_cast<std::size_t>(n_ues), capacity_bytes));
}

std::int64_t
bytes_in_slot(double rate_bps, double slot_s)
{
    if (!(rate_bps > 0.0))
    {
        return 0;
    }
    if (std::isinf(rate_bps))
    {
        return std::numeric_limits<std::int64_t>::max();
    }
    // round away binary noise before flooring (500e6 * 0.1 / 8 is exact)
    const double bytes = rate_bps * slot_s / 8.0;
    return static_cast<std::int64_t>(std::floor(bytes + 1e-6));
}

UplinkSlot
serve_uplink(UplinkQueues& queues,
             const Association& assoc,
             std::span<const double> access_throughput_bps,
             std::span<const double> backhaul_bps,
             int n_aps,
             const Scenario& s)
{
    const std::size_t n_ues = queues.ue.size();
    const std::size_t n_uavs = queues.uav.size();
    UplinkSlot out;
    out.delivered_bytes.assign(n_ues, 0);
    out.cell_bytes.assign(static_cast<std::size_t>(n_aps) + n_uavs, 0);

    const std::int64_t offered = bytes_in_slot(s.offered_rate_bps, s.slot_s);
    std::vector<std::vector<std::int64_t>> relay_arrivals(n_uavs, std::vector<std::int64_t>(n_ues, 0));

    for (std::size_t i = 0; i < n_ues; ++i)
    {
        const int server = assoc[i];
        const std::int64_t service =
            server == kOutOfCoverage ? 0 : bytes_in_slot(access_throughput_bps[i], s.slot_s);
        const std::int64_t a[1] = {offered};
        const std::int64_t sv[1] = {service};
        const auto step = update_queue(queues.ue[i], a, sv);
        out.sourced_bytes += offered;
        if (step.served[0] == 0)
        {
            continue;
        }
        if (server < n_aps)
        {
            out.delivered_bytes[i] += step.served[0];
            out.cell_bytes[static_cast<std::size_t>(server)] += step.served[0];
        }
        else
        {
            relay_arrivals[static_cast<std::size_t>(server - n_aps)][i] += step.served[0];
        }
    }

    for (std::size_t u = 0; u < n_uavs; ++u)
    {
        auto& q = queues.uav[u];
        std::vector<std::int64_t> available(n_ues);
        std::int64_t total_available = 0;
        for (std::size_t f = 0; f < n_ues; ++f)
        {
            available[f] = q.backlog[f] + relay_arrivals[u][f];
            total_available += available[f];
        }
        const std::int64_t drain = std::min(bytes_in_slot(backhaul_bps[u], s.slot_s), total_available);
        const auto service = proportional_split(drain, available, available);
        const auto step = update_queue(q, relay_arrivals[u], service);
        for (std::size_t f = 0; f < n_ues; ++f)
        {
            out.delivered_bytes[f] += step.served[f];
            out.cell_bytes[static_cast<std::size_t>(n_aps) + u] += step.served[f];
        }
    }
    return out;
}

} // namespace uavsim
