#include "uavsim/channel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace uavsim {

namespace {

constexpr double kRadToDeg = 180.0 / std::numbers::pi;
constexpr double kSidelobeDropDb = 20.0;
constexpr double kBeamwidthConstantDeg = 102.0;

double
h_ut_of(const Position& a, const Position& b)
{
    return std::min(a.z, b.z);
}

// Difference of two azimuths already in [-180, 180].
inline double
az_offset(double a, double b)
{
    double d = a - b;
    if (d > 180.0)
        d -= 360.0;
    else if (d < -180.0)
        d += 360.0;
    return d;
}

} // namespace

double
los_probability(double d2d_m)
{
    if (d2d_m <= 18.0)
    {
        return 1.0;
    }
    const double e = std::exp(-d2d_m / 36.0);
    return (18.0 / d2d_m) * (1.0 - e) + e;
}

double
path_loss_db(double d3d_m, double fc_ghz, bool los, double h_ut_m)
{
    const double d = std::max(d3d_m, 1.0);
    const double pl_los = 32.4 + 21.0 * std::log10(d) + 20.0 * std::log10(fc_ghz);
    if (los)
    {
        return pl_los;
    }
    const double pl_nlos =
        35.3 * std::log10(d) + 22.4 + 21.3 * std::log10(fc_ghz) - 0.3 * (h_ut_m - 1.5);
    return std::max(pl_los, pl_nlos);
}

double
expected_path_loss_db(double d2d_m, double d3d_m, double fc_ghz, double h_ut_m)
{
    const double p = los_probability(d2d_m);
    return p * path_loss_db(d3d_m, fc_ghz, true, h_ut_m) +
           (1.0 - p) * path_loss_db(d3d_m, fc_ghz, false, h_ut_m);
}

double
half_beamwidth_deg(int elements)
{
    return 0.5 * kBeamwidthConstantDeg / static_cast<double>(elements);
}

double
main_lobe_gain_db(const ArraySize& a)
{
    return 10.0 * std::log10(static_cast<double>(a.n_az) * static_cast<double>(a.n_el));
}

double
antenna_gain_db(const ArraySize& a, double off_boresight_az_deg, double off_boresight_el_deg)
{
    const bool in_main = std::abs(off_boresight_az_deg) <= half_beamwidth_deg(a.n_az) &&
                         std::abs(off_boresight_el_deg) <= half_beamwidth_deg(a.n_el);
    const double main = main_lobe_gain_db(a);
    return in_main ? main : main - kSidelobeDropDb;
}

double
wrap_degrees(double deg)
{
    double w = std::fmod(deg + 180.0, 360.0);
    if (w < 0.0)
    {
        w += 360.0;
    }
    return w - 180.0;
}

double
noise_dbm(const Scenario& s)
{
    return -174.0 + 10.0 * std::log10(s.bandwidth_hz) + s.noise_figure_db;
}

double
dbm_to_mw(double dbm)
{
    return std::pow(10.0, dbm / 10.0);
}

double
mw_to_dbm(double mw)
{
    return 10.0 * std::log10(mw);
}

double
rate_from_sinr_db(double sinr_db, const Scenario& s)
{
    if (!(sinr_db >= s.sinr_floor_db))
    {
        return 0.0;
    }
    const double se = std::log2(1.0 + std::pow(10.0, sinr_db / 10.0));
    return s.bandwidth_hz * std::min(se, s.se_cap);
}

LinkBudget
link_rate(const Position& tx,
          const Position& rx,
          const ArraySize& tx_arr,
          const ArraySize& rx_arr,
          const Scenario& s,
          double interference_mw,
          bool force_los,
          bool los_draw)
{
    LinkBudget b;
    b.d2d_m = distance_2d(tx, rx);
    b.d3d_m = distance_3d(tx, rx);
    b.p_los = force_los ? 1.0 : los_probability(b.d2d_m);
    b.los = force_los || los_draw;
    b.pl_db = path_loss_db(b.d3d_m, s.carrier_ghz, b.los, h_ut_of(tx, rx));
    b.g_tx_db = main_lobe_gain_db(tx_arr);
    b.g_rx_db = main_lobe_gain_db(rx_arr);
    b.rx_power_dbm = s.tx_power_dbm + b.g_tx_db + b.g_rx_db - b.pl_db;
    b.interference_mw = interference_mw;
    const double denom_mw = dbm_to_mw(noise_dbm(s)) + interference_mw;
    b.sinr_db = b.rx_power_dbm - mw_to_dbm(denom_mw);
    b.rate_bps = rate_from_sinr_db(b.sinr_db, s);
    return b;
}

LosMatrix
draw_los(std::span<const Position> ues, const NodeLayout& nodes, Rng& rng)
{
    LosMatrix los(ues.size() * static_cast<std::size_t>(nodes.size()));
    std::size_t k = 0;
    for (const auto& ue : ues)
    {
        for (const auto& node : nodes.pos)
        {
            los[k++] = rng.bernoulli(los_probability(distance_2d(ue, node))) ? 1 : 0;
        }
    }
    return los;
}

void
fill_link_column(LinkTable& table,
                 int node,
                 const Position& node_pos,
                 std::span<const Position> ues,
                 const Scenario& s,
                 const LosMatrix* los)
{
    const double log_fc = std::log10(s.carrier_ghz);
    for (int ue = 0; ue < table.n_ues; ++ue)
    {
        const Position& u = ues[static_cast<std::size_t>(ue)];
        const std::size_t k = table.index(ue, node);
        const double dx = u.x - node_pos.x;
        const double dy = u.y - node_pos.y;
        const double dz = u.z - node_pos.z;
        const double d2d = std::sqrt(dx * dx + dy * dy);
        const double log_d = std::log10(std::max(std::sqrt(d2d * d2d + dz * dz), 1.0));
        const double pl_los = 32.4 + 21.0 * log_d + 20.0 * log_fc;
        const double pl_nlos =
            std::max(pl_los, 35.3 * log_d + 22.4 + 21.3 * log_fc - 0.3 * (h_ut_of(u, node_pos) - 1.5));
        double pl = 0.0;
        if (los)
        {
            const std::size_t drawn = static_cast<std::size_t>(ue) * static_cast<std::size_t>(table.n_nodes) +
                                      static_cast<std::size_t>(node);
            pl = (*los)[drawn] != 0 ? pl_los : pl_nlos;
        }
        else
        {
            const double p = los_probability(d2d);
            pl = p * pl_los + (1.0 - p) * pl_nlos;
        }
        table.pl_db[k] = pl;
        table.gain_lin[k] = std::exp(-0.1 * std::numbers::ln10 * pl);
        table.az_deg[k] = std::atan2(dy, dx) * kRadToDeg;
        table.el_deg[k] = std::atan2(dz, d2d) * kRadToDeg;
    }
}

LinkTable
build_link_table(std::span<const Position> ues,
                 const NodeLayout& nodes,
                 const Scenario& s,
                 const LosMatrix* los)
{
    LinkTable t;
    t.n_ues = static_cast<int>(ues.size());
    t.n_nodes = nodes.size();
    const std::size_t n = ues.size() * static_cast<std::size_t>(t.n_nodes);
    t.pl_db.resize(n);
    t.gain_lin.resize(n);
    t.az_deg.resize(n);
    t.el_deg.resize(n);
    for (int node = 0; node < t.n_nodes; ++node)
    {
        fill_link_column(t, node, nodes.pos[static_cast<std::size_t>(node)], ues, s, los);
    }
    return t;
}

const ArraySize&
access_array(const NodeLayout& nodes, int node, const Scenario& s)
{
    return nodes.is_uav(node) ? s.access_array_uav : s.access_array_ap;
}

std::vector<double>
access_rates(const LinkTable& links,
             const NodeLayout& nodes,
             const Association& assoc,
             const Scenario& s,
             std::vector<double>* sinr_db_out)
{
    const int n_ues = links.n_ues;
    const int n_nodes = links.n_nodes;
    std::vector<double> rates(static_cast<std::size_t>(n_ues), 0.0);
    if (sinr_db_out)
    {
        sinr_db_out->assign(static_cast<std::size_t>(n_ues), -std::numeric_limits<double>::infinity());
    }

    std::vector<int> cell_size(static_cast<std::size_t>(n_nodes), 0);
    for (int server : assoc)
    {
        if (server != kOutOfCoverage)
        {
            ++cell_size[static_cast<std::size_t>(server)];
        }
    }

    const double tx_mw = dbm_to_mw(s.tx_power_dbm);
    const double ue_half_az = half_beamwidth_deg(s.ue_array.n_az);
    const double ue_half_el = half_beamwidth_deg(s.ue_array.n_el);
    const double ue_main_db = main_lobe_gain_db(s.ue_array);
    const double ue_main_lin = dbm_to_mw(ue_main_db);
    const double ue_side_lin = dbm_to_mw(ue_main_db - kSidelobeDropDb);
    const double noise_mw = dbm_to_mw(noise_dbm(s));
    const double floor_lin = dbm_to_mw(s.sinr_floor_db);

    // Per victim node: compact arrays of every UE transmitting in another
    // cell, with its round-robin-weighted received power before the
    // victim's receive gain. The interferer's transmit gain toward the
    // victim depends on the direction of its own serving beam.
    struct Interferer
    {
        double az;
        double el;
        double mw;
    };
    std::vector<Interferer> interferers;
    interferers.reserve(static_cast<std::size_t>(n_ues));

    for (int n = 0; n < n_nodes; ++n)
    {
        if (cell_size[static_cast<std::size_t>(n)] == 0)
        {
            continue;
        }
        interferers.clear();
        double weighted_total_mw = 0.0;
        for (int j = 0; j < n_ues; ++j)
        {
            const int m = assoc[static_cast<std::size_t>(j)];
            if (m == kOutOfCoverage || m == n)
            {
                continue;
            }
            const std::size_t kn = links.index(j, n);
            const std::size_t km = links.index(j, m);
            const bool main = std::abs(az_offset(links.az_deg[kn], links.az_deg[km])) <= ue_half_az &&
                              std::abs(links.el_deg[kn] - links.el_deg[km]) <= ue_half_el;
            const double w = 1.0 / cell_size[static_cast<std::size_t>(m)];
            const double mw = w * tx_mw * (main ? ue_main_lin : ue_side_lin) * links.gain_lin[kn];
            interferers.push_back({links.az_deg[kn], links.el_deg[kn], mw});
            weighted_total_mw += mw;
        }
        std::sort(interferers.begin(), interferers.end(), [](const Interferer& a, const Interferer& b) {
            return a.az < b.az;
        });

        const ArraySize& arr = access_array(nodes, n, s);
        const double half_az = half_beamwidth_deg(arr.n_az);
        const double half_el = half_beamwidth_deg(arr.n_el);
        const double rx_main_lin = dbm_to_mw(main_lobe_gain_db(arr));
        const double rx_side_lin = dbm_to_mw(main_lobe_gain_db(arr) - kSidelobeDropDb);

        // Sum of interferers inside the receive main lobe, azimuth window
        // [lo, hi] with lo <= hi, both within [-180, 180].
        auto window_sum = [&interferers, half_el](double lo, double hi, double beam_el) {
            auto it = std::lower_bound(interferers.begin(), interferers.end(), lo, [](const Interferer& a, double v) {
                return a.az < v;
            });
            double sum = 0.0;
            for (; it != interferers.end() && it->az <= hi; ++it)
            {
                if (std::abs(it->el - beam_el) <= half_el)
                {
                    sum += it->mw;
                }
            }
            return sum;
        };

        for (int i = 0; i < n_ues; ++i)
        {
            if (assoc[static_cast<std::size_t>(i)] != n)
            {
                continue;
            }
            const std::size_t ki = links.index(i, n);
            const double beam_az = links.az_deg[ki];
            const double beam_el = links.el_deg[ki];

            double in_beam_mw = 0.0;
            if (half_az >= 180.0)
            {
                in_beam_mw = window_sum(-180.0, 180.0, beam_el);
            }
            else
            {
                const double lo = beam_az - half_az;
                const double hi = beam_az + half_az;
                in_beam_mw = window_sum(std::max(lo, -180.0), std::min(hi, 180.0), beam_el);
                if (lo < -180.0)
                {
                    in_beam_mw += window_sum(lo + 360.0, 180.0, beam_el);
                }
                if (hi > 180.0)
                {
                    in_beam_mw += window_sum(-180.0, hi - 360.0, beam_el);
                }
            }
            const double interference_mw =
                rx_side_lin * (weighted_total_mw - in_beam_mw) + rx_main_lin * in_beam_mw;
            const double rx_mw = tx_mw * ue_main_lin * rx_main_lin * links.gain_lin[ki];
            const double sinr = rx_mw / (noise_mw + interference_mw);
            double& rate = rates[static_cast<std::size_t>(i)];
            rate = sinr >= floor_lin ? s.bandwidth_hz * std::min(std::log2(1.0 + sinr), s.se_cap) : 0.0;
            if (sinr_db_out)
            {
                (*sinr_db_out)[static_cast<std::size_t>(i)] = 10.0 * std::log10(sinr);
            }
        }
    }
    return rates;
}

double
backhaul_rate(const Position& uav, const Position& ap, const Scenario& s)
{
    return link_rate(uav, ap, s.backhaul_array_uav, s.backhaul_array_ap, s, 0.0, true, true).rate_bps;
}

BackhaulLink
best_backhaul(const Position& uav, const NodeLayout& nodes, const Scenario& s)
{
    BackhaulLink best{0, 0.0};
    double best_power = -std::numeric_limits<double>::infinity();
    for (int ap = 0; ap < nodes.n_aps; ++ap)
    {
        const auto b = link_rate(uav,
                                 nodes.pos[static_cast<std::size_t>(ap)],
                                 s.backhaul_array_uav,
                                 s.backhaul_array_ap,
                                 s,
                                 0.0,
                                 true,
                                 true);
        if (b.rx_power_dbm > best_power)
        {
            best_power = b.rx_power_dbm;
            best = {ap, b.rate_bps};
        }
    }
    return best;
}

} // namespace uavsim
