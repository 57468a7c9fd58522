#pragma once

#include "uavsim/geometry.hpp"
#include "uavsim/rng.hpp"
#include "uavsim/scenario.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace uavsim {

/// UMi street-canyon LOS probability as a function of 2D distance.
double los_probability(double d2d_m);

/// UMi street-canyon path loss. Distances below 1 m are clamped to 1 m.
double path_loss_db(double d3d_m, double fc_ghz, bool los, double h_ut_m);

/// LOS-probability-weighted mean of the LOS and NLOS path loss, in dB.
double expected_path_loss_db(double d2d_m, double d3d_m, double fc_ghz, double h_ut_m);

/// Flat-top pattern: HPBW of 102/n degrees per plane, sidelobes 20 dB down.
double antenna_gain_db(const ArraySize& a, double off_boresight_az_deg, double off_boresight_el_deg);
double main_lobe_gain_db(const ArraySize& a);
double half_beamwidth_deg(int elements);

/// Wraps an angle difference into [-180, 180).
double wrap_degrees(double deg);

double noise_dbm(const Scenario& s);
double dbm_to_mw(double dbm);
double mw_to_dbm(double mw);

/// Shannon rate with the spectral-efficiency cap; zero below the SINR floor.
double rate_from_sinr_db(double sinr_db, const Scenario& s);

struct LinkBudget
{
    double d2d_m{0.0};
    double d3d_m{0.0};
    bool los{false};
    double p_los{0.0};
    double pl_db{0.0};
    double g_tx_db{0.0};
    double g_rx_db{0.0};
    double rx_power_dbm{0.0};
    double interference_mw{0.0};
    double sinr_db{0.0};
    double rate_bps{0.0};
};

/**
 * Budget of a single boresight-aligned link. The LOS state is forced when
 * `force_los` is set, otherwise taken from `los_draw`.
 */
LinkBudget link_rate(const Position& tx,
                     const Position& rx,
                     const ArraySize& tx_arr,
                     const ArraySize& rx_arr,
                     const Scenario& s,
                     double interference_mw,
                     bool force_los,
                     bool los_draw);

/// Serving node per UE, or kOutOfCoverage.
constexpr int kOutOfCoverage = -1;
using Association = std::vector<int>;

/// Node positions: ids [0, n_aps) are ground APs, the rest UAV-BSs.
struct NodeLayout
{
    std::vector<Position> pos;
    int n_aps{0};

    int size() const
    {
        return static_cast<int>(pos.size());
    }
    bool is_uav(int node) const
    {
        return node >= n_aps;
    }
};

/// LOS flags per UE-node access link, row-major [ue][node].
using LosMatrix = std::vector<std::uint8_t>;

LosMatrix draw_los(std::span<const Position> ues, const NodeLayout& nodes, Rng& rng);

/**
 * Per-link access geometry and path loss, stored per node column
 * [node][ue]. Angles are seen from the node toward the UE. With a LOS
 * matrix the path loss follows the drawn state, without one it is the
 * LOS-probability-weighted mean. `gain_lin` is 10^(-pl_db/10).
 */
struct LinkTable
{
    int n_ues{0};
    int n_nodes{0};
    std::vector<double> pl_db;
    std::vector<double> gain_lin;
    std::vector<double> az_deg;
    std::vector<double> el_deg;

    std::size_t index(int ue, int node) const
    {
        return static_cast<std::size_t>(node) * static_cast<std::size_t>(n_ues) +
               static_cast<std::size_t>(ue);
    }
};

LinkTable build_link_table(std::span<const Position> ues,
                           const NodeLayout& nodes,
                           const Scenario& s,
                           const LosMatrix* los);

/// Recomputes one node column of the table, e.g. after the node moved.
void fill_link_column(LinkTable& table,
                      int node,
                      const Position& node_pos,
                      std::span<const Position> ues,
                      const Scenario& s,
                      const LosMatrix* los);

/// Access array of a node given its kind.
const ArraySize& access_array(const NodeLayout& nodes, int node, const Scenario& s);

/**
 * Full-slot access rate of every associated UE. Interference at a serving
 * node sums over UEs of every other cell weighted by 1/|cell|, i.e. the
 * round-robin average. Out-of-coverage UEs get rate 0.
 */
std::vector<double> access_rates(const LinkTable& links,
                                 const NodeLayout& nodes,
                                 const Association& assoc,
                                 const Scenario& s,
                                 std::vector<double>* sinr_db_out = nullptr);

/// Backhaul capacity of a UAV to one AP over the LOS-forced backhaul arrays.
double backhaul_rate(const Position& uav, const Position& ap, const Scenario& s);

struct BackhaulLink
{
    int ap{0};
    double rate_bps{0.0};
};

/// Strongest AP for a UAV's backhaul; ties go to the lowest AP id.
BackhaulLink best_backhaul(const Position& uav, const NodeLayout& nodes, const Scenario& s);

} // namespace uavsim
