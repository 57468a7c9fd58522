#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace uavsim {

/// How the finite UAV backhaul is treated by the simulator and the optimizer.
enum class BackhaulMode
{
    Ideal,           ///< unlimited backhaul everywhere
    BackhaulUnaware, ///< finite in simulation, ignored by the placement objective
    BackhaulAware,   ///< finite in simulation and in the placement objective
};

enum class PlacementStrategy
{
    Pso,
    Grid,
};

/// Planar antenna array dimensions (elements per plane).
struct ArraySize
{
    int n_az{8};
    int n_el{8};

    friend bool operator==(const ArraySize&, const ArraySize&) = default;
};

struct PsoParams
{
    int swarm_size{30};
    int iterations{50};
    double inertia_w{0.7};
    double cognitive_c1{1.5};
    double social_c2{1.5};
    double velocity_clamp_frac{0.2};

    friend bool operator==(const PsoParams&, const PsoParams&) = default;
};

/// Full experiment configuration. Defaults are the reference deployment.
struct Scenario
{
    // geometry
    double area_width_m{600.0};
    double area_height_m{600.0};
    int n_aps{4};
    int n_uavs{2};
    int n_ues{100};
    int n_clusters{4};
    double cluster_radius_m{50.0};
    double uav_altitude_m{20.0};
    double ap_height_m{20.0};
    double ue_height_m{1.5};

    // radio
    double carrier_ghz{73.0};
    double bandwidth_hz{0.56e9};
    double tx_power_dbm{24.0};
    double noise_figure_db{7.0};
    double se_cap{7.8};
    double sinr_floor_db{-10.0};
    ArraySize access_array_ap{8, 8};
    ArraySize access_array_uav{8, 8};
    ArraySize backhaul_array_ap{8, 8};
    ArraySize backhaul_array_uav{4, 4};
    ArraySize ue_array{4, 4};

    // traffic and scheduling
    double offered_rate_bps{500e6};
    int packet_size_bytes{1000};
    double alpha{2.0};
    double buffer_capacity_bytes{16e6};

    // experiment
    BackhaulMode mode{BackhaulMode::BackhaulAware};
    PlacementStrategy placement{PlacementStrategy::Pso};
    std::uint64_t seed{0};
    int n_seeds{200};

    // timing and kinematics
    double slot_s{0.1};
    double reopt_interval_s{1.0};
    double duration_s{60.0};
    double warmup_s{5.0};
    double uav_speed_mps{10.0};
    double ue_speed_mps{1.4};

    PsoParams pso{};

    friend bool operator==(const Scenario&, const Scenario&) = default;

    int slots_total() const;
    int slots_warmup() const;
    int slots_per_reopt() const;
    int n_nodes() const
    {
        return n_aps + n_uavs;
    }
};

struct Violation
{
    std::string field;
    std::string message;
};

/// Thrown by load_scenario for malformed documents, unknown keys and type
/// mismatches, and for documents whose resolved scenario is invalid.
class ScenarioError : public std::runtime_error
{
  public:
    explicit ScenarioError(const std::string& what, std::vector<Violation> violations = {})
        : std::runtime_error(what),
          violations_(std::move(violations))
    {
    }

    const std::vector<Violation>& violations() const noexcept
    {
        return violations_;
    }

  private:
    std::vector<Violation> violations_;
};

/// Lists every violated invariant; empty means valid.
std::vector<Violation> validate_scenario(const Scenario& s);

/// Parses a JSON key/value document, filling omitted keys from defaults.
Scenario load_scenario(std::string_view text);
std::string serialize_scenario(const Scenario& s);

std::string to_string(BackhaulMode m);
std::string to_string(PlacementStrategy p);
BackhaulMode parse_mode(std::string_view text);
PlacementStrategy parse_placement(std::string_view text);

} // namespace uavsim
