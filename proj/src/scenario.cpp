#include "uavsim/scenario.hpp"

#include <json.hpp>

#include <cmath>
#include <functional>
#include <map>

namespace uavsim {

using nlohmann::json;

namespace {

int
slots_of(double seconds, double slot_s)
{
    return static_cast<int>(std::llround(seconds / slot_s));
}

bool
is_integer_multiple(double value, double unit)
{
    if (unit <= 0.0)
    {
        return false;
    }
    const double ratio = value / unit;
    return std::abs(ratio - std::round(ratio)) <= 1e-9 * std::max(1.0, ratio);
}

[[noreturn]] void
type_mismatch(const std::string& key, const char* expected)
{
    throw ScenarioError("type mismatch for key '" + key + "': expected " + expected);
}

int
as_int(const json& v, const std::string& key)
{
    if (!v.is_number_integer())
    {
        type_mismatch(key, "integer");
    }
    return v.get<int>();
}

double
as_double(const json& v, const std::string& key)
{
    if (!v.is_number())
    {
        type_mismatch(key, "number");
    }
    return v.get<double>();
}

ArraySize
as_array(const json& v, const std::string& key)
{
    if (!v.is_array() || v.size() != 2 || !v[0].is_number_integer() || !v[1].is_number_integer())
    {
        type_mismatch(key, "[n_az, n_el] integer pair");
    }
    return {v[0].get<int>(), v[1].get<int>()};
}

std::string
as_string(const json& v, const std::string& key)
{
    if (!v.is_string())
    {
        type_mismatch(key, "string");
    }
    return v.get<std::string>();
}

PsoParams
as_pso(const json& v, const std::string& key)
{
    if (!v.is_object())
    {
        type_mismatch(key, "object");
    }
    PsoParams p;
    for (const auto& [k, item] : v.items())
    {
        const std::string path = key + "." + k;
        if (k == "swarm_size")
            p.swarm_size = as_int(item, path);
        else if (k == "iterations")
            p.iterations = as_int(item, path);
        else if (k == "inertia_w")
            p.inertia_w = as_double(item, path);
        else if (k == "cognitive_c1")
            p.cognitive_c1 = as_double(item, path);
        else if (k == "social_c2")
            p.social_c2 = as_double(item, path);
        else if (k == "velocity_clamp_frac")
            p.velocity_clamp_frac = as_double(item, path);
        else
            throw ScenarioError("unknown key '" + path + "'");
    }
    return p;
}

using Setter = std::function<void(Scenario&, const json&, const std::string&)>;

template <typename T>
Setter
int_field(T Scenario::*member)
{
    return [member](Scenario& s, const json& v, const std::string& k) { s.*member = as_int(v, k); };
}

Setter
double_field(double Scenario::*member)
{
    return [member](Scenario& s, const json& v, const std::string& k) {
        s.*member = as_double(v, k);
    };
}

Setter
array_field(ArraySize Scenario::*member)
{
    return [member](Scenario& s, const json& v, const std::string& k) {
        s.*member = as_array(v, k);
    };
}

const std::map<std::string, Setter>&
setters()
{
    static const std::map<std::string, Setter> table = {
        {"area_width_m", double_field(&Scenario::area_width_m)},
        {"area_height_m", double_field(&Scenario::area_height_m)},
        {"n_aps", int_field(&Scenario::n_aps)},
        {"n_uavs", int_field(&Scenario::n_uavs)},
        {"n_ues", int_field(&Scenario::n_ues)},
        {"n_clusters", int_field(&Scenario::n_clusters)},
        {"cluster_radius_m", double_field(&Scenario::cluster_radius_m)},
        {"uav_altitude_m", double_field(&Scenario::uav_altitude_m)},
        {"ap_height_m", double_field(&Scenario::ap_height_m)},
        {"ue_height_m", double_field(&Scenario::ue_height_m)},
        {"carrier_ghz", double_field(&Scenario::carrier_ghz)},
        {"bandwidth_hz", double_field(&Scenario::bandwidth_hz)},
        {"tx_power_dbm", double_field(&Scenario::tx_power_dbm)},
        {"noise_figure_db", double_field(&Scenario::noise_figure_db)},
        {"se_cap", double_field(&Scenario::se_cap)},
        {"sinr_floor_db", double_field(&Scenario::sinr_floor_db)},
        {"access_array_ap", array_field(&Scenario::access_array_ap)},
        {"access_array_uav", array_field(&Scenario::access_array_uav)},
        {"backhaul_array_ap", array_field(&Scenario::backhaul_array_ap)},
        {"backhaul_array_uav", array_field(&Scenario::backhaul_array_uav)},
        {"ue_array", array_field(&Scenario::ue_array)},
        {"offered_rate_bps", double_field(&Scenario::offered_rate_bps)},
        {"packet_size_bytes", int_field(&Scenario::packet_size_bytes)},
        {"alpha", double_field(&Scenario::alpha)},
        {"buffer_capacity_bytes", double_field(&Scenario::buffer_capacity_bytes)},
        {"mode",
         [](Scenario& s, const json& v, const std::string& k) {
             try
             {
                 s.mode = parse_mode(as_string(v, k));
             }
             catch (const std::invalid_argument& e)
             {
                 throw ScenarioError(e.what());
             }
         }},
        {"placement",
         [](Scenario& s, const json& v, const std::string& k) {
             try
             {
                 s.placement = parse_placement(as_string(v, k));
             }
             catch (const std::invalid_argument& e)
             {
                 throw ScenarioError(e.what());
             }
         }},
        {"seed",
         [](Scenario& s, const json& v, const std::string& k) {
             if (!v.is_number_unsigned())
             {
                 type_mismatch(k, "unsigned integer");
             }
             s.seed = v.get<std::uint64_t>();
         }},
        {"n_seeds", int_field(&Scenario::n_seeds)},
        {"slot_s", double_field(&Scenario::slot_s)},
        {"reopt_interval_s", double_field(&Scenario::reopt_interval_s)},
        {"duration_s", double_field(&Scenario::duration_s)},
        {"warmup_s", double_field(&Scenario::warmup_s)},
        {"uav_speed_mps", double_field(&Scenario::uav_speed_mps)},
        {"ue_speed_mps", double_field(&Scenario::ue_speed_mps)},
        {"pso", [](Scenario& s, const json& v, const std::string& k) { s.pso = as_pso(v, k); }},
    };
    return table;
}

json
array_json(const ArraySize& a)
{
    return json::array({a.n_az, a.n_el});
}

} // namespace

int
Scenario::slots_total() const
{
    return slots_of(duration_s, slot_s);
}

int
Scenario::slots_warmup() const
{
    return slots_of(warmup_s, slot_s);
}

int
Scenario::slots_per_reopt() const
{
    return std::max(1, slots_of(reopt_interval_s, slot_s));
}

std::vector<Violation>
validate_scenario(const Scenario& s)
{
    std::vector<Violation> out;
    auto require = [&out](bool ok, const char* field, const char* message) {
        if (!ok)
        {
            out.push_back({field, message});
        }
    };

    require(s.n_aps >= 1, "n_aps", "n_aps >= 1");
    require(s.n_uavs >= 1, "n_uavs", "n_uavs >= 1");
    require(s.n_ues >= 1, "n_ues", "n_ues >= 1");
    require(s.n_clusters >= 1, "n_clusters", "n_clusters >= 1");
    require(s.n_clusters <= s.n_ues, "n_clusters", "n_clusters <= n_ues");
    require(s.n_seeds >= 1, "n_seeds", "n_seeds >= 1");
    require(s.packet_size_bytes >= 1, "packet_size_bytes", "packet_size_bytes >= 1");

    require(s.area_width_m > 0, "area_width_m", "area_width_m > 0");
    require(s.area_height_m > 0, "area_height_m", "area_height_m > 0");
    require(s.cluster_radius_m > 0, "cluster_radius_m", "cluster_radius_m > 0");
    require(2 * s.cluster_radius_m < std::min(s.area_width_m, s.area_height_m),
            "cluster_radius_m",
            "cluster disc must fit inside the area");
    require(s.uav_altitude_m > 0, "uav_altitude_m", "uav_altitude_m > 0");
    require(s.ap_height_m > 0, "ap_height_m", "ap_height_m > 0");
    require(s.ue_height_m > 0, "ue_height_m", "ue_height_m > 0");
    require(s.carrier_ghz > 0, "carrier_ghz", "carrier_ghz > 0");
    require(s.bandwidth_hz > 0, "bandwidth_hz", "bandwidth_hz > 0");
    require(s.se_cap > 0, "se_cap", "se_cap > 0");
    require(s.offered_rate_bps > 0, "offered_rate_bps", "offered_rate_bps > 0");
    require(s.buffer_capacity_bytes > 0, "buffer_capacity_bytes", "buffer_capacity_bytes > 0");
    require(s.uav_speed_mps > 0, "uav_speed_mps", "uav_speed_mps > 0");
    require(s.ue_speed_mps > 0, "ue_speed_mps", "ue_speed_mps > 0");

    const auto arrays_ok = [](const ArraySize& a) { return a.n_az >= 1 && a.n_el >= 1; };
    require(arrays_ok(s.access_array_ap), "access_array_ap", "array sides >= 1");
    require(arrays_ok(s.access_array_uav), "access_array_uav", "array sides >= 1");
    require(arrays_ok(s.backhaul_array_ap), "backhaul_array_ap", "array sides >= 1");
    require(arrays_ok(s.backhaul_array_uav), "backhaul_array_uav", "array sides >= 1");
    require(arrays_ok(s.ue_array), "ue_array", "array sides >= 1");

    require(s.alpha >= 1.0, "alpha", "alpha >= 1");

    require(s.slot_s > 0, "slot_s", "slot_s > 0");
    require(s.reopt_interval_s > 0, "reopt_interval_s", "reopt_interval_s > 0");
    require(s.duration_s > 0, "duration_s", "duration_s > 0");
    require(s.warmup_s >= 0, "warmup_s", "warmup_s >= 0");
    require(s.warmup_s < s.duration_s, "warmup_s", "warmup_s < duration_s");
    require(s.slot_s <= s.reopt_interval_s, "slot_s", "slot_s <= reopt_interval_s");
    require(is_integer_multiple(s.reopt_interval_s, s.slot_s),
            "reopt_interval_s",
            "reopt_interval_s is an integer multiple of slot_s");

    require(s.pso.swarm_size >= 2, "pso.swarm_size", "swarm_size >= 2");
    require(s.pso.iterations >= 1, "pso.iterations", "iterations >= 1");
    require(s.pso.inertia_w > 0 && s.pso.inertia_w < 1, "pso.inertia_w", "inertia_w in (0,1)");
    require(s.pso.cognitive_c1 > 0, "pso.cognitive_c1", "cognitive_c1 > 0");
    require(s.pso.social_c2 > 0, "pso.social_c2", "social_c2 > 0");
    require(s.pso.velocity_clamp_frac > 0 && s.pso.velocity_clamp_frac <= 1,
            "pso.velocity_clamp_frac",
            "velocity_clamp_frac in (0,1]");
    return out;
}

Scenario
load_scenario(std::string_view text)
{
    json doc;
    try
    {
        doc = json::parse(text);
    }
    catch (const json::parse_error& e)
    {
        throw ScenarioError(std::string("malformed scenario document: ") + e.what());
    }
    if (!doc.is_object())
    {
        throw ScenarioError("malformed scenario document: top level must be an object");
    }

    Scenario s;
    const auto& table = setters();
    for (const auto& [key, value] : doc.items())
    {
        auto it = table.find(key);
        if (it == table.end())
        {
            throw ScenarioError("unknown key '" + key + "'");
        }
        it->second(s, value, key);
    }

    auto violations = validate_scenario(s);
    if (!violations.empty())
    {
        std::string msg = "invalid scenario:";
        for (const auto& v : violations)
        {
            msg += " " + v.message + ";";
        }
        throw ScenarioError(msg, std::move(violations));
    }
    return s;
}

std::string
serialize_scenario(const Scenario& s)
{
    json j;
    j["area_width_m"] = s.area_width_m;
    j["area_height_m"] = s.area_height_m;
    j["n_aps"] = s.n_aps;
    j["n_uavs"] = s.n_uavs;
    j["n_ues"] = s.n_ues;
    j["n_clusters"] = s.n_clusters;
    j["cluster_radius_m"] = s.cluster_radius_m;
    j["uav_altitude_m"] = s.uav_altitude_m;
    j["ap_height_m"] = s.ap_height_m;
    j["ue_height_m"] = s.ue_height_m;
    j["carrier_ghz"] = s.carrier_ghz;
    j["bandwidth_hz"] = s.bandwidth_hz;
    j["tx_power_dbm"] = s.tx_power_dbm;
    j["noise_figure_db"] = s.noise_figure_db;
    j["se_cap"] = s.se_cap;
    j["sinr_floor_db"] = s.sinr_floor_db;
    j["access_array_ap"] = array_json(s.access_array_ap);
    j["access_array_uav"] = array_json(s.access_array_uav);
    j["backhaul_array_ap"] = array_json(s.backhaul_array_ap);
    j["backhaul_array_uav"] = array_json(s.backhaul_array_uav);
    j["ue_array"] = array_json(s.ue_array);
    j["offered_rate_bps"] = s.offered_rate_bps;
    j["packet_size_bytes"] = s.packet_size_bytes;
    j["alpha"] = s.alpha;
    j["buffer_capacity_bytes"] = s.buffer_capacity_bytes;
    j["mode"] = to_string(s.mode);
    j["placement"] = to_string(s.placement);
    j["seed"] = s.seed;
    j["n_seeds"] = s.n_seeds;
    j["slot_s"] = s.slot_s;
    j["reopt_interval_s"] = s.reopt_interval_s;
    j["duration_s"] = s.duration_s;
    j["warmup_s"] = s.warmup_s;
    j["uav_speed_mps"] = s.uav_speed_mps;
    j["ue_speed_mps"] = s.ue_speed_mps;
    j["pso"] = {
        {"swarm_size", s.pso.swarm_size},
        {"iterations", s.pso.iterations},
        {"inertia_w", s.pso.inertia_w},
        {"cognitive_c1", s.pso.cognitive_c1},
        {"social_c2", s.pso.social_c2},
        {"velocity_clamp_frac", s.pso.velocity_clamp_frac},
    };
    return j.dump(2);
}

std::string
to_string(BackhaulMode m)
{
    switch (m)
    {
    case BackhaulMode::Ideal:
        return "ideal";
    case BackhaulMode::BackhaulUnaware:
        return "bh-unaware";
    case BackhaulMode::BackhaulAware:
        return "bh-aware";
    }
    return "?";
}

std::string
to_string(PlacementStrategy p)
{
    return p == PlacementStrategy::Pso ? "pso" : "grid";
}

BackhaulMode
parse_mode(std::string_view text)
{
    if (text == "ideal")
        return BackhaulMode::Ideal;
    if (text == "bh-unaware")
        return BackhaulMode::BackhaulUnaware;
    if (text == "bh-aware")
        return BackhaulMode::BackhaulAware;
    throw std::invalid_argument("unknown mode '" + std::string(text) +
                                "' (expected ideal, bh-unaware or bh-aware)");
}

PlacementStrategy
parse_placement(std::string_view text)
{
    if (text == "pso")
        return PlacementStrategy::Pso;
    if (text == "grid")
        return PlacementStrategy::Grid;
    throw std::invalid_argument("unknown placement '" + std::string(text) +
                                "' (expected pso or grid)");
}

} // namespace uavsim
