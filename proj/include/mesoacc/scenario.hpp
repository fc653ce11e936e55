#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "mesoacc/sim.hpp"

namespace mesoacc {

struct VehicleSpec {
    double init_pos = 0.0;  // [m]
    double init_v = 0.0;    // [m/s]
    VehicleParams params;

    bool operator==(const VehicleSpec&) const = default;
};

struct ScenarioFile {
    SimConfig sim;
    std::vector<VehicleSpec> vehicles;  // index 0 = vehicle 1
    LeaderProfile profile;

    bool operator==(const ScenarioFile&) const = default;
};

// Parse or validation failure; line is 1-based (0 when the failure is
// semantic and located by section instead).
struct ScenarioError : std::runtime_error {
    ScenarioError(int line, std::string section, const std::string& what);
    int line;
    std::string section;
};

// Line-oriented format: [section] headers, key = value pairs, '#' comments.
// Sections: [sim], [channel], [vdt], [vehicle.defaults], [vehicle.<k>]
// (k = 1..N contiguous) and [leader.profile] with repeated
// "event = <t_s> <v_mps>" lines. Unknown sections or keys are rejected.
ScenarioFile parse_scenario(std::string_view text);

// Canonical text form; parse(serialize(s)) == s for every valid scenario.
std::string serialize_scenario(const ScenarioFile& s);

ScenarioFile load_scenario_file(const std::filesystem::path& path);

std::vector<VehicleSim> make_vehicles(const ScenarioFile& s);

}  // namespace mesoacc
