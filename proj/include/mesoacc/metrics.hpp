#pragma once

#include <map>
#include <optional>
#include <ostream>
#include <span>

#include "mesoacc/sim.hpp"

namespace mesoacc {

struct MetricsConfig {
    std::map<int, VehicleParams> params;  // per vehicle id
    double onset_event_time = 0.0;        // measure onsets from here [s]
    double onset_threshold = -0.5;        // deceleration-onset level [m/s^2]
    double eq_tol = 1e-3;                 // relative-speed tolerance for equilibrium entry [m/s]
};

struct VehicleMetrics {
    std::optional<double> min_separation;      // followers only [m]
    std::optional<double> deceleration_onset;  // [s]
    std::optional<double> first_equilibrium;   // [s]
    std::optional<int> oscillation_count;      // rel-speed sign changes after first equilibrium
    std::optional<double> peak_post_eq_abs_rel_speed;  // [m/s]
    double peak_abs_accel = 0.0;               // [m/s^2]
    std::map<Mode, double> dwell;              // [s] per mode, sample-weighted
    std::optional<double> alpha_mean;
    std::optional<double> alpha_peak;
};

struct MetricsReport {
    int collision_count = 0;
    std::map<int, VehicleMetrics> vehicles;
};

// All quantities are derived from the sampled trace plus the event list,
// so a recomputation from the exported CSVs reproduces them exactly.
MetricsReport compute_metrics(std::span<const TraceRecord> traces, std::span<const Event> events,
                              const MetricsConfig& cfg);

// key = value text, deterministically ordered.
void write_metrics(std::ostream& os, const MetricsReport& report);

}  // namespace mesoacc
