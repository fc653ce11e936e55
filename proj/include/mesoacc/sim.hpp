#pragma once

#include <cstdint>
#include <deque>
#include <istream>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mesoacc/channel.hpp"
#include "mesoacc/control.hpp"
#include "mesoacc/model.hpp"
#include "mesoacc/vdt.hpp"

namespace mesoacc {

// Which ahead vehicles feed the neighbor speed statistics.
enum class VdtPopulation : std::uint8_t {
    InRange,   // ahead and within the interaction range (delivered positions)
    AllAhead,  // every vehicle ahead regardless of distance
};

struct VehicleSim {
    int id = 0;          // 1 = first vehicle on the lane
    double pos = 0.0;    // [m]
    double speed = 0.0;  // [m/s]
    Mode mode = Mode::FreeDriving;
    VdtState vdt;
    VehicleParams params;
};

struct LeaderEvent {
    double t = 0.0;             // [s]
    double target_speed = 0.0;  // [m/s]

    bool operator==(const LeaderEvent&) const = default;
};

// Piecewise-constant target speed for the first vehicle; before the first
// event the target is the initial speed.
struct LeaderProfile {
    std::vector<LeaderEvent> events;  // strictly increasing times

    double target(double t, double initial_speed) const;

    bool operator==(const LeaderProfile&) const = default;
};

// Proportional speed tracking, clamped to the acceleration bound.
double leader_accel(double t, const LeaderProfile& profile, double initial_target,
                    double v, const VehicleParams& p, double gain = 1.0);

struct SimConfig {
    double dt = 0.01;        // [s]
    double duration = 150.0; // [s]
    bool vdt_enabled = true;
    ChannelParams channel;
    VdtParams vdt;
    VdtPopulation vdt_population = VdtPopulation::InRange;
    int sample_every = 10;   // trace sampling stride, in steps
    double zeno_window = 1.0;
    int zeno_limit = 100;    // mode switches per vehicle per window
    double leader_gain = 1.0;
    std::uint64_t seed = 0;

    bool operator==(const SimConfig&) const = default;
};

struct TraceRecord {
    double t = 0.0;
    int id = 0;
    double pos = 0.0;
    double speed = 0.0;
    double accel = 0.0;
    Mode mode = Mode::FreeDriving;
    double x1 = 0.0;
    double x2 = 0.0;
    double x3 = 0.0;
    double alpha_t = 1.0;
    double v_bar = 0.0;
    double theta = 0.0;

    bool operator==(const TraceRecord&) const = default;
};

struct Event {
    double t = 0.0;
    std::string kind;
    int id = 0;
    std::string detail;

    bool operator==(const Event&) const = default;
};

struct CollisionDetected : std::runtime_error {
    CollisionDetected(double t, int follower_id);
    double t;
    int follower_id;
};

struct ZenoSuspect : std::runtime_error {
    ZenoSuspect(double t, int vehicle_id, int switches);
    double t;
    int vehicle_id;
    int switches;
};

RelativeState relative_state(const VehicleSim& lead, const VehicleSim& follow);

// Fixed-step world of interconnected automata: first vehicle tracks the
// leader profile against a virtual free road, every follower senses the
// vehicle directly ahead and adapts its headway factor from
// channel-delivered neighbor states.
class World {
public:
    World(std::vector<VehicleSim> vehicles, LeaderProfile profile, SimConfig cfg);

    // Advances one step of length dt. Each vehicle reads its leader's
    // pre-step state; classification, control and the headway filter run at
    // the step start, then speeds and positions integrate semi-implicitly.
    // Throws CollisionDetected / ZenoSuspect.
    void step();

    // Trace records of the step most recently taken (state at its start).
    const std::vector<TraceRecord>& last_records() const { return last_records_; }

    // Records for the current state without advancing anything.
    std::vector<TraceRecord> observe() const;

    double time() const { return static_cast<double>(step_count_) * cfg_.dt; }
    const std::vector<VehicleSim>& vehicles() const { return vehicles_; }
    const std::vector<Event>& events() const { return events_; }
    const Channel& channel() const { return channel_; }
    const SimConfig& config() const { return cfg_; }

    void check_collisions();  // throws on any gap below the follower's minimum

private:
    struct Derived {
        RelativeState x;
        Mode mode = Mode::FreeDriving;
        double accel = 0.0;
        double alpha_t = 1.0;
        double v_bar = 0.0;
        double theta = 0.0;
    };

    Derived derive(std::size_t i, double t, bool advance_filter);
    void service_channel(double t);
    void note_mode(std::size_t i, Mode mode, double t);

    std::vector<VehicleSim> vehicles_;
    LeaderProfile profile_;
    SimConfig cfg_;
    Channel channel_;
    double leader_initial_speed_;
    double last_target_;
    long step_count_ = 0;
    double next_broadcast_ = 0.0;
    double next_stats_refresh_ = 0.0;
    std::vector<std::vector<SpeedSample>> held_samples_;
    std::vector<std::deque<double>> switch_times_;
    std::vector<TraceRecord> last_records_;
    std::vector<Event> events_;
};

enum class RunOutcome : std::uint8_t { Completed, Collision, Zeno };

std::string_view outcome_label(RunOutcome o);

struct RunResult {
    std::vector<TraceRecord> traces;
    std::vector<Event> events;
    std::vector<DeliveryLogRow> channel_log;
    RunOutcome outcome = RunOutcome::Completed;
    double wall_time_s = 0.0;
};

// Integrates from 0 to duration. Deterministic: identical inputs give
// bit-identical traces. On collision or Zeno suspicion the partial traces
// (including the violating state) are retained.
RunResult run(std::vector<VehicleSim> vehicles, LeaderProfile profile, const SimConfig& cfg);

// First time from which the pair stays in the equilibrium set through the
// end of the trace; empty when it does not hold at the last sample.
std::optional<double> convergence_time(std::span<const TraceRecord> traces, int follower_id,
                                       const VehicleParams& p, double tol);

// Header: t,id,pos_m,v_mps,a_mps2,mode,x1_m,x2_mps,x3_mps,alpha_t,v_bar_mps,theta_m2ps2
void write_trace_csv(std::ostream& os, std::span<const TraceRecord> traces);
std::vector<TraceRecord> read_trace_csv(std::istream& is);

// Header: t,kind,id,detail
void write_events_csv(std::ostream& os, std::span<const Event> events);
std::vector<Event> read_events_csv(std::istream& is);

// Header: x2_mps,x1_m (one file per vehicle)
void write_phase_csv(std::ostream& os, std::span<const TraceRecord> traces, int id);

}  // namespace mesoacc
