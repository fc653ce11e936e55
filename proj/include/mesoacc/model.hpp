#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace mesoacc {

// Maximum distance at which an ahead vehicle counts as an interaction
// partner. A follower with a larger gap behaves as if the lane were empty.
inline constexpr double kInteractionRangeM = 500.0;

// Relative state of a follower with respect to the vehicle directly ahead.
//   gap        p_lead - p_follow                [m]
//   rel_speed  v_lead - v_follow                [m/s]
//   lead_speed v_lead                           [m/s]
struct RelativeState {
    double gap = 0.0;
    double rel_speed = 0.0;
    double lead_speed = 0.0;

    double follower_speed() const { return lead_speed - rel_speed; }

    bool operator==(const RelativeState&) const = default;
};

// Per-vehicle constants of the longitudinal control model. Defaults are the
// library's reference parameter set; scenario files may override any of them.
struct VehicleParams {
    double length = 5.0;     // vehicle length [m]
    double clearance = 1.0;  // standstill clearance to the vehicle ahead [m]
    double a_max = 6.0;      // acceleration magnitude bound [m/s^2]
    double v_max = 33.0;     // speed bound [m/s]
    double v_des = 33.0;     // desired cruise speed [m/s]
    double lambda = 2.0;     // soft-braking ratio (> 1); soft decel = a_max/lambda
    double c_r = 1.0;        // risky-distance headway coefficient (> 0)
    double c_s = 1.5;        // safe-distance headway coefficient (>= c_r)
    double c_c = 2.0;        // approach-distance coefficient [m/sqrt(m/s)]
    double t_d = 3.0;        // time headway beyond which the driver acts as a leader [s]
    double g_ref = 550.0;    // reference distance of the following-I law [m], > interaction range
    double alpha1 = 0.5;     // free-driving speed-error gain [1/s]
    double alpha2 = 1.0;     // following-I gain
    double alpha4 = 1.0;     // closing-in gain
    double epsilon = 0.5;    // finite-time approach deceleration [m/s^2], in (0, a_max/lambda)

    // Minimum admissible gap; anything below it is a collision.
    double min_gap() const { return length + clearance; }

    // Returns a diagnostic per violated constraint; empty when consistent.
    std::vector<std::string> validate() const;

    bool operator==(const VehicleParams&) const = default;
};

// Discrete driving modes, ordered as serialized ("q1".."q6").
enum class Mode : std::uint8_t {
    FreeDriving,  // q1
    FollowingI,   // q2
    FollowingII,  // q3
    ClosingIn,    // q4
    Danger,       // q5
    Unsafe,       // q6
};

inline constexpr int kModeCount = 6;

std::string_view mode_label(Mode m);          // "q1".."q6"
Mode mode_from_label(std::string_view label); // throws std::invalid_argument

// Stopping-time headways evaluated at one relative state.
//   emergency  time to brake away the speed difference at a_max       [s]
//   response   time to stop the follower at a_max                     [s]
//   safe       time to stop the follower at a_max/lambda              [s]
struct TimeHeadways {
    double emergency = 0.0;
    double response = 0.0;
    double safe = 0.0;
};

TimeHeadways time_headways(const RelativeState& x, const VehicleParams& p);

// The five distance thresholds evaluated at one relative state and one
// headway factor alpha_t. The emergency distance is never scaled by alpha_t.
struct Thresholds {
    double emergency = 0.0;
    double risky = 0.0;
    double safe = 0.0;
    double interaction = 0.0;
    double approach = 0.0;
};

double emergency_distance(const RelativeState& x, const VehicleParams& p);
double risky_distance(const RelativeState& x, const VehicleParams& p, double alpha_t = 1.0);
double safe_distance(const RelativeState& x, const VehicleParams& p, double alpha_t = 1.0);
double interaction_distance(const RelativeState& x, const VehicleParams& p, double alpha_t = 1.0);
double approach_distance(const RelativeState& x, const VehicleParams& p, double alpha_t = 1.0);
Thresholds thresholds(const RelativeState& x, const VehicleParams& p, double alpha_t = 1.0);

// Literal domain predicate of one mode, with no precedence applied.
bool in_domain(Mode q, const RelativeState& x, const VehicleParams& p, double alpha_t = 1.0);

// Memoryless mode assignment. Domains are checked in the fixed order
// q6, q5, q4, q2, q3 and fall through to q1, so boundary states resolve
// deterministically. Gaps beyond the interaction range are free driving.
Mode classify(const RelativeState& x, const VehicleParams& p, double alpha_t = 1.0);

// True when |rel_speed| <= tol and the gap lies in [risky, safe].
bool in_equilibrium(const RelativeState& x, const VehicleParams& p, double alpha_t, double tol);

}  // namespace mesoacc
