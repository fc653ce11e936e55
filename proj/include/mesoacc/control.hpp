#pragma once

#include "mesoacc/model.hpp"

namespace mesoacc {

// Acceleration command produced by the mode-indexed feedback laws.
struct ControlOutput {
    double u = 0.0;  // commanded acceleration [m/s^2], clamped to [-a_max, a_max]
    Mode mode = Mode::FreeDriving;
    bool saturated = false;
    bool collision_course = false;  // set only in the unsafe mode
};

// Free driving: relax the follower speed toward the desired speed.
double free_driving_accel(const RelativeState& x, const VehicleParams& p);

// Following I: Gazis-style law; requires gap < g_ref and throws
// std::domain_error otherwise (the domain guarantees it).
double following_accel(const RelativeState& x, const VehicleParams& p);

// Following II: no action.
double coasting_accel();

// Closing in: distance/relative-speed deceleration with a small constant
// term that yields finite-time convergence to the equilibrium set.
double closing_in_accel(const RelativeState& x, const VehicleParams& p);

// Danger: maximum deceleration.
double danger_accel(const VehicleParams& p);

// Dispatches on the mode and clamps to [-a_max, a_max]. In the unsafe mode
// the command is -a_max with the collision-course flag raised.
ControlOutput control(const RelativeState& x, const VehicleParams& p, Mode mode);

// Projects the command so speeds stay in [0, v_max]: zero when pushing
// past either bound, unchanged otherwise.
double apply_speed_limits(double v, double u, const VehicleParams& p);

}  // namespace mesoacc
