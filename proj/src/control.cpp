#include "mesoacc/control.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mesoacc {

namespace {

double sign(double v) {
    if (v > 0.0) return 1.0;
    if (v < 0.0) return -1.0;
    return 0.0;
}

}  // namespace

double free_driving_accel(const RelativeState& x, const VehicleParams& p) {
    return p.alpha1 * (p.v_des - x.follower_speed());
}

double following_accel(const RelativeState& x, const VehicleParams& p) {
    const double room = p.g_ref - x.gap;
    if (!(room > 0.0)) {
        throw std::domain_error("following_accel: gap reaches the reference distance");
    }
    return p.alpha2 * (p.v_des + x.rel_speed) / room * x.follower_speed();
}

double coasting_accel() {
    return 0.0;
}

double closing_in_accel(const RelativeState& x, const VehicleParams& p) {
    const double vf = x.follower_speed();
    const double denom =
        2.0 * (x.gap + p.min_gap() + p.c_s * p.lambda / p.a_max * x.lead_speed * x.lead_speed);
    const double braking = -p.alpha4 * (x.lead_speed * x.lead_speed - vf * vf) / denom;
    return std::min(braking, p.epsilon * sign(x.rel_speed));
}

double danger_accel(const VehicleParams& p) {
    return -p.a_max;
}

ControlOutput control(const RelativeState& x, const VehicleParams& p, Mode mode) {
    double u = 0.0;
    bool collision_course = false;
    switch (mode) {
        case Mode::FreeDriving: u = free_driving_accel(x, p); break;
        case Mode::FollowingI: u = following_accel(x, p); break;
        case Mode::FollowingII: u = coasting_accel(); break;
        case Mode::ClosingIn: u = closing_in_accel(x, p); break;
        case Mode::Danger: u = danger_accel(p); break;
        case Mode::Unsafe:
            u = -p.a_max;
            collision_course = true;
            break;
    }
    const double clamped = std::clamp(u, -p.a_max, p.a_max);
    return {clamped, mode, clamped != u, collision_course};
}

double apply_speed_limits(double v, double u, const VehicleParams& p) {
    if (v <= 0.0 && u < 0.0) return 0.0;
    if (v >= p.v_max && u > 0.0) return 0.0;
    return u;
}

}  // namespace mesoacc
