#include "mesoacc/model.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mesoacc {

namespace {

constexpr std::string_view kModeLabels[kModeCount] = {"q1", "q2", "q3", "q4", "q5", "q6"};

// Distance consumed while braking away a closing speed difference at a_max.
double brake_margin(const RelativeState& x, const VehicleParams& p) {
    if (x.rel_speed > 0.0) return 0.0;
    const double t_e = std::abs(x.rel_speed) / p.a_max;
    return 0.5 * p.a_max * t_e * t_e;
}

// Shared headway term of the safe and approach distances.
double safe_headway_term(const RelativeState& x, const VehicleParams& p, double alpha_t) {
    return p.c_s * (alpha_t * time_headways(x, p).safe) * x.lead_speed;
}

}  // namespace

std::vector<std::string> VehicleParams::validate() const {
    std::vector<std::string> errs;
    auto positive = [&](double v, const char* name) {
        if (!(v > 0.0)) errs.push_back(std::string(name) + " must be positive");
    };
    positive(length, "length");
    if (clearance < 0.0) errs.push_back("clearance must be nonnegative");
    positive(a_max, "a_max");
    positive(v_max, "v_max");
    positive(v_des, "v_des");
    if (!(lambda > 1.0)) errs.push_back("lambda must exceed 1");
    positive(c_r, "c_r");
    if (!(c_s >= c_r)) errs.push_back("c_s must be at least c_r");
    positive(c_c, "c_c");
    positive(t_d, "t_d");
    if (!(g_ref > kInteractionRangeM))
        errs.push_back("g_ref must exceed the interaction range");
    positive(alpha1, "alpha1");
    positive(alpha2, "alpha2");
    positive(alpha4, "alpha4");
    if (!(epsilon > 0.0 && epsilon < a_max / lambda))
        errs.push_back("epsilon must lie in (0, a_max/lambda)");
    return errs;
}

std::string_view mode_label(Mode m) {
    return kModeLabels[static_cast<int>(m)];
}

Mode mode_from_label(std::string_view label) {
    for (int i = 0; i < kModeCount; ++i) {
        if (kModeLabels[i] == label) return static_cast<Mode>(i);
    }
    throw std::invalid_argument("unknown mode label: " + std::string(label));
}

TimeHeadways time_headways(const RelativeState& x, const VehicleParams& p) {
    TimeHeadways th;
    th.emergency = std::abs(x.rel_speed) / p.a_max;
    th.response = std::abs(x.follower_speed()) / p.a_max;
    th.safe = p.lambda * th.response;
    return th;
}

double emergency_distance(const RelativeState& x, const VehicleParams& p) {
    return p.min_gap() + brake_margin(x, p);
}

double risky_distance(const RelativeState& x, const VehicleParams& p, double alpha_t) {
    const double t_r = alpha_t * time_headways(x, p).response;
    return p.min_gap() + p.c_r * t_r * x.lead_speed + brake_margin(x, p);
}

double safe_distance(const RelativeState& x, const VehicleParams& p, double alpha_t) {
    return p.min_gap() + safe_headway_term(x, p, alpha_t) + brake_margin(x, p);
}

double interaction_distance(const RelativeState& x, const VehicleParams& p, double alpha_t) {
    if (x.rel_speed > 0.0) return safe_distance(x, p, alpha_t);
    return p.min_gap() + alpha_t * p.t_d * x.follower_speed();
}

double approach_distance(const RelativeState& x, const VehicleParams& p, double alpha_t) {
    double d = p.min_gap() + safe_headway_term(x, p, alpha_t);
    if (x.rel_speed <= 0.0) d += p.c_c * std::sqrt(-x.rel_speed);
    return d;
}

Thresholds thresholds(const RelativeState& x, const VehicleParams& p, double alpha_t) {
    Thresholds d;
    d.emergency = emergency_distance(x, p);
    d.risky = risky_distance(x, p, alpha_t);
    d.safe = safe_distance(x, p, alpha_t);
    d.interaction = interaction_distance(x, p, alpha_t);
    d.approach = approach_distance(x, p, alpha_t);
    return d;
}

bool in_domain(Mode q, const RelativeState& x, const VehicleParams& p, double alpha_t) {
    const Thresholds d = thresholds(x, p, alpha_t);
    const double x1 = x.gap;
    const double x2 = x.rel_speed;
    const bool risky_point = x2 == 0.0 && x1 == d.risky;
    switch (q) {
        case Mode::Unsafe:
            return x1 < d.emergency;
        case Mode::Danger:
            return d.emergency <= x1 && x1 <= d.risky && !risky_point;
        case Mode::ClosingIn:
            return (x2 <= 0.0 && d.risky < x1 && x1 <= d.safe) || risky_point;
        case Mode::FollowingI:
            return x2 < 0.0 && std::max(d.safe, d.approach) < x1 && x1 <= d.interaction;
        case Mode::FollowingII:
            return (x2 <= 0.0 && d.safe < x1 && x1 < std::min(d.interaction, d.approach)) ||
                   (x2 > 0.0 && d.risky < x1 && x1 <= d.safe);
        case Mode::FreeDriving:
            return (x2 >= 0.0 && x1 > d.safe) ||
                   (x2 < 0.0 && x1 > std::max(d.interaction, d.safe));
    }
    return false;
}

Mode classify(const RelativeState& x, const VehicleParams& p, double alpha_t) {
    if (x.gap > kInteractionRangeM) return Mode::FreeDriving;
    constexpr Mode precedence[] = {Mode::Unsafe, Mode::Danger, Mode::ClosingIn,
                                   Mode::FollowingI, Mode::FollowingII};
    for (Mode q : precedence) {
        if (in_domain(q, x, p, alpha_t)) return q;
    }
    return Mode::FreeDriving;
}

bool in_equilibrium(const RelativeState& x, const VehicleParams& p, double alpha_t, double tol) {
    if (std::abs(x.rel_speed) > tol) return false;
    return risky_distance(x, p, alpha_t) <= x.gap && x.gap <= safe_distance(x, p, alpha_t);
}

}  // namespace mesoacc
