#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mesoacc {

// Parameters of the variance-driven time-headway adaptation.
struct VdtParams {
    double gamma = 4.0;           // sensitivity of the headway factor to speed variation
    double alpha_t_max = 2.0;     // upper bound of the headway factor (> 1)
    double alpha_t_0 = 0.2;       // lower bound of the headway factor, in (0, 1)
    double staleness_limit = 0.5; // samples older than this are ignored [s]
    double update_period = 0.1;   // cadence at which neighbor statistics refresh [s]

    double z_min() const { return alpha_t_0 - 1.0; }
    double z_max() const { return alpha_t_max - 1.0; }

    std::vector<std::string> validate() const;

    bool operator==(const VdtParams&) const = default;
};

// One neighbor speed observation and how old it is.
struct SpeedSample {
    double speed = 0.0;  // [m/s]
    double age = 0.0;    // [s]
};

struct SpeedStats {
    double mean = 0.0;
    double variance = 0.0;  // population variance (divisor n)
};

// Mean and population variance; empty input yields no value.
std::optional<SpeedStats> speed_stats(std::span<const double> speeds);

// sqrt(variance)/mean; zero by convention when the mean is not positive.
double variation_coefficient(double mean_speed, double variance);

// One explicit Euler step of the filter
//   dz/dt = -z + gamma * V * sign(follower_speed - mean_speed)
// with sign(0) = 0.
double step_z(double z, double coeff_of_variation, double follower_speed,
              double mean_speed, double gamma, double dt);

// Headway factor from the filter state: 1 + z clamped to [z_min, z_max].
double alpha_from_z(double z, const VdtParams& vp);

// Filter state plus the last macroscopic inputs, for tracing.
struct VdtState {
    double z = 0.0;
    double alpha_t = 1.0;
    double v_bar = 0.0;   // last neighbor mean speed [m/s]
    double theta = 0.0;   // last neighbor speed variance [m^2/s^2]
    int sample_count = 0;
    double newest_age = std::numeric_limits<double>::infinity();

    bool operator==(const VdtState&) const = default;
};

// Advances the filter by dt. Samples older than the staleness limit are
// dropped; with nothing fresh the state decays toward the microscopic
// behavior (alpha_t -> 1).
VdtState step_alpha(const VdtState& s, std::span<const SpeedSample> samples,
                    double self_speed, const VdtParams& vp, double dt);

}  // namespace mesoacc
