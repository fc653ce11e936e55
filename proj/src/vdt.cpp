#include "mesoacc/vdt.hpp"

#include <algorithm>
#include <cmath>

namespace mesoacc {

namespace {

double sign(double v) {
    if (v > 0.0) return 1.0;
    if (v < 0.0) return -1.0;
    return 0.0;
}

}  // namespace

std::vector<std::string> VdtParams::validate() const {
    std::vector<std::string> errs;
    if (!(gamma > 0.0)) errs.push_back("gamma must be positive");
    if (!(alpha_t_max > 1.0)) errs.push_back("alpha_t_max must exceed 1");
    if (!(alpha_t_0 > 0.0 && alpha_t_0 < 1.0)) errs.push_back("alpha_t_0 must lie in (0, 1)");
    if (!(staleness_limit > 0.0)) errs.push_back("staleness_s must be positive");
    if (!(update_period > 0.0)) errs.push_back("update_period_s must be positive");
    return errs;
}

std::optional<SpeedStats> speed_stats(std::span<const double> speeds) {
    if (speeds.empty()) return std::nullopt;
    const double n = static_cast<double>(speeds.size());
    double sum = 0.0;
    for (double v : speeds) sum += v;
    const double mean = sum / n;
    double sq = 0.0;
    for (double v : speeds) sq += (v - mean) * (v - mean);
    return SpeedStats{mean, sq / n};
}

double variation_coefficient(double mean_speed, double variance) {
    if (!(mean_speed > 0.0)) return 0.0;
    return std::sqrt(variance) / mean_speed;
}

double step_z(double z, double coeff_of_variation, double follower_speed,
              double mean_speed, double gamma, double dt) {
    const double drive = gamma * coeff_of_variation * sign(follower_speed - mean_speed);
    return z + dt * (-z + drive);
}

double alpha_from_z(double z, const VdtParams& vp) {
    return 1.0 + std::clamp(z, vp.z_min(), vp.z_max());
}

VdtState step_alpha(const VdtState& s, std::span<const SpeedSample> samples,
                    double self_speed, const VdtParams& vp, double dt) {
    VdtState out = s;
    std::vector<double> fresh;
    fresh.reserve(samples.size());
    double newest = std::numeric_limits<double>::infinity();
    for (const SpeedSample& smp : samples) {
        newest = std::min(newest, smp.age);
        if (smp.age <= vp.staleness_limit) fresh.push_back(smp.speed);
    }
    out.newest_age = newest;
    out.sample_count = static_cast<int>(fresh.size());
    if (fresh.empty()) {
        // no usable neighbor data: fall back to the microscopic behavior
        out.z = step_z(s.z, 0.0, self_speed, self_speed, vp.gamma, dt);
    } else {
        const SpeedStats stats = *speed_stats(fresh);
        out.v_bar = stats.mean;
        out.theta = stats.variance;
        const double vn = variation_coefficient(stats.mean, stats.variance);
        out.z = step_z(s.z, vn, self_speed, stats.mean, vp.gamma, dt);
    }
    out.alpha_t = alpha_from_z(out.z, vp);
    return out;
}

}  // namespace mesoacc
