#include "mesoacc/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <vector>

#include "mesoacc/text.hpp"

namespace mesoacc {

MetricsReport compute_metrics(std::span<const TraceRecord> traces, std::span<const Event> events,
                              const MetricsConfig& cfg) {
    MetricsReport rep;
    for (const Event& e : events) {
        if (e.kind == "collision") ++rep.collision_count;
    }

    std::map<int, std::vector<const TraceRecord*>> by_id;
    for (const TraceRecord& r : traces) by_id[r.id].push_back(&r);

    for (auto& [id, recs] : by_id) {
        VehicleMetrics m;
        const auto pit = cfg.params.find(id);
        const VehicleParams params = pit == cfg.params.end() ? VehicleParams{} : pit->second;

        double min_sep = std::numeric_limits<double>::infinity();
        double last_sign = 0.0;
        int flips = 0;
        double peak_x2 = 0.0;
        double alpha_sum = 0.0;
        double alpha_peak = 0.0;
        for (std::size_t k = 0; k < recs.size(); ++k) {
            const TraceRecord& r = *recs[k];
            min_sep = std::min(min_sep, r.x1);
            m.peak_abs_accel = std::max(m.peak_abs_accel, std::abs(r.accel));
            alpha_sum += r.alpha_t;
            alpha_peak = std::max(alpha_peak, r.alpha_t);
            if (k + 1 < recs.size()) {
                m.dwell[r.mode] += recs[k + 1]->t - r.t;
            }
            if (!m.deceleration_onset && r.t >= cfg.onset_event_time &&
                r.accel <= cfg.onset_threshold) {
                m.deceleration_onset = r.t;
            }
            if (!m.first_equilibrium &&
                in_equilibrium({r.x1, r.x2, r.x3}, params, r.alpha_t, cfg.eq_tol)) {
                m.first_equilibrium = r.t;
            }
            if (m.first_equilibrium) {
                peak_x2 = std::max(peak_x2, std::abs(r.x2));
                const double s = r.x2 > 0.0 ? 1.0 : r.x2 < 0.0 ? -1.0 : 0.0;
                if (s != 0.0) {
                    if (last_sign != 0.0 && s != last_sign) ++flips;
                    last_sign = s;
                }
            }
        }
        if (id != 1 && !recs.empty()) m.min_separation = min_sep;
        if (m.first_equilibrium) {
            m.oscillation_count = flips;
            m.peak_post_eq_abs_rel_speed = peak_x2;
        }
        if (!recs.empty()) {
            m.alpha_mean = alpha_sum / static_cast<double>(recs.size());
            m.alpha_peak = alpha_peak;
        }
        rep.vehicles[id] = std::move(m);
    }
    return rep;
}

void write_metrics(std::ostream& os, const MetricsReport& rep) {
    os << "collision_count = " << rep.collision_count << '\n';
    auto put = [&os](const std::string& key, const std::optional<double>& v) {
        os << key << " = " << (v ? format_double(*v) : "none") << '\n';
    };
    for (const auto& [id, m] : rep.vehicles) {
        const std::string tag = "." + std::to_string(id);
        put("min_separation_m" + tag, m.min_separation);
        put("deceleration_onset_s" + tag, m.deceleration_onset);
        put("first_equilibrium_s" + tag, m.first_equilibrium);
        os << "oscillation_count" << tag << " = "
           << (m.oscillation_count ? std::to_string(*m.oscillation_count) : "none") << '\n';
        put("peak_post_eq_abs_x2_mps" + tag, m.peak_post_eq_abs_rel_speed);
        os << "peak_abs_accel_mps2" << tag << " = " << format_double(m.peak_abs_accel) << '\n';
        for (const auto& [mode, dwell] : m.dwell) {
            os << "mode_dwell_s" << tag << "." << mode_label(mode) << " = " << format_double(dwell)
               << '\n';
        }
        put("alpha_t_mean" + tag, m.alpha_mean);
        put("alpha_t_peak" + tag, m.alpha_peak);
    }
}

}  // namespace mesoacc
