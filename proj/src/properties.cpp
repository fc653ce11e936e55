#include "mesoacc/properties.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "mesoacc/control.hpp"
#include "mesoacc/sim.hpp"
#include "mesoacc/text.hpp"
#include "mesoacc/vdt.hpp"

namespace mesoacc::props {

namespace {

std::string describe(const RelativeState& x) {
    return "x = (" + format_double(x.gap) + ", " + format_double(x.rel_speed) + ", " +
           format_double(x.lead_speed) + ")";
}

bool bit_equal(double a, double b) {
    return std::memcmp(&a, &b, sizeof a) == 0;
}

}  // namespace

RelativeState sample_state(std::mt19937_64& rng, const VehicleParams& p) {
    std::uniform_real_distribution<double> gap(p.min_gap(), kInteractionRangeM);
    std::uniform_real_distribution<double> speed(0.0, p.v_max);
    RelativeState x;
    x.gap = gap(rng);
    x.lead_speed = speed(rng);
    const double follower = speed(rng);
    x.rel_speed = x.lead_speed - follower;
    return x;
}

RelativeState sample_interior_state(std::mt19937_64& rng, const VehicleParams& p,
                                    double alpha_t, double margin) {
    while (true) {
        const RelativeState x = sample_state(rng, p);
        const Thresholds d = thresholds(x, p, alpha_t);
        const double dist = std::min({std::abs(x.gap - d.emergency), std::abs(x.gap - d.risky),
                                      std::abs(x.gap - d.safe), std::abs(x.gap - d.interaction),
                                      std::abs(x.gap - d.approach)});
        if (dist > margin) return x;
    }
}

RelativeState sample_init_state(std::mt19937_64& rng, const VehicleParams& p, double alpha_t) {
    while (true) {
        const RelativeState x = sample_state(rng, p);
        if (classify(x, p, alpha_t) != Mode::Unsafe) return x;
    }
}

PropertyResult partition_property(long samples, std::uint64_t seed, const VehicleParams& p) {
    PropertyResult res{"partition", true, samples, ""};
    std::mt19937_64 rng(seed);
    for (long i = 0; i < samples; ++i) {
        const RelativeState x = sample_interior_state(rng, p, 1.0, 1e-6);
        int members = 0;
        Mode member = Mode::FreeDriving;
        for (int q = 0; q < kModeCount; ++q) {
            if (in_domain(static_cast<Mode>(q), x, p, 1.0)) {
                ++members;
                member = static_cast<Mode>(q);
            }
        }
        if (members != 1) {
            res.pass = false;
            res.detail = describe(x) + " lies in " + std::to_string(members) + " domains";
            return res;
        }
        if (classify(x, p, 1.0) != member) {
            res.pass = false;
            res.detail = describe(x) + " classifies away from its unique domain";
            return res;
        }
    }
    return res;
}

PropertyResult ordering_property(long samples, std::uint64_t seed, const VehicleParams& p) {
    PropertyResult res{"ordering", true, samples, ""};
    std::mt19937_64 rng(seed);
    for (long i = 0; i < samples; ++i) {
        const RelativeState x = sample_state(rng, p);
        const Thresholds d = thresholds(x, p, 1.0);
        if (!(d.emergency <= d.risky && d.risky <= d.safe)) {
            res.pass = false;
            res.detail = describe(x) + " breaks emergency <= risky <= safe";
            return res;
        }
        if (x.rel_speed > 0.0 &&
            !(bit_equal(d.interaction, d.safe) && bit_equal(d.approach, d.safe))) {
            res.pass = false;
            res.detail = describe(x) + " breaks interaction = approach = safe for opening gaps";
            return res;
        }
    }
    return res;
}

PropertyResult collapse_property(long samples, std::uint64_t seed, const VehicleParams& p,
                                 double tol) {
    PropertyResult res{"collapse", true, samples, ""};
    std::mt19937_64 rng(seed);
    double worst = 0.0;
    for (long i = 0; i < samples; ++i) {
        const RelativeState x = sample_state(rng, p);
        const double e = emergency_distance(x, p);
        const double dr = std::abs(risky_distance(x, p, 0.0) - e);
        const double ds = std::abs(safe_distance(x, p, 0.0) - e);
        worst = std::max({worst, dr, ds});
        if (worst > tol) {
            res.pass = false;
            res.detail = describe(x) + " collapse residual " + format_double(worst);
            return res;
        }
    }
    res.detail = "max residual " + format_double(worst);
    return res;
}

PropertyResult continuity_property(long samples, std::uint64_t seed, const VehicleParams& p) {
    PropertyResult res{"continuity", true, samples, ""};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> gap(p.min_gap(), kInteractionRangeM);
    std::uniform_real_distribution<double> speed(0.0, p.v_max);
    std::uniform_real_distribution<double> alpha(0.0, 2.0);
    long interaction_jumps = 0;
    for (long i = 0; i < samples; ++i) {
        RelativeState x;
        x.gap = gap(rng);
        x.lead_speed = speed(rng);
        x.rel_speed = 0.0;
        const double a = alpha(rng);
        const double t_r = a * (x.lead_speed / p.a_max);
        const double t_s = p.lambda * t_r;
        const double upper_e = p.min_gap();
        const double upper_r = p.min_gap() + p.c_r * t_r * x.lead_speed;
        const double upper_s = p.min_gap() + p.c_s * t_s * x.lead_speed;
        const double upper_c = upper_s;
        const double tol = 1e-12 * std::max(1.0, upper_s);
        if (std::abs(emergency_distance(x, p) - upper_e) > tol ||
            std::abs(risky_distance(x, p, a) - upper_r) > tol ||
            std::abs(safe_distance(x, p, a) - upper_s) > tol ||
            std::abs(approach_distance(x, p, a) - upper_c) > tol) {
            res.pass = false;
            res.detail = describe(x) + " branch mismatch at zero relative speed";
            return res;
        }
        if (std::abs(interaction_distance(x, p, a) - upper_s) > tol) ++interaction_jumps;
    }
    res.detail = "interaction distance jumped at " + std::to_string(interaction_jumps) + "/" +
                 std::to_string(samples) + " zero-speed states (expected, not asserted)";
    return res;
}

PropertyResult monotonicity_property(long samples, std::uint64_t seed, const VehicleParams& p,
                                     double alpha_t_max) {
    PropertyResult res{"monotonicity", true, samples, ""};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> alpha(0.0, alpha_t_max);
    for (long i = 0; i < samples; ++i) {
        const RelativeState x = sample_state(rng, p);
        double a1 = alpha(rng);
        double a2 = alpha(rng);
        if (a2 < a1) std::swap(a1, a2);
        const bool ok = risky_distance(x, p, a1) <= risky_distance(x, p, a2) &&
                        safe_distance(x, p, a1) <= safe_distance(x, p, a2) &&
                        approach_distance(x, p, a1) <= approach_distance(x, p, a2) &&
                        (x.rel_speed > 0.0 ||
                         interaction_distance(x, p, a1) <= interaction_distance(x, p, a2));
        if (!ok) {
            res.pass = false;
            res.detail = describe(x) + " threshold decreased from alpha " + format_double(a1) +
                         " to " + format_double(a2);
            return res;
        }
    }
    return res;
}

PropertyResult control_property(long samples, std::uint64_t seed, const VehicleParams& p) {
    PropertyResult res{"control-bounds", true, samples, ""};
    std::mt19937_64 rng(seed);
    for (long i = 0; i < samples; ++i) {
        const RelativeState x = sample_state(rng, p);
        const Mode mode = classify(x, p, 1.0);
        const ControlOutput out = control(x, p, mode);
        if (std::abs(out.u) > p.a_max) {
            res.pass = false;
            res.detail = describe(x) + " command exceeds the bound";
            return res;
        }
        if (mode == Mode::Danger && out.u != -p.a_max) {
            res.pass = false;
            res.detail = describe(x) + " danger mode did not brake at -a_max";
            return res;
        }
        const ControlOutput again = control(x, p, mode);
        if (!bit_equal(out.u, again.u)) {
            res.pass = false;
            res.detail = describe(x) + " control is not reproducible";
            return res;
        }
        const RelativeState settled{x.gap, 0.0, x.lead_speed};
        if (closing_in_accel(settled, p) != 0.0) {
            res.pass = false;
            res.detail = describe(settled) + " closing-in command nonzero at zero relative speed";
            return res;
        }
    }
    return res;
}

PropertyResult alpha_bounds_property(long samples, std::uint64_t seed) {
    PropertyResult res{"alpha-bounds", true, samples, ""};
    std::mt19937_64 rng(seed);
    VdtParams vp;
    std::uniform_real_distribution<double> speed(0.0, 40.0);
    std::uniform_real_distribution<double> age(0.0, 2.0);
    std::uniform_int_distribution<int> count(0, 6);
    VdtState s;
    for (long i = 0; i < samples; ++i) {
        std::vector<SpeedSample> samples_in(static_cast<std::size_t>(count(rng)));
        for (SpeedSample& smp : samples_in) smp = {speed(rng), age(rng)};
        s = step_alpha(s, samples_in, speed(rng), vp, 0.01);
        if (s.alpha_t < vp.alpha_t_0 - 1e-12 || s.alpha_t > vp.alpha_t_max + 1e-12) {
            res.pass = false;
            res.detail = "alpha_t left its bounds: " + format_double(s.alpha_t);
            return res;
        }
    }
    // without variation the filter must decay monotonically toward 1
    VdtState decay;
    decay.z = 0.7;
    double prev = std::abs(decay.z);
    for (int k = 0; k < 2000; ++k) {
        decay = step_alpha(decay, {}, 20.0, vp, 0.01);
        if (std::abs(decay.z) > prev + 1e-15) {
            res.pass = false;
            res.detail = "decay is not monotone";
            return res;
        }
        prev = std::abs(decay.z);
    }
    if (std::abs(decay.alpha_t - 1.0) > 1e-6) {
        res.pass = false;
        res.detail = "alpha_t failed to settle at 1, got " + format_double(decay.alpha_t);
    }
    return res;
}

PropertyResult threshold_safety_property(long samples, std::uint64_t seed,
                                         const VehicleParams& p, double alpha_t_max) {
    PropertyResult res{"threshold-safety", true, samples, ""};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> alpha(0.0, alpha_t_max);
    for (long i = 0; i < samples; ++i) {
        const RelativeState x = sample_state(rng, p);
        const double a = alpha(rng);
        if (risky_distance(x, p, a) < emergency_distance(x, p)) {
            res.pass = false;
            res.detail = describe(x) + " risky fell below emergency at alpha " + format_double(a);
            return res;
        }
    }
    return res;
}

PropertyResult safety_property(long runs, std::uint64_t seed, const VehicleParams& p) {
    PropertyResult res{"safety", true, runs, ""};
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> target(0.5, p.v_max);
    std::uniform_real_distribution<double> event_time(5.0, 50.0);
    for (long i = 0; i < runs; ++i) {
        // starts already in the danger band with a closing speed are excluded:
        // no braking policy can certify those against a hard-braking leader
        RelativeState x;
        while (true) {
            x = sample_init_state(rng, p, 1.0);
            const Mode m = classify(x, p, 1.0);
            if (m != Mode::Danger || x.rel_speed >= 0.0) break;
        }
        std::vector<VehicleSim> vehicles(2);
        vehicles[0].id = 1;
        vehicles[0].pos = x.gap;
        vehicles[0].speed = x.lead_speed;
        vehicles[0].params = p;
        vehicles[1].id = 2;
        vehicles[1].pos = 0.0;
        vehicles[1].speed = x.follower_speed();
        vehicles[1].params = p;

        LeaderProfile profile;
        double t1 = event_time(rng);
        double t2 = event_time(rng);
        if (t2 < t1) std::swap(t1, t2);
        if (t2 == t1) t2 += 1.0;
        profile.events = {{t1, target(rng)}, {t2, target(rng)}};

        SimConfig cfg;
        cfg.dt = 1e-3;
        cfg.duration = 60.0;
        cfg.vdt_enabled = false;
        cfg.sample_every = 100;

        const RunResult r = run(vehicles, profile, cfg);
        bool q6 = false;
        for (const Event& e : r.events) {
            if (e.kind == "q6_entry") q6 = true;
        }
        if (r.outcome != RunOutcome::Completed || q6) {
            res.pass = false;
            res.detail = "run " + std::to_string(i) + " from " + describe(x) + " ended " +
                         std::string(outcome_label(r.outcome)) + (q6 ? " with a q6 entry" : "");
            return res;
        }
    }
    return res;
}

std::vector<PropertyResult> run_all_properties(long samples, std::uint64_t seed,
                                               const VehicleParams& p) {
    std::vector<PropertyResult> out;
    out.push_back(partition_property(samples, seed, p));
    out.push_back(ordering_property(samples, seed + 1, p));
    out.push_back(collapse_property(samples, seed + 2, p, 1e-9));
    out.push_back(continuity_property(std::max(1L, samples / 10), seed + 3, p));
    out.push_back(monotonicity_property(std::max(1L, samples / 10), seed + 4, p, 2.0));
    out.push_back(control_property(std::max(1L, samples / 10), seed + 5, p));
    out.push_back(alpha_bounds_property(std::max(1L, samples / 100), seed + 6));
    out.push_back(threshold_safety_property(samples, seed + 7, p, 2.0));
    const long runs = std::clamp(samples / 20000, 5L, 100L);
    out.push_back(safety_property(runs, seed + 8, p));
    return out;
}

}  // namespace mesoacc::props
