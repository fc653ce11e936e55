#include "mesoacc/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

#include "mesoacc/text.hpp"

namespace mesoacc {

namespace {

std::string collision_message(double t, int follower_id) {
    return "collision: vehicle " + std::to_string(follower_id) + " at t=" + format_double(t);
}

std::string zeno_message(double t, int id, int switches) {
    return "zeno suspect: vehicle " + std::to_string(id) + " switched " +
           std::to_string(switches) + " times within the window ending at t=" + format_double(t);
}

constexpr double kTimeEps = 1e-9;

}  // namespace

CollisionDetected::CollisionDetected(double t_, int follower_id_)
    : std::runtime_error(collision_message(t_, follower_id_)), t(t_), follower_id(follower_id_) {}

ZenoSuspect::ZenoSuspect(double t_, int vehicle_id_, int switches_)
    : std::runtime_error(zeno_message(t_, vehicle_id_, switches_)),
      t(t_), vehicle_id(vehicle_id_), switches(switches_) {}

double LeaderProfile::target(double t, double initial_speed) const {
    double tgt = initial_speed;
    for (const LeaderEvent& e : events) {
        if (e.t <= t + kTimeEps) {
            tgt = e.target_speed;
        } else {
            break;
        }
    }
    return tgt;
}

double leader_accel(double t, const LeaderProfile& profile, double initial_target,
                    double v, const VehicleParams& p, double gain) {
    const double u = gain * (profile.target(t, initial_target) - v);
    return std::clamp(u, -p.a_max, p.a_max);
}

RelativeState relative_state(const VehicleSim& lead, const VehicleSim& follow) {
    return {lead.pos - follow.pos, lead.speed - follow.speed, lead.speed};
}

std::string_view outcome_label(RunOutcome o) {
    switch (o) {
        case RunOutcome::Completed: return "completed";
        case RunOutcome::Collision: return "collision";
        case RunOutcome::Zeno: return "zeno_suspect";
    }
    return "?";
}

World::World(std::vector<VehicleSim> vehicles, LeaderProfile profile, SimConfig cfg)
    : vehicles_(std::move(vehicles)),
      profile_(std::move(profile)),
      cfg_(cfg),
      channel_(cfg.channel, static_cast<int>(vehicles_.size()), cfg.seed),
      held_samples_(vehicles_.size()),
      switch_times_(vehicles_.size()) {
    leader_initial_speed_ = vehicles_.empty() ? 0.0 : vehicles_.front().speed;
    last_target_ = leader_initial_speed_;
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        const VehicleSim& v = vehicles_[i];
        RelativeState x;
        if (i == 0) {
            x = {std::numeric_limits<double>::infinity(), v.params.v_max - v.speed,
                 v.params.v_max};
        } else {
            x = relative_state(vehicles_[i - 1], v);
        }
        vehicles_[i].mode = classify(x, v.params, vehicles_[i].vdt.alpha_t);
    }
}

void World::service_channel(double t) {
    if (t + kTimeEps >= next_broadcast_) {
        std::vector<double> positions(vehicles_.size());
        for (std::size_t i = 0; i < vehicles_.size(); ++i) positions[i] = vehicles_[i].pos;
        for (std::size_t i = 0; i < vehicles_.size(); ++i) {
            channel_.broadcast(t, static_cast<int>(i), vehicles_[i].pos, vehicles_[i].speed,
                               positions);
        }
        next_broadcast_ += cfg_.channel.broadcast_period;
    }
    channel_.deliver(t);

    if (t + kTimeEps >= next_stats_refresh_) {
        for (std::size_t i = 0; i < vehicles_.size(); ++i) {
            auto& samples = held_samples_[i];
            samples.clear();
            for (const auto& [origin, rec] : channel_.received(static_cast<int>(i))) {
                if (origin >= static_cast<int>(i)) continue;  // ahead vehicles only
                if (cfg_.vdt_population == VdtPopulation::InRange &&
                    rec.message.position - vehicles_[i].pos > kInteractionRangeM) {
                    continue;
                }
                samples.push_back({rec.message.speed, t - rec.message.emitted_at});
            }
        }
        next_stats_refresh_ += cfg_.vdt.update_period;
    }

    const double tgt = profile_.target(t, leader_initial_speed_);
    if (tgt != last_target_) {
        last_target_ = tgt;
        events_.push_back({t, "leader_target", 1, format_double(tgt)});
    }
}

World::Derived World::derive(std::size_t i, double t, bool advance_filter) {
    VehicleSim& veh = vehicles_[i];
    Derived d;
    if (i == 0) {
        d.x = {std::numeric_limits<double>::infinity(), veh.params.v_max - veh.speed,
               veh.params.v_max};
    } else {
        d.x = relative_state(vehicles_[i - 1], veh);
    }
    if (cfg_.vdt_enabled) {
        if (advance_filter) {
            veh.vdt = step_alpha(veh.vdt, held_samples_[i], veh.speed, cfg_.vdt, cfg_.dt);
        }
        d.alpha_t = veh.vdt.alpha_t;
        d.v_bar = veh.vdt.v_bar;
        d.theta = veh.vdt.theta;
    } else {
        d.alpha_t = 1.0;
        d.v_bar = 0.0;
        d.theta = 0.0;
    }
    d.mode = classify(d.x, veh.params, d.alpha_t);
    double u = 0.0;
    if (i == 0) {
        u = leader_accel(t, profile_, leader_initial_speed_, veh.speed, veh.params,
                         cfg_.leader_gain);
    } else {
        u = control(d.x, veh.params, d.mode).u;
    }
    d.accel = apply_speed_limits(veh.speed, u, veh.params);
    return d;
}

void World::note_mode(std::size_t i, Mode mode, double t) {
    VehicleSim& veh = vehicles_[i];
    if (mode == veh.mode) return;
    events_.push_back({t, "mode_switch", veh.id,
                       std::string(mode_label(veh.mode)) + "->" + std::string(mode_label(mode))});
    if (mode == Mode::Unsafe) {
        events_.push_back({t, "q6_entry", veh.id, ""});
    }
    veh.mode = mode;

    auto& times = switch_times_[i];
    times.push_back(t);
    while (!times.empty() && times.front() < t - cfg_.zeno_window) times.pop_front();
    if (static_cast<int>(times.size()) > cfg_.zeno_limit) {
        events_.push_back({t, "zeno_suspect", veh.id, std::to_string(times.size()) + " switches"});
        throw ZenoSuspect(t, veh.id, static_cast<int>(times.size()));
    }
}

void World::check_collisions() {
    const double t = time();
    for (std::size_t i = 1; i < vehicles_.size(); ++i) {
        const double gap = vehicles_[i - 1].pos - vehicles_[i].pos;
        if (gap < vehicles_[i].params.min_gap()) {
            events_.push_back({t, "collision", vehicles_[i].id, "gap " + format_double(gap)});
            throw CollisionDetected(t, vehicles_[i].id);
        }
    }
}

void World::step() {
    const double t = time();
    check_collisions();
    service_channel(t);

    last_records_.clear();
    last_records_.resize(vehicles_.size());
    // back to front, so every follower sees its leader's pre-step state
    std::vector<double> new_speed(vehicles_.size());
    std::vector<double> new_pos(vehicles_.size());
    for (std::size_t k = vehicles_.size(); k-- > 0;) {
        VehicleSim& veh = vehicles_[k];
        const Derived d = derive(k, t, /*advance_filter=*/true);
        note_mode(k, d.mode, t);

        const double v_raw = veh.speed + d.accel * cfg_.dt;
        const double v_new = std::clamp(v_raw, 0.0, veh.params.v_max);
        const double accel_logged = v_new == v_raw ? d.accel : (v_new - veh.speed) / cfg_.dt;
        new_speed[k] = v_new;
        new_pos[k] = veh.pos + v_new * cfg_.dt;

        last_records_[k] = {t,      veh.id,    veh.pos, veh.speed, accel_logged, d.mode,
                            d.x.gap, d.x.rel_speed, d.x.lead_speed, d.alpha_t, d.v_bar, d.theta};
    }
    for (std::size_t k = 0; k < vehicles_.size(); ++k) {
        vehicles_[k].speed = new_speed[k];
        vehicles_[k].pos = new_pos[k];
    }
    ++step_count_;
}

std::vector<TraceRecord> World::observe() const {
    const double t = time();
    std::vector<TraceRecord> out(vehicles_.size());
    for (std::size_t i = 0; i < vehicles_.size(); ++i) {
        const VehicleSim& veh = vehicles_[i];
        RelativeState x;
        if (i == 0) {
            x = {std::numeric_limits<double>::infinity(), veh.params.v_max - veh.speed,
                 veh.params.v_max};
        } else {
            x = relative_state(vehicles_[i - 1], veh);
        }
        const double alpha = cfg_.vdt_enabled ? veh.vdt.alpha_t : 1.0;
        const Mode mode = classify(x, veh.params, alpha);
        double u = 0.0;
        if (i == 0) {
            u = leader_accel(t, profile_, leader_initial_speed_, veh.speed, veh.params,
                             cfg_.leader_gain);
        } else {
            u = control(x, veh.params, mode).u;
        }
        u = apply_speed_limits(veh.speed, u, veh.params);
        out[i] = {t,     veh.id, veh.pos, veh.speed, u, mode, x.gap, x.rel_speed,
                  x.lead_speed, alpha,  cfg_.vdt_enabled ? veh.vdt.v_bar : 0.0,
                  cfg_.vdt_enabled ? veh.vdt.theta : 0.0};
    }
    return out;
}

RunResult run(std::vector<VehicleSim> vehicles, LeaderProfile profile, const SimConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    World world(std::move(vehicles), std::move(profile), cfg);
    RunResult res;
    const long n_steps = std::lround(cfg.duration / cfg.dt);
    try {
        for (long k = 0; k < n_steps; ++k) {
            world.step();
            if (k % cfg.sample_every == 0) {
                const auto& recs = world.last_records();
                res.traces.insert(res.traces.end(), recs.begin(), recs.end());
            }
        }
        world.check_collisions();
        const auto final_recs = world.observe();
        res.traces.insert(res.traces.end(), final_recs.begin(), final_recs.end());
    } catch (const CollisionDetected&) {
        res.outcome = RunOutcome::Collision;
        const auto recs = world.observe();
        res.traces.insert(res.traces.end(), recs.begin(), recs.end());
    } catch (const ZenoSuspect&) {
        res.outcome = RunOutcome::Zeno;
        const auto recs = world.observe();
        res.traces.insert(res.traces.end(), recs.begin(), recs.end());
    }
    res.events = world.events();
    res.channel_log = world.channel().log();
    for (DeliveryLogRow& row : res.channel_log) {
        ++row.origin;  // vehicle ids are 1-based in exports
        ++row.receiver;
    }
    res.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

std::optional<double> convergence_time(std::span<const TraceRecord> traces, int follower_id,
                                       const VehicleParams& p, double tol) {
    std::optional<double> candidate;
    bool any = false;
    for (const TraceRecord& r : traces) {
        if (r.id != follower_id) continue;
        any = true;
        const RelativeState x{r.x1, r.x2, r.x3};
        if (in_equilibrium(x, p, r.alpha_t, tol)) {
            if (!candidate) candidate = r.t;
        } else {
            candidate.reset();
        }
    }
    if (!any) return std::nullopt;
    return candidate;
}

void write_trace_csv(std::ostream& os, std::span<const TraceRecord> traces) {
    os << "t,id,pos_m,v_mps,a_mps2,mode,x1_m,x2_mps,x3_mps,alpha_t,v_bar_mps,theta_m2ps2\n";
    for (const TraceRecord& r : traces) {
        os << format_double(r.t) << ',' << r.id << ',' << format_double(r.pos) << ','
           << format_double(r.speed) << ',' << format_double(r.accel) << ',' << mode_label(r.mode)
           << ',' << format_double(r.x1) << ',' << format_double(r.x2) << ','
           << format_double(r.x3) << ',' << format_double(r.alpha_t) << ','
           << format_double(r.v_bar) << ',' << format_double(r.theta) << '\n';
    }
}

std::vector<TraceRecord> read_trace_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty trace csv");
    if (trim(line) != "t,id,pos_m,v_mps,a_mps2,mode,x1_m,x2_mps,x3_mps,alpha_t,v_bar_mps,theta_m2ps2") {
        throw std::invalid_argument("unexpected trace csv header: " + line);
    }
    std::vector<TraceRecord> out;
    while (std::getline(is, line)) {
        const auto sv = trim(line);
        if (sv.empty()) continue;
        const auto cols = split(sv, ',');
        if (cols.size() != 12) throw std::invalid_argument("bad trace csv row: " + line);
        TraceRecord r;
        r.t = parse_double(cols[0]);
        r.id = static_cast<int>(parse_long(cols[1]));
        r.pos = parse_double(cols[2]);
        r.speed = parse_double(cols[3]);
        r.accel = parse_double(cols[4]);
        r.mode = mode_from_label(cols[5]);
        r.x1 = parse_double(cols[6]);
        r.x2 = parse_double(cols[7]);
        r.x3 = parse_double(cols[8]);
        r.alpha_t = parse_double(cols[9]);
        r.v_bar = parse_double(cols[10]);
        r.theta = parse_double(cols[11]);
        out.push_back(r);
    }
    return out;
}

void write_events_csv(std::ostream& os, std::span<const Event> events) {
    os << "t,kind,id,detail\n";
    for (const Event& e : events) {
        os << format_double(e.t) << ',' << e.kind << ',' << e.id << ',' << e.detail << '\n';
    }
}

std::vector<Event> read_events_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw std::invalid_argument("empty events csv");
    if (trim(line) != "t,kind,id,detail") {
        throw std::invalid_argument("unexpected events csv header: " + line);
    }
    std::vector<Event> out;
    while (std::getline(is, line)) {
        const auto sv = trim(line);
        if (sv.empty()) continue;
        const auto cols = split(sv, ',');
        if (cols.size() < 4) throw std::invalid_argument("bad events csv row: " + line);
        Event e;
        e.t = parse_double(cols[0]);
        e.kind = std::string(cols[1]);
        e.id = static_cast<int>(parse_long(cols[2]));
        e.detail = std::string(cols[3]);
        for (std::size_t i = 4; i < cols.size(); ++i) {
            e.detail += ',';
            e.detail += cols[i];
        }
        out.push_back(e);
    }
    return out;
}

void write_phase_csv(std::ostream& os, std::span<const TraceRecord> traces, int id) {
    os << "x2_mps,x1_m\n";
    for (const TraceRecord& r : traces) {
        if (r.id != id) continue;
        os << format_double(r.x2) << ',' << format_double(r.x1) << '\n';
    }
}

}  // namespace mesoacc
