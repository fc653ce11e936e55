#include "mesoacc/scenario.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "mesoacc/text.hpp"

namespace mesoacc {

namespace {

struct RawEntry {
    int line;
    std::string key;
    std::string value;
};

struct RawSection {
    int line = 0;
    std::vector<RawEntry> entries;
};

[[noreturn]] void fail(int line, const std::string& section, const std::string& msg) {
    throw ScenarioError(line, section, msg);
}

double num(const RawEntry& e, const std::string& section) {
    try {
        return parse_double(e.value);
    } catch (const std::exception& ex) {
        fail(e.line, section, std::string(ex.what()));
    }
}

long integer(const RawEntry& e, const std::string& section) {
    try {
        return parse_long(e.value);
    } catch (const std::exception& ex) {
        fail(e.line, section, std::string(ex.what()));
    }
}

bool on_off(const RawEntry& e, const std::string& section) {
    try {
        return parse_on_off(e.value);
    } catch (const std::exception& ex) {
        fail(e.line, section, std::string(ex.what()));
    }
}

void apply_sim(const RawEntry& e, SimConfig& cfg) {
    const std::string section = "sim";
    if (e.key == "duration_s") cfg.duration = num(e, section);
    else if (e.key == "dt_s") cfg.dt = num(e, section);
    else if (e.key == "vdt") cfg.vdt_enabled = on_off(e, section);
    else if (e.key == "sample_every") cfg.sample_every = static_cast<int>(integer(e, section));
    else if (e.key == "zeno_window_s") cfg.zeno_window = num(e, section);
    else if (e.key == "zeno_limit") cfg.zeno_limit = static_cast<int>(integer(e, section));
    else if (e.key == "leader_gain") cfg.leader_gain = num(e, section);
    else if (e.key == "seed") cfg.seed = static_cast<std::uint64_t>(integer(e, section));
    else fail(e.line, section, "unknown key '" + e.key + "'");
}

void apply_channel(const RawEntry& e, ChannelParams& ch) {
    const std::string section = "channel";
    if (e.key == "radio_range_m") ch.radio_range = num(e, section);
    else if (e.key == "hop_delay_s") ch.hop_delay = num(e, section);
    else if (e.key == "max_end_to_end_s") ch.max_end_to_end = num(e, section);
    else if (e.key == "broadcast_period_s") ch.broadcast_period = num(e, section);
    else if (e.key == "relay_compute_s") ch.relay_compute = num(e, section);
    else if (e.key == "jitter_s") ch.jitter = num(e, section);
    else if (e.key == "enabled") ch.enabled = on_off(e, section);
    else fail(e.line, section, "unknown key '" + e.key + "'");
}

void apply_vdt(const RawEntry& e, SimConfig& cfg) {
    const std::string section = "vdt";
    if (e.key == "gamma") cfg.vdt.gamma = num(e, section);
    else if (e.key == "alpha_t_max") cfg.vdt.alpha_t_max = num(e, section);
    else if (e.key == "alpha_t_0") cfg.vdt.alpha_t_0 = num(e, section);
    else if (e.key == "staleness_s") cfg.vdt.staleness_limit = num(e, section);
    else if (e.key == "update_period_s") cfg.vdt.update_period = num(e, section);
    else if (e.key == "population") {
        if (e.value == "in_range") cfg.vdt_population = VdtPopulation::InRange;
        else if (e.value == "all_ahead") cfg.vdt_population = VdtPopulation::AllAhead;
        else fail(e.line, section, "population must be 'in_range' or 'all_ahead'");
    } else {
        fail(e.line, section, "unknown key '" + e.key + "'");
    }
}

void apply_vehicle(const RawEntry& e, const std::string& section, VehicleSpec& spec,
                   bool& pos_set, bool& v_set) {
    if (e.key == "init_pos_m") { spec.init_pos = num(e, section); pos_set = true; }
    else if (e.key == "init_v_mps") { spec.init_v = num(e, section); v_set = true; }
    else if (e.key == "length") spec.params.length = num(e, section);
    else if (e.key == "clearance") spec.params.clearance = num(e, section);
    else if (e.key == "a_max") spec.params.a_max = num(e, section);
    else if (e.key == "v_max") spec.params.v_max = num(e, section);
    else if (e.key == "v_des") spec.params.v_des = num(e, section);
    else if (e.key == "lambda") spec.params.lambda = num(e, section);
    else if (e.key == "c_r") spec.params.c_r = num(e, section);
    else if (e.key == "c_s") spec.params.c_s = num(e, section);
    else if (e.key == "c_c") spec.params.c_c = num(e, section);
    else if (e.key == "t_d") spec.params.t_d = num(e, section);
    else if (e.key == "g_ref") spec.params.g_ref = num(e, section);
    else if (e.key == "alpha1") spec.params.alpha1 = num(e, section);
    else if (e.key == "alpha2") spec.params.alpha2 = num(e, section);
    else if (e.key == "alpha4") spec.params.alpha4 = num(e, section);
    else if (e.key == "epsilon") spec.params.epsilon = num(e, section);
    else fail(e.line, section, "unknown key '" + e.key + "'");
}

}  // namespace

ScenarioError::ScenarioError(int line_, std::string section_, const std::string& what_)
    : std::runtime_error(line_ > 0
                             ? "line " + std::to_string(line_) + ": " + what_
                             : "[" + section_ + "]: " + what_),
      line(line_),
      section(std::move(section_)) {}

ScenarioFile parse_scenario(std::string_view text) {
    std::map<std::string, RawSection> sections;
    std::vector<std::string> order;
    std::string current;
    int line_no = 0;

    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t end = text.find('\n', start);
        std::string_view raw =
            text.substr(start, end == std::string_view::npos ? std::string_view::npos
                                                             : end - start);
        start = end == std::string_view::npos ? text.size() + 1 : end + 1;
        ++line_no;

        std::string_view sv = raw;
        const std::size_t hash = sv.find('#');
        if (hash != std::string_view::npos) sv = sv.substr(0, hash);
        sv = trim(sv);
        if (sv.empty()) continue;

        if (sv.front() == '[') {
            if (sv.back() != ']') fail(line_no, "", "unterminated section header");
            current = std::string(trim(sv.substr(1, sv.size() - 2)));
            if (current.empty()) fail(line_no, "", "empty section name");
            if (!sections.count(current)) order.push_back(current);
            auto& sec = sections[current];
            if (sec.line == 0) sec.line = line_no;
            continue;
        }
        if (current.empty()) fail(line_no, "", "key outside any section");
        const std::size_t eq = sv.find('=');
        if (eq == std::string_view::npos) fail(line_no, current, "expected 'key = value'");
        const std::string key(trim(sv.substr(0, eq)));
        const std::string value(trim(sv.substr(eq + 1)));
        if (key.empty()) fail(line_no, current, "empty key");
        if (value.empty()) fail(line_no, current, "empty value for '" + key + "'");
        sections[current].entries.push_back({line_no, key, value});
    }

    ScenarioFile out;

    VehicleSpec defaults;
    bool defaults_pos = false, defaults_v = false;
    std::map<int, RawSection*> vehicle_sections;

    for (const std::string& name : order) {
        RawSection& sec = sections[name];
        if (name == "sim") {
            for (const RawEntry& e : sec.entries) apply_sim(e, out.sim);
        } else if (name == "channel") {
            for (const RawEntry& e : sec.entries) apply_channel(e, out.sim.channel);
        } else if (name == "vdt") {
            for (const RawEntry& e : sec.entries) apply_vdt(e, out.sim);
        } else if (name == "vehicle.defaults") {
            for (const RawEntry& e : sec.entries)
                apply_vehicle(e, name, defaults, defaults_pos, defaults_v);
        } else if (name.rfind("vehicle.", 0) == 0) {
            const std::string idx_str = name.substr(8);
            long idx = 0;
            try {
                idx = parse_long(idx_str);
            } catch (const std::exception&) {
                fail(sec.line, name, "vehicle sections must be numbered or 'defaults'");
            }
            if (idx < 1) fail(sec.line, name, "vehicle numbers start at 1");
            if (vehicle_sections.count(static_cast<int>(idx)))
                fail(sec.line, name, "duplicate vehicle section");
            vehicle_sections[static_cast<int>(idx)] = &sec;
        } else if (name == "leader.profile") {
            for (const RawEntry& e : sec.entries) {
                if (e.key != "event") fail(e.line, name, "unknown key '" + e.key + "'");
                std::vector<std::string_view> parts;
                for (std::string_view piece : split(e.value, ' ')) {
                    piece = trim(piece);
                    if (!piece.empty()) parts.push_back(piece);
                }
                if (parts.size() != 2) fail(e.line, name, "event wants '<t_s> <v_mps>'");
                LeaderEvent ev;
                try {
                    ev.t = parse_double(parts[0]);
                    ev.target_speed = parse_double(parts[1]);
                } catch (const std::exception& ex) {
                    fail(e.line, name, ex.what());
                }
                out.profile.events.push_back(ev);
            }
        } else {
            fail(sec.line, name, "unknown section");
        }
    }

    if (vehicle_sections.empty()) fail(0, "vehicle.1", "at least one vehicle is required");
    int expect = 1;
    for (const auto& [idx, sec] : vehicle_sections) {
        if (idx != expect) {
            fail(0, "vehicle." + std::to_string(idx),
                 "vehicle numbers must be contiguous from 1");
        }
        ++expect;
        VehicleSpec spec = defaults;
        bool pos_set = defaults_pos, v_set = defaults_v;
        for (const RawEntry& e : sec->entries) {
            apply_vehicle(e, "vehicle." + std::to_string(idx), spec, pos_set, v_set);
        }
        const std::string section = "vehicle." + std::to_string(idx);
        if (!pos_set) fail(0, section, "init_pos_m is required");
        if (!v_set) fail(0, section, "init_v_mps is required");
        for (const std::string& err : spec.params.validate()) fail(0, section, err);
        if (spec.init_v < 0.0 || spec.init_v > spec.params.v_max)
            fail(0, section, "init_v_mps must lie in [0, v_max]");
        out.vehicles.push_back(spec);
    }

    for (std::size_t i = 1; i < out.vehicles.size(); ++i) {
        if (!(out.vehicles[i - 1].init_pos > out.vehicles[i].init_pos)) {
            fail(0, "vehicle." + std::to_string(i + 1),
                 "positions must strictly decrease with the vehicle number");
        }
    }

    if (!(out.sim.dt > 0.0)) fail(0, "sim", "dt_s must be positive");
    if (!(out.sim.duration > 0.0)) fail(0, "sim", "duration_s must be positive");
    if (out.sim.sample_every < 1) fail(0, "sim", "sample_every must be at least 1");
    if (!(out.sim.zeno_window > 0.0)) fail(0, "sim", "zeno_window_s must be positive");
    if (out.sim.zeno_limit < 1) fail(0, "sim", "zeno_limit must be at least 1");
    if (!(out.sim.leader_gain > 0.0)) fail(0, "sim", "leader_gain must be positive");
    for (const std::string& err : out.sim.channel.validate()) fail(0, "channel", err);
    for (const std::string& err : out.sim.vdt.validate()) fail(0, "vdt", err);

    double prev_t = -std::numeric_limits<double>::infinity();
    const double leader_v_max = out.vehicles.front().params.v_max;
    for (const LeaderEvent& ev : out.profile.events) {
        if (!(ev.t > prev_t)) fail(0, "leader.profile", "event times must strictly increase");
        prev_t = ev.t;
        if (ev.target_speed < 0.0 || ev.target_speed > leader_v_max)
            fail(0, "leader.profile", "target speeds must lie in [0, v_max]");
    }

    return out;
}

std::string serialize_scenario(const ScenarioFile& s) {
    std::ostringstream os;
    const auto d = [](double v) { return format_double(v); };
    os << "[sim]\n";
    os << "duration_s = " << d(s.sim.duration) << '\n';
    os << "dt_s = " << d(s.sim.dt) << '\n';
    os << "vdt = " << (s.sim.vdt_enabled ? "on" : "off") << '\n';
    os << "sample_every = " << s.sim.sample_every << '\n';
    os << "zeno_window_s = " << d(s.sim.zeno_window) << '\n';
    os << "zeno_limit = " << s.sim.zeno_limit << '\n';
    os << "leader_gain = " << d(s.sim.leader_gain) << '\n';
    os << "seed = " << s.sim.seed << '\n';
    os << "\n[channel]\n";
    os << "enabled = " << (s.sim.channel.enabled ? "on" : "off") << '\n';
    os << "radio_range_m = " << d(s.sim.channel.radio_range) << '\n';
    os << "hop_delay_s = " << d(s.sim.channel.hop_delay) << '\n';
    os << "max_end_to_end_s = " << d(s.sim.channel.max_end_to_end) << '\n';
    os << "broadcast_period_s = " << d(s.sim.channel.broadcast_period) << '\n';
    os << "relay_compute_s = " << d(s.sim.channel.relay_compute) << '\n';
    os << "jitter_s = " << d(s.sim.channel.jitter) << '\n';
    os << "\n[vdt]\n";
    os << "gamma = " << d(s.sim.vdt.gamma) << '\n';
    os << "alpha_t_max = " << d(s.sim.vdt.alpha_t_max) << '\n';
    os << "alpha_t_0 = " << d(s.sim.vdt.alpha_t_0) << '\n';
    os << "staleness_s = " << d(s.sim.vdt.staleness_limit) << '\n';
    os << "update_period_s = " << d(s.sim.vdt.update_period) << '\n';
    os << "population = "
       << (s.sim.vdt_population == VdtPopulation::InRange ? "in_range" : "all_ahead") << '\n';
    for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
        const VehicleSpec& v = s.vehicles[i];
        const VehicleParams& p = v.params;
        os << "\n[vehicle." << (i + 1) << "]\n";
        os << "init_pos_m = " << d(v.init_pos) << '\n';
        os << "init_v_mps = " << d(v.init_v) << '\n';
        os << "length = " << d(p.length) << '\n';
        os << "clearance = " << d(p.clearance) << '\n';
        os << "a_max = " << d(p.a_max) << '\n';
        os << "v_max = " << d(p.v_max) << '\n';
        os << "v_des = " << d(p.v_des) << '\n';
        os << "lambda = " << d(p.lambda) << '\n';
        os << "c_r = " << d(p.c_r) << '\n';
        os << "c_s = " << d(p.c_s) << '\n';
        os << "c_c = " << d(p.c_c) << '\n';
        os << "t_d = " << d(p.t_d) << '\n';
        os << "g_ref = " << d(p.g_ref) << '\n';
        os << "alpha1 = " << d(p.alpha1) << '\n';
        os << "alpha2 = " << d(p.alpha2) << '\n';
        os << "alpha4 = " << d(p.alpha4) << '\n';
        os << "epsilon = " << d(p.epsilon) << '\n';
    }
    os << "\n[leader.profile]\n";
    for (const LeaderEvent& ev : s.profile.events) {
        os << "event = " << d(ev.t) << ' ' << d(ev.target_speed) << '\n';
    }
    return os.str();
}

ScenarioFile load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(0, path.string(), "cannot open scenario file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

std::vector<VehicleSim> make_vehicles(const ScenarioFile& s) {
    std::vector<VehicleSim> out;
    out.reserve(s.vehicles.size());
    for (std::size_t i = 0; i < s.vehicles.size(); ++i) {
        const VehicleSpec& spec = s.vehicles[i];
        VehicleSim v;
        v.id = static_cast<int>(i) + 1;
        v.pos = spec.init_pos;
        v.speed = spec.init_v;
        v.params = spec.params;
        out.push_back(v);
    }
    return out;
}

}  // namespace mesoacc
