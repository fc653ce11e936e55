#include "mesoacc/cli.hpp"

#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "mesoacc/metrics.hpp"
#include "mesoacc/properties.hpp"
#include "mesoacc/scenario.hpp"
#include "mesoacc/text.hpp"

namespace mesoacc {

namespace {

namespace fs = std::filesystem;

struct RunBundle {
    RunResult result;
    MetricsReport metrics;
};

MetricsConfig metrics_config(const ScenarioFile& sc) {
    MetricsConfig mc;
    for (std::size_t i = 0; i < sc.vehicles.size(); ++i) {
        mc.params[static_cast<int>(i) + 1] = sc.vehicles[i].params;
    }
    mc.onset_event_time = sc.profile.events.empty() ? 0.0 : sc.profile.events.front().t;
    return mc;
}

RunBundle run_bundle(const ScenarioFile& sc) {
    RunBundle b;
    b.result = run(make_vehicles(sc), sc.profile, sc.sim);
    b.metrics = compute_metrics(b.result.traces, b.result.events, metrics_config(sc));
    return b;
}

void write_outputs(const fs::path& dir, const ScenarioFile& sc, const RunBundle& b) {
    fs::create_directories(dir);
    {
        std::ofstream f(dir / "trace.csv");
        write_trace_csv(f, b.result.traces);
    }
    {
        std::ofstream f(dir / "events.csv");
        write_events_csv(f, b.result.events);
    }
    {
        std::ofstream f(dir / "channel_log.csv");
        write_channel_log_csv(f, b.result.channel_log);
    }
    {
        std::ofstream f(dir / "metrics.txt");
        write_metrics(f, b.metrics);
        f << "outcome = " << outcome_label(b.result.outcome) << '\n';
    }
    for (std::size_t i = 0; i < sc.vehicles.size(); ++i) {
        std::ofstream f(dir / ("phase_v" + std::to_string(i + 1) + ".csv"));
        write_phase_csv(f, b.result.traces, static_cast<int>(i) + 1);
    }
}

int outcome_exit_code(RunOutcome o) {
    switch (o) {
        case RunOutcome::Completed: return 0;
        case RunOutcome::Collision: return 2;
        case RunOutcome::Zeno: return 3;
    }
    return 3;
}

void print_outcome(const std::string& label, const RunBundle& b) {
    std::cout << label << ": " << outcome_label(b.result.outcome) << " in "
              << format_double(b.result.wall_time_s) << " s wall time, "
              << b.result.traces.size() << " trace records\n";
}

std::string delta_line(const char* key, int id, const std::optional<double>& on,
                       const std::optional<double>& off) {
    std::string line = std::string(key) + "." + std::to_string(id) + " = ";
    if (on && off) {
        line += format_double(*on - *off);
    } else {
        line += "none";
    }
    return line + "\n";
}

int cmd_simulate(const std::string& scenario_path, const std::string& out_dir,
                 const std::string& vdt_flag, std::optional<double> dt,
                 std::optional<std::uint64_t> seed) {
    ScenarioFile sc = load_scenario_file(scenario_path);
    if (!vdt_flag.empty()) sc.sim.vdt_enabled = parse_on_off(vdt_flag);
    if (dt) sc.sim.dt = *dt;
    if (seed) sc.sim.seed = *seed;
    const RunBundle b = run_bundle(sc);
    write_outputs(out_dir, sc, b);
    print_outcome("simulate", b);
    return outcome_exit_code(b.result.outcome);
}

int cmd_compare(const std::string& scenario_path, const std::string& out_dir,
                std::optional<double> dt, std::optional<std::uint64_t> seed) {
    ScenarioFile base = load_scenario_file(scenario_path);
    if (dt) base.sim.dt = *dt;
    if (seed) base.sim.seed = *seed;
    ScenarioFile with = base;
    with.sim.vdt_enabled = true;
    ScenarioFile without = base;
    without.sim.vdt_enabled = false;

    auto fut_on = std::async(std::launch::async, [&] { return run_bundle(with); });
    auto fut_off = std::async(std::launch::async, [&] { return run_bundle(without); });
    const RunBundle on = fut_on.get();
    const RunBundle off = fut_off.get();

    fs::create_directories(out_dir);
    write_outputs(fs::path(out_dir) / "vdt_on", with, on);
    write_outputs(fs::path(out_dir) / "vdt_off", without, off);

    std::ostringstream cmp;
    cmp << "# vdt on\n";
    write_metrics(cmp, on.metrics);
    cmp << "\n# vdt off\n";
    write_metrics(cmp, off.metrics);
    cmp << "\n# deltas (on - off)\n";
    for (const auto& [id, m_on] : on.metrics.vehicles) {
        const auto it = off.metrics.vehicles.find(id);
        if (it == off.metrics.vehicles.end()) continue;
        const VehicleMetrics& m_off = it->second;
        cmp << delta_line("deceleration_onset_delta_s", id, m_on.deceleration_onset,
                          m_off.deceleration_onset);
        std::optional<double> osc_on, osc_off;
        if (m_on.oscillation_count) osc_on = *m_on.oscillation_count;
        if (m_off.oscillation_count) osc_off = *m_off.oscillation_count;
        cmp << delta_line("oscillation_delta", id, osc_on, osc_off);
        cmp << delta_line("peak_abs_accel_delta_mps2", id, m_on.peak_abs_accel,
                          m_off.peak_abs_accel);
    }
    {
        std::ofstream f(fs::path(out_dir) / "compare.txt");
        f << cmp.str();
    }
    std::cout << cmp.str();
    print_outcome("vdt on", on);
    print_outcome("vdt off", off);
    return std::max(outcome_exit_code(on.result.outcome),
                    outcome_exit_code(off.result.outcome));
}

int cmd_check(long samples, std::uint64_t seed, bool corrupt) {
    VehicleParams p;
    if (corrupt) p.c_r = 2.0 * p.c_s * p.lambda;  // break c_s >= c_r on purpose
    const auto results = props::run_all_properties(samples, seed, p);
    bool all_pass = true;
    for (const auto& r : results) {
        std::cout << r.name;
        for (std::size_t i = r.name.size(); i < 20; ++i) std::cout << ' ';
        std::cout << (r.pass ? "PASS" : "FAIL") << "  (" << r.checked << " checked)";
        if (!r.detail.empty()) std::cout << "  " << r.detail;
        std::cout << '\n';
        all_pass = all_pass && r.pass;
    }
    return all_pass ? 0 : 3;
}

}  // namespace

int cli_main(const std::vector<std::string>& args) {
    CLI::App app{"hybrid-automaton platoon simulator with variance-driven headway adaptation"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir;
    std::string vdt_flag;
    double dt_value = 0.0;
    std::uint64_t seed_value = 0;
    long samples = 1000000;
    bool corrupt = false;

    CLI::App* simulate = app.add_subcommand("simulate", "run one scenario and export traces");
    simulate->add_option("--scenario", scenario_path, "scenario file")->required();
    simulate->add_option("--out", out_dir, "output directory")->required();
    simulate->add_option("--vdt", vdt_flag, "override adaptation: on|off")
        ->check(CLI::IsMember({"on", "off"}));
    auto* sim_dt = simulate->add_option("--dt", dt_value, "override the step size [s]");
    auto* sim_seed = simulate->add_option("--seed", seed_value, "override the channel seed");

    CLI::App* compare = app.add_subcommand("compare", "run with and without adaptation");
    compare->add_option("--scenario", scenario_path, "scenario file")->required();
    compare->add_option("--out", out_dir, "output directory")->required();
    auto* cmp_dt = compare->add_option("--dt", dt_value, "override the step size [s]");
    auto* cmp_seed = compare->add_option("--seed", seed_value, "override the channel seed");

    CLI::App* check = app.add_subcommand("check", "run the sampling-based property suites");
    check->add_option("--samples", samples, "sample count for the heavy suites");
    check->add_option("--seed", seed_value, "sampling seed");
    check->add_flag("--corrupt-params", corrupt,
                    "invert the headway coefficients to demonstrate failure detection");

    std::vector<const char*> argv;
    argv.push_back("mesoacc");
    for (const std::string& a : args) argv.push_back(a.c_str());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (simulate->parsed()) {
            return cmd_simulate(scenario_path, out_dir, vdt_flag,
                                *sim_dt ? std::optional<double>(dt_value) : std::nullopt,
                                *sim_seed ? std::optional<std::uint64_t>(seed_value)
                                          : std::nullopt);
        }
        if (compare->parsed()) {
            return cmd_compare(scenario_path, out_dir,
                               *cmp_dt ? std::optional<double>(dt_value) : std::nullopt,
                               *cmp_seed ? std::optional<std::uint64_t>(seed_value)
                                         : std::nullopt);
        }
        if (check->parsed()) {
            return cmd_check(samples, seed_value, corrupt);
        }
    } catch (const ScenarioError& e) {
        std::cerr << "scenario error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace mesoacc
