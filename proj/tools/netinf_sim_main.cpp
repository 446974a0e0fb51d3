#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "netinf/errors.hpp"
#include "netinf/metrics.hpp"
#include "netinf/scenario.hpp"
#include "netinf/simulation.hpp"
#include "netinf/trace.hpp"

namespace {

namespace fs = std::filesystem;

int cmd_run(const std::string& scenario_path, std::optional<std::uint64_t> seed,
            const std::string& out_dir) {
    netinf::Scenario sc = netinf::load_scenario(scenario_path);
    netinf::RunResult result = netinf::run_scenario(sc, seed);

    fs::create_directories(out_dir);
    fs::path trace_path = fs::path(out_dir) / "trace.csv";
    fs::path metrics_path = fs::path(out_dir) / "metrics.json";

    std::ofstream trace_out(trace_path);
    if (!trace_out) throw netinf::SimError("cannot write " + trace_path.string());
    netinf::write_trace_csv(result.trace, trace_out);
    trace_out.close();

    std::ofstream metrics_out(metrics_path);
    if (!metrics_out) throw netinf::SimError("cannot write " + metrics_path.string());
    metrics_out << netinf::metrics_to_json(result.metrics);
    metrics_out.close();

    std::cout << "scenario: " << (sc.name.empty() ? scenario_path : sc.name) << "\n"
              << "events processed: " << result.processed_events << "\n"
              << "trace rows: " << result.metrics.trace_rows << "\n"
              << "trace: " << trace_path.string() << "\n"
              << "metrics: " << metrics_path.string() << "\n";
    for (const auto& [sid, sm] : result.metrics.sessions) {
        std::cout << "session " << sid << ": sent=" << sm.sent << " delivered=" << sm.delivered
                  << " lost=" << sm.lost << " expired=" << sm.expired
                  << " in_flight=" << sm.in_flight << " max_gap_s=" << sm.max_gap_s
                  << " interruption_s=" << sm.interruption_time_s << "\n";
    }
    return 0;
}

int cmd_validate(const std::string& scenario_path) {
    netinf::Scenario sc = netinf::load_scenario(scenario_path);
    std::cout << "scenario OK: " << (sc.name.empty() ? scenario_path : sc.name) << " ("
              << sc.cells.size() << " cells, " << sc.nodes.size() << " nodes, "
              << sc.sessions.size() << " sessions, duration " << sc.duration_s << " s)\n";
    return 0;
}

int cmd_metrics(const std::string& trace_path) {
    std::ifstream in(trace_path);
    if (!in) throw netinf::SimError("cannot open trace file: " + trace_path);
    netinf::Trace trace = netinf::read_trace_csv(in);
    netinf::Metrics metrics = netinf::compute_metrics(trace);
    std::cout << netinf::metrics_to_json(metrics);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"netinf-sim: discrete-event simulator for ICN mobile-node handover"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::string trace_path;
    std::optional<std::uint64_t> seed;

    auto* run = app.add_subcommand("run", "run a scenario, writing trace.csv and metrics.json");
    run->add_option("--scenario", scenario_path, "scenario JSON file")->required();
    std::uint64_t seed_value = 0;
    auto* seed_opt = run->add_option("--seed", seed_value, "master seed override");
    run->add_option("--out", out_dir, "output directory (default: out)");

    auto* validate = app.add_subcommand("validate", "parse and validate a scenario file");
    validate->add_option("--scenario", scenario_path, "scenario JSON file")->required();

    auto* metrics = app.add_subcommand("metrics", "recompute metrics from a trace CSV");
    metrics->add_option("--trace", trace_path, "trace.csv produced by run")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            if (*seed_opt) seed = seed_value;
            return cmd_run(scenario_path, seed, out_dir);
        }
        if (validate->parsed()) return cmd_validate(scenario_path);
        if (metrics->parsed()) return cmd_metrics(trace_path);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
