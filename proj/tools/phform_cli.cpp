// phform: run, compare and verify formation-control scenarios.
//
// Exit codes: 0 success, 1 validation error, 2 simulation abort or runtime
// failure, 3 verification failure (including --fail-on-collision).

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "phform/export.hpp"
#include "phform/graph.hpp"
#include "phform/scenario.hpp"
#include "phform/sim.hpp"
#include "phform/verify.hpp"

namespace fs = std::filesystem;
using namespace phform;

namespace {

enum Exit : int { kOk = 0, kValidation = 1, kRuntime = 2, kVerification = 3 };

struct RunOptions {
    std::string config;
    std::string out = "results";
    std::string format = "csv";
    std::string controller;
    bool fail_on_collision = false;
};

struct CompareOptions {
    std::string config;
    std::string out = "results";
    std::vector<std::string> controllers{"proposed", "baseline"};
};

struct VerifyCliOptions {
    std::string suite = "all";
    std::size_t max_n = 12;
    std::uint64_t seed = 42;
    std::size_t trials = 20;
    std::string out;
};

struct GraphOptions {
    int agents = 0;
    std::string format = "csv";
};

void write_file(const fs::path& path, const std::string& body) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << body;
}

ControllerKind controller_or_throw(const std::string& name) {
    auto kind = parse_controller_kind(name);
    if (!kind) throw ScenarioError("--controller", "expected proposed | baseline | velocity_only | none");
    return *kind;
}

int cmd_run(const RunOptions& o) {
    Scenario s = resolve_scenario(o.config);
    if (!o.controller.empty()) s = s.with_controller(controller_or_throw(o.controller));
    for (const auto& w : s.warnings) std::cerr << "warning: " << w << '\n';

    const RunResult res = run(s);
    fs::create_directories(o.out);
    const fs::path dir(o.out);
    std::vector<fs::path> written;
    if (o.format == "json") {
        written.push_back(dir / "trajectory.json");
        write_file(written.back(), trajectory_json(res.log, s.graph).dump() + "\n");
    } else {
        written.push_back(dir / "trajectory.csv");
        std::ostringstream csv;
        write_trajectory_csv(csv, res.log, s.graph.edge_count());
        write_file(written.back(), csv.str());
    }
    const std::string text = report_text(res.report, s);
    written.push_back(dir / "report.txt");
    write_file(written.back(), text);
    written.push_back(dir / "report.json");
    nlohmann::json rj = report_json(res.report);
    rj["scenario"] = s.name;
    write_file(written.back(), rj.dump(2) + "\n");

    std::cout << text;
    for (const auto& p : written) std::cout << "wrote " << p.string() << '\n';
    if (o.fail_on_collision && res.report.collision) {
        std::cerr << "collision detected (min distance " << res.report.min_distance_overall << " m)\n";
        return kVerification;
    }
    return kOk;
}

int cmd_compare(const CompareOptions& o) {
    const Scenario base = resolve_scenario(o.config);
    if (o.controllers.size() < 2) throw ScenarioError("--controllers", "need at least two controllers");

    nlohmann::json rows = nlohmann::json::array();
    std::ostringstream table;
    table << std::left << std::setw(14) << "controller" << std::setw(14) << "min_dist" << std::setw(14)
          << "collision_t" << std::setw(11) << "collision" << std::setw(11) << "converged" << std::setw(14)
          << "final_HF" << "final_e\n";
    std::ostringstream csv;
    csv << std::setprecision(17) << "controller,min_distance,min_distance_time,collision,first_collision_time,converged,final_hamiltonian";
    for (std::size_t k = 1; k <= base.graph.edge_count(); ++k) csv << ",e_" << k;
    csv << '\n';

    for (const auto& name : o.controllers) {
        const Scenario s = base.with_controller(controller_or_throw(name));
        const RunReport r = run(s).report;
        rows.push_back(report_json(r));

        table << std::left << std::setprecision(6) << std::setw(14) << name << std::setw(14) << r.min_distance_overall
              << std::setw(14) << (r.collision ? std::to_string(r.first_collision_time) : std::string("-"))
              << std::setw(11) << (r.collision ? "yes" : "no") << std::setw(11) << (r.converged ? "yes" : "no")
              << std::setw(14) << r.final_hamiltonian;
        for (double e : r.final_edge_errors) table << ' ' << e;
        table << '\n';

        csv << name << ',' << r.min_distance_overall << ',' << r.min_distance_time << ',' << r.collision << ','
            << r.first_collision_time << ',' << r.converged << ',' << r.final_hamiltonian;
        for (double e : r.final_edge_errors) csv << ',' << e;
        csv << '\n';
    }

    fs::create_directories(o.out);
    const fs::path dir(o.out);
    write_file(dir / "comparison.csv", csv.str());
    write_file(dir / "comparison.json", nlohmann::json{{"scenario", base.name}, {"rows", rows}}.dump(2) + "\n");
    std::cout << table.str();
    std::cout << "wrote " << (dir / "comparison.csv").string() << '\n';
    std::cout << "wrote " << (dir / "comparison.json").string() << '\n';
    return kOk;
}

int cmd_verify(const VerifyCliOptions& o) {
    VerifyOptions vo{o.max_n, o.seed, o.trials};
    std::vector<std::string_view> suites;
    if (o.suite == "all") {
        suites = suite_names();
    } else {
        bool known = false;
        for (auto n : suite_names()) known = known || n == o.suite;
        if (!known) throw ScenarioError("--suite", "unknown suite " + o.suite);
        suites.push_back(o.suite);
    }

    bool all_passed = true;
    nlohmann::json out = nlohmann::json::array();
    for (auto name : suites) {
        const SuiteResult r = run_suite(name, vo);
        all_passed = all_passed && r.passed;
        std::cout << (r.passed ? "PASS " : "FAIL ") << std::left << std::setw(9) << r.name << r.summary << '\n';
        out.push_back({{"suite", r.name}, {"passed", r.passed}, {"summary", r.summary}, {"details", r.details}});
    }
    if (!o.out.empty()) {
        fs::create_directories(o.out);
        write_file(fs::path(o.out) / "verify.json", out.dump(2) + "\n");
    }
    return all_passed ? kOk : kVerification;
}

int cmd_graph(const GraphOptions& o) {
    if (o.agents < 2) throw ScenarioError("--agents", "need at least 2 agents");
    const FormationGraph g = build_tournament_graph(static_cast<std::size_t>(o.agents));
    if (o.format == "json") {
        std::cout << graph_json(g).dump(2) << '\n';
        return kOk;
    }
    std::cout << "# edges:";
    for (std::size_t k = 0; k < g.edge_count(); ++k)
        std::cout << " E" << k + 1 << "=(" << g.edges()[k].tail + 1 << "," << g.edges()[k].head + 1 << ")";
    std::cout << '\n';
    write_graph_csv(std::cout, g);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Distance-based formation control with collision avoidance for port-Hamiltonian agents.\n"
                 "Exit codes: 0 success, 1 validation error, 2 simulation abort, 3 verification failure."};
    app.require_subcommand(1);

    RunOptions run_opts;
    auto* run_cmd = app.add_subcommand("run", "Simulate one scenario and write its trajectory and report");
    run_cmd->add_option("--config", run_opts.config, "Scenario file or bundled name (e.g. triangle)")->required();
    run_cmd->add_option("--out", run_opts.out, "Output directory")->capture_default_str();
    run_cmd->add_option("--format", run_opts.format, "Trajectory format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();
    run_cmd->add_option("--controller", run_opts.controller, "Override the scenario controller")
        ->check(CLI::IsMember({"proposed", "baseline", "velocity_only", "none"}));
    run_cmd->add_flag("--fail-on-collision", run_opts.fail_on_collision, "Exit 3 if any distance drops below d_s");

    CompareOptions cmp_opts;
    auto* cmp_cmd = app.add_subcommand("compare", "Run several controllers from identical initial conditions");
    cmp_cmd->add_option("--config", cmp_opts.config, "Scenario file or bundled name")->required();
    cmp_cmd->add_option("--out", cmp_opts.out, "Output directory")->capture_default_str();
    cmp_cmd->add_option("--controllers", cmp_opts.controllers, "Controllers to compare")
        ->delimiter(',')
        ->capture_default_str();

    VerifyCliOptions ver_opts;
    auto* ver_cmd = app.add_subcommand("verify", "Run the numerical invariant suites");
    std::string suite_help = "all";
    for (auto n : suite_names()) suite_help += "|" + std::string(n);
    ver_cmd->add_option("--suite", ver_opts.suite, suite_help)->capture_default_str();
    ver_cmd->add_option("--max-n", ver_opts.max_n, "Largest tournament for the rank suite")->capture_default_str();
    ver_cmd->add_option("--seed", ver_opts.seed, "Seed for randomized suites")->capture_default_str();
    ver_cmd->add_option("--trials", ver_opts.trials, "Sweep trials per agent count")->capture_default_str();
    ver_cmd->add_option("--out", ver_opts.out, "Directory for verify.json");

    GraphOptions graph_opts;
    auto* graph_cmd = app.add_subcommand("graph", "Print the tournament edge list and incidence matrix");
    graph_cmd->add_option("--agents", graph_opts.agents, "Number of agents")->required();
    graph_cmd->add_option("--format", graph_opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*run_cmd) return cmd_run(run_opts);
        if (*cmp_cmd) return cmd_compare(cmp_opts);
        if (*ver_cmd) return cmd_verify(ver_opts);
        if (*graph_cmd) return cmd_graph(graph_opts);
    } catch (const ScenarioError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidation;
    } catch (const SimulationAbort& e) {
        std::cerr << "simulation aborted: " << e.what() << '\n';
        return kRuntime;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntime;
    }
    return kOk;
}
