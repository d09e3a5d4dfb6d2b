#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "phform/controllers.hpp"
#include "phform/dynamics.hpp"
#include "phform/graph.hpp"
#include "phform/integrator.hpp"

namespace phform {

// Load or validation failure. `field()` is the dotted config key at fault.
class ScenarioError : public std::invalid_argument {
public:
    ScenarioError(std::string field, const std::string& message);
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

struct MetricSettings {
    double edge_error_tol = 1e-2;      // |e_k| bound for convergence (m^2)
    double momentum_error_tol = 1e-3;  // |p_i - m_i v1*| bound for convergence
    double energy_tol = 1e-8;          // allowed per-step rise of H^F
};

struct SweepSettings {
    std::size_t trials = 20;
    Eigen::VectorXd box_min;  // sampling box for initial positions
    Eigen::VectorXd box_max;
    double margin = 0.2;  // sampled pairwise distances exceed d_s + margin
};

struct Scenario {
    std::string name;
    std::size_t agents = 0;
    Eigen::Index dimension = 2;
    std::vector<AgentParams> agent_params;
    FormationGraph graph;
    std::vector<EdgeGains> edge_gains;
    std::vector<EdgeGains> baseline_gains;
    SafetyParams safety;
    VelocityTrackingGains velocity_gains;
    Eigen::MatrixXd initial_q;  // agents x dimension
    Eigen::MatrixXd initial_p;
    ControllerKind controller = ControllerKind::proposed;
    IntegratorConfig integrator;
    MetricSettings metrics;
    SweepSettings sweep;
    std::uint64_t seed = 0;
    std::vector<std::string> warnings;

    SystemState initial_state() const;
    ControlLaw control_law() const;

    // Throws ScenarioError for the first violated invariant. Safe initial
    // distances are only required for the proposed law.
    void validate() const;

    // Copy with a different controller, revalidated.
    Scenario with_controller(ControllerKind kind) const;
};

Scenario load_scenario(std::string_view text);
Scenario load_scenario_file(const std::filesystem::path& path);

// Resolves an existing file, otherwise a bundled scenario name such as
// "triangle". Throws ScenarioError naming the path when neither exists.
Scenario resolve_scenario(const std::string& path_or_name);

// Bundled scenario sources, identical to the files under configs/.
std::optional<std::string_view> bundled_scenario_text(std::string_view name);
std::vector<std::string_view> bundled_scenario_names();

// The three-agent triangle reproduction ("triangle").
Scenario golden_scenario();

}  // namespace phform
