#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "phform/scenario.hpp"
#include "phform/trajectory.hpp"

namespace phform {

struct RunReport {
    ControllerKind controller = ControllerKind::proposed;
    bool converged = false;
    std::vector<double> final_edge_errors;
    double max_momentum_error_final = 0.0;
    double min_distance_overall = std::numeric_limits<double>::infinity();
    double min_distance_time = 0.0;
    bool collision = false;  // min_distance_overall < d_s
    double first_collision_time = std::numeric_limits<double>::quiet_NaN();
    std::size_t energy_monotone_violations = 0;
    double worst_energy_increase = 0.0;
    double final_hamiltonian = 0.0;
    std::size_t samples_checked = 0;  // states the minimum distance and energy checks saw
};

struct RunResult {
    TrajectoryLog log;
    RunReport report;
};

struct EnergyDecayCheck {
    std::size_t violations = 0;
    double worst_increase = 0.0;  // largest H^F(t_{m+1}) - H^F(t_m), may be negative
};

// Counts consecutive-sample rises of H^F above `tolerance`.
EnergyDecayCheck verify_energy_decay(std::span<const double> hamiltonian, double tolerance);
EnergyDecayCheck verify_energy_decay(const TrajectoryLog& log, double tolerance);

// Metrics from the logged samples alone.
RunReport compute_metrics(const TrajectoryLog& log, const Scenario& scenario);

// Integrates the scenario with its configured controller. Minimum distance,
// collision time and the energy-decay count are evaluated on every
// integration step, not only on logged samples. Integrator aborts propagate.
RunResult run(const Scenario& scenario);

struct SweepTrial {
    std::size_t index = 0;
    Eigen::MatrixXd initial_q;
    bool aborted = false;
    std::string error;
    RunReport report;
};

struct SweepReport {
    std::size_t trials = 0;
    std::size_t collisions = 0;
    std::size_t converged = 0;
    std::size_t aborted = 0;
    double min_distance = std::numeric_limits<double>::infinity();
    std::vector<SweepTrial> results;
};

// Samples an agents x dimension position matrix uniformly in the box with
// every pairwise distance above d_s + margin. Throws std::runtime_error
// after 10^4 rejected draws.
Eigen::MatrixXd sample_safe_positions(const Scenario& scenario, std::uint64_t seed, std::size_t trial);

// Runs the proposed law from `trials` safe random starts. Trial i draws from
// a generator seeded by (seed, i), so results do not depend on thread count.
// With sample = false every trial uses the template's initial positions.
SweepReport randomized_safety_sweep(const Scenario& scenario, std::size_t trials, std::uint64_t seed,
                                    bool sample = true);

}  // namespace phform
