#include "phform/sim.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

namespace phform {

EnergyDecayCheck verify_energy_decay(std::span<const double> hamiltonian, double tolerance) {
    EnergyDecayCheck check;
    check.worst_increase = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 1; m < hamiltonian.size(); ++m) {
        const double rise = hamiltonian[m] - hamiltonian[m - 1];
        check.worst_increase = std::max(check.worst_increase, rise);
        if (rise > tolerance || std::isnan(rise)) ++check.violations;
    }
    if (hamiltonian.size() < 2) check.worst_increase = 0.0;
    return check;
}

EnergyDecayCheck verify_energy_decay(const TrajectoryLog& log, double tolerance) {
    std::vector<double> h;
    h.reserve(log.size());
    for (const auto& en : log.energies) h.push_back(en.total);
    return verify_energy_decay(h, tolerance);
}

RunReport compute_metrics(const TrajectoryLog& log, const Scenario& scenario) {
    RunReport r;
    r.controller = scenario.controller;
    if (log.empty()) return r;

    for (std::size_t s = 0; s < log.size(); ++s) {
        const double d = min_pairwise_distance(log.states[s].q);
        if (d < r.min_distance_overall) {
            r.min_distance_overall = d;
            r.min_distance_time = log.times[s];
        }
        if (d < scenario.safety.min_distance && std::isnan(r.first_collision_time))
            r.first_collision_time = log.times[s];
    }
    r.collision = r.min_distance_overall < scenario.safety.min_distance;

    r.final_edge_errors = log.edge_errors.back();
    const auto& pbar = log.momentum_errors.back();
    r.max_momentum_error_final = pbar.empty() ? 0.0 : *std::max_element(pbar.begin(), pbar.end());
    bool edges_ok = std::all_of(r.final_edge_errors.begin(), r.final_edge_errors.end(),
                                [&](double e) { return std::abs(e) < scenario.metrics.edge_error_tol; });
    r.converged = edges_ok && r.max_momentum_error_final < scenario.metrics.momentum_error_tol;

    const EnergyDecayCheck decay = verify_energy_decay(log, scenario.metrics.energy_tol);
    r.energy_monotone_violations = decay.violations;
    r.worst_energy_increase = decay.worst_increase;
    r.final_hamiltonian = log.energies.back().total;
    r.samples_checked = log.size();
    return r;
}

RunResult run(const Scenario& scenario) {
    const ControlLaw law = scenario.control_law();

    double min_d = std::numeric_limits<double>::infinity();
    double min_t = 0.0;
    double first_collision = std::numeric_limits<double>::quiet_NaN();
    std::size_t samples = 0;
    std::vector<double> hamiltonian;
    hamiltonian.reserve(scenario.integrator.step_count() + 1);

    auto observer = [&](const SystemState& s) {
        ++samples;
        const double d = min_pairwise_distance(s.q);
        if (d < min_d) {
            min_d = d;
            min_t = s.t;
        }
        if (d < scenario.safety.min_distance && std::isnan(first_collision)) first_collision = s.t;
        hamiltonian.push_back(evaluate_energies(s, law).total);
    };

    RunResult result;
    result.log = integrate(scenario.initial_state(), law, scenario.integrator, observer);
    result.report = compute_metrics(result.log, scenario);

    RunReport& r = result.report;
    r.min_distance_overall = min_d;
    r.min_distance_time = min_t;
    r.first_collision_time = first_collision;
    r.collision = min_d < scenario.safety.min_distance;
    const EnergyDecayCheck decay = verify_energy_decay(hamiltonian, scenario.metrics.energy_tol);
    r.energy_monotone_violations = decay.violations;
    r.worst_energy_increase = decay.worst_increase;
    r.samples_checked = samples;
    return result;
}

Eigen::MatrixXd sample_safe_positions(const Scenario& scenario, std::uint64_t seed, std::size_t trial) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::mt19937_64 rng(seq);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const auto agents = static_cast<Eigen::Index>(scenario.agents);
    const Eigen::Index n = scenario.dimension;
    const Eigen::VectorXd lo = scenario.sweep.box_min;
    const Eigen::VectorXd span = scenario.sweep.box_max - scenario.sweep.box_min;
    const double clearance = scenario.safety.min_distance + scenario.sweep.margin;

    Eigen::MatrixXd q(agents, n);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        for (Eigen::Index i = 0; i < agents; ++i)
            for (Eigen::Index c = 0; c < n; ++c) q(i, c) = lo(c) + span(c) * unit(rng);
        if (min_pairwise_distance(q) > clearance) return q;
    }
    throw std::runtime_error("could not sample safe initial positions after 10000 draws; enlarge the sweep box");
}

SweepReport randomized_safety_sweep(const Scenario& scenario, std::size_t trials, std::uint64_t seed, bool sample) {
    if (trials < 1) throw std::invalid_argument("sweep needs at least one trial");
    Scenario base = scenario.with_controller(ControllerKind::proposed);

    std::vector<Eigen::MatrixXd> starts(trials);
    for (std::size_t i = 0; i < trials; ++i)
        starts[i] = sample ? sample_safe_positions(base, seed, i) : base.initial_q;

    SweepReport report;
    report.trials = trials;
    report.results.resize(trials);
    const auto count = static_cast<std::ptrdiff_t>(trials);

#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < count; ++i) {
        const auto iu = static_cast<std::size_t>(i);
        SweepTrial& trial = report.results[iu];
        trial.index = iu;
        trial.initial_q = starts[iu];
        Scenario s = base;
        s.initial_q = starts[iu];
        try {
            s.validate();
            trial.report = run(s).report;
        } catch (const std::exception& e) {
            trial.aborted = true;
            trial.error = e.what();
        }
    }

    for (const auto& t : report.results) {
        if (t.aborted) {
            ++report.aborted;
            continue;
        }
        report.collisions += t.report.collision ? 1 : 0;
        report.converged += t.report.converged ? 1 : 0;
        report.min_distance = std::min(report.min_distance, t.report.min_distance_overall);
    }
    return report;
}

}  // namespace phform
