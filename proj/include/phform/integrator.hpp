#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>

#include <Eigen/Dense>

#include "phform/controllers.hpp"
#include "phform/dynamics.hpp"
#include "phform/trajectory.hpp"

namespace phform {

struct IntegratorConfig {
    double dt = 1e-3;
    double t_end = 100.0;
    double guard_margin = 1e-6;  // smallest barrier argument a_k accepted at any stage (m^2)
    int max_halvings = 30;
    std::size_t log_stride = 0;  // 0: every step when t_end <= 10 s, else every 10th

    std::size_t effective_log_stride() const;
    std::size_t step_count() const;
    void validate() const;
};

// Aborted run: the guard could not find an admissible step.
class SimulationAbort : public std::runtime_error {
public:
    SimulationAbort(std::size_t edge, double time, double barrier_argument);
    std::size_t edge() const { return edge_; }
    double time() const { return time_; }

private:
    std::size_t edge_;
    double time_;
};

using VectorField = std::function<Eigen::VectorXd(double, const Eigen::VectorXd&)>;

// Classical four-stage Runge-Kutta step. Exceptions thrown by the field
// propagate unchanged.
Eigen::VectorXd rk4_step(const VectorField& field, double t, const Eigen::VectorXd& x, double dt);

// Row-major packing [q; p] of a SystemState.
Eigen::VectorXd pack_state(const SystemState& state);
SystemState unpack_state(const Eigen::VectorXd& x, std::size_t agents, Eigen::Index dimension, double t);

// Closed-loop vector field of the open-loop dynamics driven by `law`.
VectorField closed_loop_field(const ControlLaw& law, std::size_t agents, Eigen::Index dimension);

// Invoked on every accepted step on the base time grid, starting with the
// initial state.
using StepObserver = std::function<void(const SystemState&)>;

// Fixed-step RK4 from initial.t to t_end. For barrier laws every stage
// state and every step result, and the straight segment reaching it from the
// step's start, must keep all a_k >= guard_margin, otherwise
// the step is retried with half the step size; after a success the step
// size doubles back toward dt. Samples land on the base grid.
// Throws SimulationAbort after max_halvings consecutive halvings.
TrajectoryLog integrate(const SystemState& initial, const ControlLaw& law, const IntegratorConfig& config,
                        const StepObserver& observer = {});

}  // namespace phform
