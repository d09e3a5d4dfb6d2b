#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "phform/controllers.hpp"
#include "phform/dynamics.hpp"

namespace phform {

struct Energies {
    double velocity = 0.0;   // H^v
    double formation = 0.0;  // H^f (quadratic spring energy for the baseline law)
    double total = 0.0;      // H^F
};

// Sampled closed-loop trajectory. Every series has one entry per sample.
struct TrajectoryLog {
    std::vector<double> times;
    std::vector<SystemState> states;
    std::vector<Eigen::MatrixXd> inputs;
    std::vector<std::vector<double>> edge_errors;     // e_k
    std::vector<std::vector<double>> edge_distances;  // |q_E_k|
    std::vector<Energies> energies;
    std::vector<std::vector<double>> momentum_errors;  // |p_i - m_i v1*|

    std::size_t size() const { return times.size(); }
    bool empty() const { return times.empty(); }

    // Evaluates every logged quantity for `state` under `law` and appends it.
    void record(const SystemState& state, const ControlLaw& law);
};

Energies evaluate_energies(const SystemState& state, const ControlLaw& law);

}  // namespace phform
