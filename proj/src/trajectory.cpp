#include "phform/trajectory.hpp"

#include <cmath>
#include <limits>

namespace phform {

Energies evaluate_energies(const SystemState& state, const ControlLaw& law) {
    Energies en;
    en.velocity = law.velocity_energy(state);
    en.formation = law.formation_energy(state);
    en.total = en.velocity + en.formation;
    return en;
}

void TrajectoryLog::record(const SystemState& state, const ControlLaw& law) {
    const FormationGraph& graph = law.graph();
    const auto& gains = law.edge_gains();

    std::vector<double> e(graph.edge_count());
    std::vector<double> d(graph.edge_count());
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
        const Edge& edge = graph.edges()[k];
        const double dist2 = (state.q.row(static_cast<Eigen::Index>(edge.tail)) -
                              state.q.row(static_cast<Eigen::Index>(edge.head)))
                                 .squaredNorm();
        e[k] = dist2 - gains[k].desired_distance * gains[k].desired_distance;
        d[k] = std::sqrt(dist2);
    }

    std::vector<double> pbar(state.agents());
    for (std::size_t i = 0; i < state.agents(); ++i) {
        const double m = law.params()[i].mass;
        pbar[i] = (state.p.row(static_cast<Eigen::Index>(i)).transpose() - m * law.velocity_gains().desired_velocity)
                      .norm();
    }

    Eigen::MatrixXd u;
    try {
        u = law.input(state);
    } catch (const BarrierViolation&) {
        u = Eigen::MatrixXd::Constant(state.p.rows(), state.p.cols(), std::numeric_limits<double>::quiet_NaN());
    }

    times.push_back(state.t);
    states.push_back(state);
    inputs.push_back(std::move(u));
    edge_errors.push_back(std::move(e));
    edge_distances.push_back(std::move(d));
    energies.push_back(evaluate_energies(state, law));
    momentum_errors.push_back(std::move(pbar));
}

}  // namespace phform
