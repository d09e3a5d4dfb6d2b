#include "phform/dynamics.hpp"

#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace phform {

void AgentParams::validate(Eigen::Index dimension, double tolerance) const {
    if (!(mass > 0.0)) throw std::invalid_argument("mass must be positive");
    if (dissipation.rows() != dimension || dissipation.cols() != dimension)
        throw std::invalid_argument("dissipation must be " + std::to_string(dimension) + "x" +
                                    std::to_string(dimension));
    if (!is_symmetric_psd(dissipation, tolerance))
        throw std::invalid_argument("dissipation must be symmetric positive semi-definite");
}

AgentState SystemState::agent(std::size_t i) const {
    const auto r = static_cast<Eigen::Index>(i);
    return {q.row(r).transpose(), p.row(r).transpose()};
}

bool is_symmetric_psd(const Eigen::MatrixXd& m, double tolerance) {
    if (m.rows() != m.cols() || !m.allFinite()) return false;
    if (m.size() == 0) return true;
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > tolerance) return false;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m, Eigen::EigenvaluesOnly);
    return eig.eigenvalues().minCoeff() >= -tolerance;
}

double agent_hamiltonian(const Eigen::VectorXd& p, const AgentParams& params) {
    return 0.5 * p.squaredNorm() / params.mass;
}

Eigen::VectorXd momentum_gradient(const Eigen::VectorXd& p, const AgentParams& params) {
    return p / params.mass;
}

double total_kinetic_energy(const SystemState& state, const std::vector<AgentParams>& params) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < state.p.rows(); ++i)
        h += 0.5 * state.p.row(i).squaredNorm() / params[static_cast<std::size_t>(i)].mass;
    return h;
}

StateRate open_loop_vector_field(const SystemState& state, const std::vector<AgentParams>& params,
                                 const Eigen::MatrixXd& u) {
    const Eigen::Index n = state.dimension();
    const Eigen::Index agents = state.q.rows();
    if (state.p.rows() != agents || state.p.cols() != n)
        throw std::invalid_argument("position and momentum shapes differ");
    if (static_cast<Eigen::Index>(params.size()) != agents)
        throw std::invalid_argument("agent parameter count does not match state");
    if (u.rows() != agents || u.cols() != n)
        throw std::invalid_argument("input shape does not match state");

    StateRate rate{Eigen::MatrixXd(agents, n), Eigen::MatrixXd(agents, n)};
    for (Eigen::Index i = 0; i < agents; ++i) {
        const AgentParams& a = params[static_cast<std::size_t>(i)];
        if (a.dissipation.rows() != n || a.dissipation.cols() != n)
            throw std::invalid_argument("dissipation shape does not match state dimension");
        const Eigen::RowVectorXd velocity = state.p.row(i) / a.mass;
        rate.dq.row(i) = velocity;
        rate.dp.row(i) = -(a.dissipation * velocity.transpose()).transpose() + u.row(i);
    }
    return rate;
}

}  // namespace phform
