#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace phform {

// Point-mass agent with inertia m*I and viscous friction D.
struct AgentParams {
    double mass = 1.0;
    Eigen::MatrixXd dissipation;  // n x n, symmetric positive semi-definite

    // Throws std::invalid_argument naming the violated property.
    void validate(Eigen::Index dimension, double tolerance = 1e-12) const;
};

struct AgentState {
    Eigen::VectorXd q;
    Eigen::VectorXd p;
};

// Stacked state of N agents: row i of q and p belongs to agent i.
struct SystemState {
    Eigen::MatrixXd q;
    Eigen::MatrixXd p;
    double t = 0.0;

    std::size_t agents() const { return static_cast<std::size_t>(q.rows()); }
    Eigen::Index dimension() const { return q.cols(); }
    AgentState agent(std::size_t i) const;
    bool finite() const { return q.allFinite() && p.allFinite(); }
};

// Time derivative of a SystemState.
struct StateRate {
    Eigen::MatrixXd dq;
    Eigen::MatrixXd dp;
};

// True iff the symmetric matrix has no eigenvalue below -tolerance and is
// symmetric to the same tolerance.
bool is_symmetric_psd(const Eigen::MatrixXd& m, double tolerance = 1e-12);

// H_i = p^T p / (2 m).
double agent_hamiltonian(const Eigen::VectorXd& p, const AgentParams& params);

// dH_i/dp = p / m; also the passive output y_i and the velocity.
Eigen::VectorXd momentum_gradient(const Eigen::VectorXd& p, const AgentParams& params);

// Sum of agent kinetic energies.
double total_kinetic_energy(const SystemState& state, const std::vector<AgentParams>& params);

// Open-loop port-Hamiltonian vector field:
//   dq_i/dt = p_i/m_i,   dp_i/dt = -D_i p_i/m_i + u_i.
// The Hamiltonian has no position dependence so its q-gradient is zero.
// u has the same N x n layout as the state. Throws std::invalid_argument on
// dimension mismatch.
StateRate open_loop_vector_field(const SystemState& state, const std::vector<AgentParams>& params,
                                 const Eigen::MatrixXd& u);

}  // namespace phform
