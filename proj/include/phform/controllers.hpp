#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "phform/dynamics.hpp"
#include "phform/graph.hpp"

namespace phform {

struct VelocityTrackingGains {
    Eigen::VectorXd desired_velocity;       // v1*, common to all agents
    std::vector<Eigen::MatrixXd> damping;   // Dv_i, one symmetric PSD matrix per agent
};

struct EdgeGains {
    double alpha = 5.0;             // potential weight, > 0
    double desired_distance = 1.0;  // d*_k, > d_s
    double damping = 1.0;           // Dc_k, > 0 for the proposed law
};

struct SafetyParams {
    double min_distance = 1.0;  // d_s
};

// Squared-distance error of one edge.
//   e = |q_E|^2 - d*^2     (zero at the target distance)
//   a = |q_E|^2 - d_s^2    (barrier argument, positive on the safe set)
//   c = d*^2 - d_s^2       (value of a at the target)
struct EdgeError {
    double e = 0.0;
    double a = 0.0;
    double c = 0.0;
};

// Raised when the barrier is evaluated at or beyond the safety distance.
class BarrierViolation : public std::domain_error {
public:
    BarrierViolation(std::size_t edge, double barrier_argument);
    std::size_t edge() const { return edge_; }
    double barrier_argument() const { return a_; }

private:
    std::size_t edge_;
    double a_;
};

enum class ControllerKind { proposed, baseline, velocity_only, none };

std::string_view to_string(ControllerKind kind);
std::optional<ControllerKind> parse_controller_kind(std::string_view name);

// Velocity tracking with friction compensation and damping injection:
//   u_i = D_i v1* - Dv_i M_i^-2 (p_i - M_i v1*).
Eigen::VectorXd velocity_tracking_input(const Eigen::VectorXd& p, const AgentParams& params,
                                        const Eigen::VectorXd& desired_velocity,
                                        const Eigen::MatrixXd& damping);

Eigen::MatrixXd velocity_tracking_input(const SystemState& state, const std::vector<AgentParams>& params,
                                        const VelocityTrackingGains& gains);

EdgeError edge_error(const Eigen::VectorXd& q_tail, const Eigen::VectorXd& q_head, double desired_distance,
                     double min_distance);

// Attraction-only barrier H = (alpha/4) (1/a - 1/c)^2. Zero at e = 0 and
// unbounded as a -> 0+. Throws BarrierViolation for a <= 0.
double barrier_potential(const EdgeError& err, const EdgeGains& gains);

// dH/de = -(alpha/2) (1/a - 1/c) / a^2; sign(dH/de) = sign(e).
double barrier_gradient(const EdgeError& err, const EdgeGains& gains);

// Quadratic spring (alpha/4) e^2 used by the baseline law; no singularity.
double quadratic_potential(const EdgeError& err, const EdgeGains& gains);
double quadratic_gradient(const EdgeError& err, const EdgeGains& gains);

// Exact time derivative of e: 2 q_E^T (v_tail - v_head).
double edge_error_rate(const Eigen::VectorXd& q_tail, const Eigen::VectorXd& q_head,
                       const Eigen::VectorXd& v_tail, const Eigen::VectorXd& v_head);

// Spring-damper edge coupling of the proposed law. Each edge contributes
// -q_E xi to its tail and +q_E xi to its head, with
// xi = dH/de + Dc * de/dt. Throws BarrierViolation (naming the lowest edge
// index) if any a_k <= 0.
Eigen::MatrixXd formation_input(const SystemState& state, const std::vector<AgentParams>& params,
                                const FormationGraph& graph, const std::vector<EdgeGains>& gains,
                                const SafetyParams& safety);

// Same coupling with the quadratic spring in place of the barrier.
Eigen::MatrixXd baseline_quadratic_input(const SystemState& state, const std::vector<AgentParams>& params,
                                         const FormationGraph& graph, const std::vector<EdgeGains>& gains,
                                         const SafetyParams& safety);

// u^f = u^v + u^c.
Eigen::MatrixXd combined_input(const SystemState& state, const std::vector<AgentParams>& params,
                               const FormationGraph& graph, const VelocityTrackingGains& velocity_gains,
                               const std::vector<EdgeGains>& edge_gains, const SafetyParams& safety);

// H^v = 1/2 sum_i |M_i^-1 p_i - v1*|^2.
double velocity_error_energy(const SystemState& state, const std::vector<AgentParams>& params,
                             const VelocityTrackingGains& gains);

// H^f = sum_k barrier_potential(e_k). Throws BarrierViolation off the safe set.
double formation_energy(const SystemState& state, const FormationGraph& graph,
                        const std::vector<EdgeGains>& gains, const SafetyParams& safety);

// Sum of quadratic spring potentials.
double baseline_energy(const SystemState& state, const FormationGraph& graph,
                       const std::vector<EdgeGains>& gains, const SafetyParams& safety);

// H^F = H^v + H^f.
double closed_loop_hamiltonian(const SystemState& state, const std::vector<AgentParams>& params,
                               const FormationGraph& graph, const VelocityTrackingGains& velocity_gains,
                               const std::vector<EdgeGains>& edge_gains, const SafetyParams& safety);

// Smallest barrier argument min_k (|q_E_k|^2 - d_s^2) over all edges.
double min_barrier_argument(const Eigen::MatrixXd& q, const FormationGraph& graph, const SafetyParams& safety);

// Smallest distance between any two agents, whether or not they share an edge.
double min_pairwise_distance(const Eigen::MatrixXd& q);

// Selectable feedback law evaluated on full state.
class ControlLaw {
public:
    ControlLaw(ControllerKind kind, FormationGraph graph, std::vector<AgentParams> params,
               VelocityTrackingGains velocity_gains, std::vector<EdgeGains> edge_gains,
               std::vector<EdgeGains> baseline_gains, SafetyParams safety);

    ControllerKind kind() const { return kind_; }
    bool uses_barrier() const { return kind_ == ControllerKind::proposed; }

    Eigen::MatrixXd input(const SystemState& state) const;

    double velocity_energy(const SystemState& state) const;
    // Barrier energy for every law except the baseline, which reports its
    // quadratic spring energy. Off the safe set the barrier energy is +inf.
    double formation_energy(const SystemState& state) const;

    const FormationGraph& graph() const { return graph_; }
    const std::vector<AgentParams>& params() const { return params_; }
    const VelocityTrackingGains& velocity_gains() const { return velocity_gains_; }
    const std::vector<EdgeGains>& edge_gains() const { return edge_gains_; }
    const SafetyParams& safety() const { return safety_; }

private:
    ControllerKind kind_;
    FormationGraph graph_;
    std::vector<AgentParams> params_;
    VelocityTrackingGains velocity_gains_;
    std::vector<EdgeGains> edge_gains_;
    std::vector<EdgeGains> baseline_gains_;
    SafetyParams safety_;
};

}  // namespace phform
