#include "phform/controllers.hpp"

#include <cmath>
#include <limits>
#include <utility>

#include "phform/kernels.hpp"

namespace phform {

BarrierViolation::BarrierViolation(std::size_t edge, double barrier_argument)
    : std::domain_error("barrier violated on edge " + std::to_string(edge + 1) +
                        " (|q_E|^2 - d_s^2 = " + std::to_string(barrier_argument) + ")"),
      edge_(edge),
      a_(barrier_argument) {}

std::string_view to_string(ControllerKind kind) {
    switch (kind) {
        case ControllerKind::proposed: return "proposed";
        case ControllerKind::baseline: return "baseline";
        case ControllerKind::velocity_only: return "velocity_only";
        case ControllerKind::none: return "none";
    }
    return "unknown";
}

std::optional<ControllerKind> parse_controller_kind(std::string_view name) {
    if (name == "proposed") return ControllerKind::proposed;
    if (name == "baseline") return ControllerKind::baseline;
    if (name == "velocity_only") return ControllerKind::velocity_only;
    if (name == "none") return ControllerKind::none;
    return std::nullopt;
}

Eigen::VectorXd velocity_tracking_input(const Eigen::VectorXd& p, const AgentParams& params,
                                        const Eigen::VectorXd& desired_velocity,
                                        const Eigen::MatrixXd& damping) {
    const double m = params.mass;
    const Eigen::VectorXd momentum_error = p - m * desired_velocity;
    return params.dissipation * desired_velocity - damping * (momentum_error / (m * m));
}

Eigen::MatrixXd velocity_tracking_input(const SystemState& state, const std::vector<AgentParams>& params,
                                        const VelocityTrackingGains& gains) {
    Eigen::MatrixXd u(state.p.rows(), state.p.cols());
    for (Eigen::Index i = 0; i < state.p.rows(); ++i) {
        const auto iu = static_cast<std::size_t>(i);
        u.row(i) = velocity_tracking_input(state.p.row(i).transpose(), params[iu], gains.desired_velocity,
                                           gains.damping[iu])
                       .transpose();
    }
    return u;
}

EdgeError edge_error(const Eigen::VectorXd& q_tail, const Eigen::VectorXd& q_head, double desired_distance,
                     double min_distance) {
    const double dist2 = (q_tail - q_head).squaredNorm();
    EdgeError err;
    err.e = dist2 - desired_distance * desired_distance;
    err.a = dist2 - min_distance * min_distance;
    err.c = desired_distance * desired_distance - min_distance * min_distance;
    return err;
}

double barrier_potential(const EdgeError& err, const EdgeGains& gains) {
    if (!(err.a > 0.0)) throw BarrierViolation(0, err.a);
    const double s = 1.0 / err.a - 1.0 / err.c;
    return 0.25 * gains.alpha * s * s;
}

double barrier_gradient(const EdgeError& err, const EdgeGains& gains) {
    if (!(err.a > 0.0)) throw BarrierViolation(0, err.a);
    return -0.5 * gains.alpha * (1.0 / err.a - 1.0 / err.c) / (err.a * err.a);
}

double quadratic_potential(const EdgeError& err, const EdgeGains& gains) {
    return 0.25 * gains.alpha * err.e * err.e;
}

double quadratic_gradient(const EdgeError& err, const EdgeGains& gains) { return 0.5 * gains.alpha * err.e; }

double edge_error_rate(const Eigen::VectorXd& q_tail, const Eigen::VectorXd& q_head,
                       const Eigen::VectorXd& v_tail, const Eigen::VectorXd& v_head) {
    return 2.0 * (q_tail - q_head).dot(v_tail - v_head);
}

namespace {

Eigen::MatrixXd velocities(const SystemState& state, const std::vector<AgentParams>& params) {
    if (params.size() != state.agents()) throw std::invalid_argument("agent parameter count does not match state");
    Eigen::MatrixXd v(state.p.rows(), state.p.cols());
    for (Eigen::Index i = 0; i < state.p.rows(); ++i) v.row(i) = state.p.row(i) / params[static_cast<std::size_t>(i)].mass;
    return v;
}

Eigen::MatrixXd edge_coupling(const SystemState& state, const std::vector<AgentParams>& params,
                              const FormationGraph& graph, const std::vector<EdgeGains>& gains,
                              const SafetyParams& safety, kernels::EdgeLaw law) {
    const auto kernel = graph.edge_count() < kernels::kParallelMinEdges ? kernels::edge_coupling_serial
                                                                        : kernels::edge_coupling_parallel;
    return kernel(state.q, velocities(state, params), graph, gains, safety.min_distance, law);
}

}  // namespace

Eigen::MatrixXd formation_input(const SystemState& state, const std::vector<AgentParams>& params,
                                const FormationGraph& graph, const std::vector<EdgeGains>& gains,
                                const SafetyParams& safety) {
    return edge_coupling(state, params, graph, gains, safety, kernels::EdgeLaw::barrier);
}

Eigen::MatrixXd baseline_quadratic_input(const SystemState& state, const std::vector<AgentParams>& params,
                                         const FormationGraph& graph, const std::vector<EdgeGains>& gains,
                                         const SafetyParams& safety) {
    return edge_coupling(state, params, graph, gains, safety, kernels::EdgeLaw::quadratic);
}

Eigen::MatrixXd combined_input(const SystemState& state, const std::vector<AgentParams>& params,
                               const FormationGraph& graph, const VelocityTrackingGains& velocity_gains,
                               const std::vector<EdgeGains>& edge_gains, const SafetyParams& safety) {
    return velocity_tracking_input(state, params, velocity_gains) +
           formation_input(state, params, graph, edge_gains, safety);
}

double velocity_error_energy(const SystemState& state, const std::vector<AgentParams>& params,
                             const VelocityTrackingGains& gains) {
    double h = 0.0;
    for (Eigen::Index i = 0; i < state.p.rows(); ++i) {
        const double m = params[static_cast<std::size_t>(i)].mass;
        h += 0.5 * (state.p.row(i).transpose() / m - gains.desired_velocity).squaredNorm();
    }
    return h;
}

double formation_energy(const SystemState& state, const FormationGraph& graph,
                        const std::vector<EdgeGains>& gains, const SafetyParams& safety) {
    double h = 0.0;
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
        const Edge& edge = graph.edges()[k];
        const EdgeError err = edge_error(state.q.row(static_cast<Eigen::Index>(edge.tail)).transpose(),
                                         state.q.row(static_cast<Eigen::Index>(edge.head)).transpose(),
                                         gains[k].desired_distance, safety.min_distance);
        if (!(err.a > 0.0)) throw BarrierViolation(k, err.a);
        h += barrier_potential(err, gains[k]);
    }
    return h;
}

double baseline_energy(const SystemState& state, const FormationGraph& graph,
                       const std::vector<EdgeGains>& gains, const SafetyParams& safety) {
    double h = 0.0;
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
        const Edge& edge = graph.edges()[k];
        const EdgeError err = edge_error(state.q.row(static_cast<Eigen::Index>(edge.tail)).transpose(),
                                         state.q.row(static_cast<Eigen::Index>(edge.head)).transpose(),
                                         gains[k].desired_distance, safety.min_distance);
        h += quadratic_potential(err, gains[k]);
    }
    return h;
}

double closed_loop_hamiltonian(const SystemState& state, const std::vector<AgentParams>& params,
                               const FormationGraph& graph, const VelocityTrackingGains& velocity_gains,
                               const std::vector<EdgeGains>& edge_gains, const SafetyParams& safety) {
    return velocity_error_energy(state, params, velocity_gains) + formation_energy(state, graph, edge_gains, safety);
}

double min_barrier_argument(const Eigen::MatrixXd& q, const FormationGraph& graph, const SafetyParams& safety) {
    double lowest = std::numeric_limits<double>::infinity();
    const double ds2 = safety.min_distance * safety.min_distance;
    for (const Edge& e : graph.edges()) {
        const double a = (q.row(static_cast<Eigen::Index>(e.tail)) - q.row(static_cast<Eigen::Index>(e.head))).squaredNorm() - ds2;
        lowest = std::min(lowest, a);
    }
    return lowest;
}

double min_pairwise_distance(const Eigen::MatrixXd& q) {
    double lowest = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < q.rows(); ++i)
        for (Eigen::Index j = i + 1; j < q.rows(); ++j) lowest = std::min(lowest, (q.row(i) - q.row(j)).norm());
    return lowest;
}

ControlLaw::ControlLaw(ControllerKind kind, FormationGraph graph, std::vector<AgentParams> params,
                       VelocityTrackingGains velocity_gains, std::vector<EdgeGains> edge_gains,
                       std::vector<EdgeGains> baseline_gains, SafetyParams safety)
    : kind_(kind),
      graph_(std::move(graph)),
      params_(std::move(params)),
      velocity_gains_(std::move(velocity_gains)),
      edge_gains_(std::move(edge_gains)),
      baseline_gains_(std::move(baseline_gains)),
      safety_(safety) {
    if (params_.size() != graph_.nodes()) throw std::invalid_argument("agent parameter count does not match graph");
    if (edge_gains_.size() != graph_.edge_count()) throw std::invalid_argument("need one EdgeGains per edge");
    if (kind_ == ControllerKind::baseline && baseline_gains_.size() != graph_.edge_count())
        throw std::invalid_argument("need one baseline EdgeGains per edge");
    if (velocity_gains_.damping.size() != params_.size())
        throw std::invalid_argument("need one velocity damping matrix per agent");
}

Eigen::MatrixXd ControlLaw::input(const SystemState& state) const {
    switch (kind_) {
        case ControllerKind::proposed:
            return combined_input(state, params_, graph_, velocity_gains_, edge_gains_, safety_);
        case ControllerKind::baseline:
            return velocity_tracking_input(state, params_, velocity_gains_) +
                   baseline_quadratic_input(state, params_, graph_, baseline_gains_, safety_);
        case ControllerKind::velocity_only:
            return velocity_tracking_input(state, params_, velocity_gains_);
        case ControllerKind::none:
            break;
    }
    return Eigen::MatrixXd::Zero(state.p.rows(), state.p.cols());
}

double ControlLaw::velocity_energy(const SystemState& state) const {
    return velocity_error_energy(state, params_, velocity_gains_);
}

double ControlLaw::formation_energy(const SystemState& state) const {
    if (kind_ == ControllerKind::baseline) return baseline_energy(state, graph_, baseline_gains_, safety_);
    if (!(min_barrier_argument(state.q, graph_, safety_) > 0.0)) return std::numeric_limits<double>::infinity();
    return phform::formation_energy(state, graph_, edge_gains_, safety_);
}

}  // namespace phform
