#include "phform/kernels.hpp"

#include <limits>
#include <stdexcept>
#include <vector>

namespace phform::kernels {

namespace {

void check_shapes(const Eigen::MatrixXd& q, const Eigen::MatrixXd& velocity, const FormationGraph& graph,
                  std::span<const EdgeGains> gains) {
    if (velocity.rows() != q.rows() || velocity.cols() != q.cols())
        throw std::invalid_argument("position and velocity shapes differ");
    if (static_cast<std::size_t>(q.rows()) != graph.nodes())
        throw std::invalid_argument("state agent count does not match graph");
    if (gains.size() != graph.edge_count())
        throw std::invalid_argument("need one EdgeGains per edge");
}

// xi_k for one edge; sets `a` to the barrier argument.
inline double edge_scalar(const Eigen::MatrixXd& q, const Eigen::MatrixXd& velocity, const Edge& edge,
                          const EdgeGains& g, double min_distance, EdgeLaw law, double& a) {
    const auto t = static_cast<Eigen::Index>(edge.tail);
    const auto h = static_cast<Eigen::Index>(edge.head);
    const double dist2 = (q.row(t) - q.row(h)).squaredNorm();
    EdgeError err;
    err.c = g.desired_distance * g.desired_distance - min_distance * min_distance;
    err.e = dist2 - g.desired_distance * g.desired_distance;
    err.a = dist2 - min_distance * min_distance;
    a = err.a;
    const double rate = 2.0 * (q.row(t) - q.row(h)).dot(velocity.row(t) - velocity.row(h));
    if (law == EdgeLaw::barrier) {
        if (!(err.a > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        return barrier_gradient(err, g) + g.damping * rate;
    }
    return quadratic_gradient(err, g) + g.damping * rate;
}

void throw_first_violation(const std::vector<double>& a, EdgeLaw law) {
    if (law != EdgeLaw::barrier) return;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (!(a[k] > 0.0)) throw BarrierViolation(k, a[k]);
}

}  // namespace

Eigen::MatrixXd edge_coupling_serial(const Eigen::MatrixXd& q, const Eigen::MatrixXd& velocity,
                                     const FormationGraph& graph, std::span<const EdgeGains> gains,
                                     double min_distance, EdgeLaw law) {
    check_shapes(q, velocity, graph, gains);
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(q.rows(), q.cols());
    const auto& edges = graph.edges();
    for (std::size_t k = 0; k < edges.size(); ++k) {
        double a = 0.0;
        const double xi = edge_scalar(q, velocity, edges[k], gains[k], min_distance, law, a);
        if (law == EdgeLaw::barrier && !(a > 0.0)) throw BarrierViolation(k, a);
        const auto t = static_cast<Eigen::Index>(edges[k].tail);
        const auto h = static_cast<Eigen::Index>(edges[k].head);
        const Eigen::RowVectorXd rel = q.row(t) - q.row(h);
        u.row(t) -= rel * xi;
        u.row(h) += rel * xi;
    }
    return u;
}

Eigen::MatrixXd edge_coupling_parallel(const Eigen::MatrixXd& q, const Eigen::MatrixXd& velocity,
                                       const FormationGraph& graph, std::span<const EdgeGains> gains,
                                       double min_distance, EdgeLaw law) {
    check_shapes(q, velocity, graph, gains);
    const auto& edges = graph.edges();
    const auto m = static_cast<std::ptrdiff_t>(edges.size());
    const auto agents = static_cast<std::ptrdiff_t>(q.rows());
    std::vector<double> xi(edges.size());
    std::vector<double> a(edges.size());

#pragma omp parallel for schedule(static) if (edges.size() >= kParallelMinEdges)
    for (std::ptrdiff_t k = 0; k < m; ++k) {
        const auto ku = static_cast<std::size_t>(k);
        xi[ku] = edge_scalar(q, velocity, edges[ku], gains[ku], min_distance, law, a[ku]);
    }
    throw_first_violation(a, law);

    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(q.rows(), q.cols());
#pragma omp parallel for schedule(static) if (edges.size() >= kParallelMinEdges)
    for (std::ptrdiff_t i = 0; i < agents; ++i) {
        for (const auto& [k, sign] : graph.incident(static_cast<std::size_t>(i))) {
            const auto t = static_cast<Eigen::Index>(edges[k].tail);
            const auto h = static_cast<Eigen::Index>(edges[k].head);
            const Eigen::RowVectorXd rel = q.row(t) - q.row(h);
            if (sign > 0)
                u.row(i) -= rel * xi[k];
            else
                u.row(i) += rel * xi[k];
        }
    }
    return u;
}

}  // namespace phform::kernels
