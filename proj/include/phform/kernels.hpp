#pragma once

#include <cstddef>
#include <span>

#include <Eigen/Dense>

#include "phform/controllers.hpp"
#include "phform/graph.hpp"

// Edge-coupling kernels behind formation_input and baseline_quadratic_input.
// The serial kernel is the reference: a scatter over edges in edge order.
// The parallel kernel computes per-edge scalars concurrently and gathers per
// agent over its incident edges, also in edge order, so both kernels sum in
// the same order and agree bit for bit.
namespace phform::kernels {

enum class EdgeLaw { barrier, quadratic };

// Below this many edges the parallel kernel runs on the calling thread and
// formation_input uses the serial kernel.
inline constexpr std::size_t kParallelMinEdges = 256;

// q and velocity are N x n. Returns the N x n coupling input. For the
// barrier law, throws BarrierViolation for the lowest edge with a_k <= 0.
Eigen::MatrixXd edge_coupling_serial(const Eigen::MatrixXd& q, const Eigen::MatrixXd& velocity,
                                     const FormationGraph& graph, std::span<const EdgeGains> gains,
                                     double min_distance, EdgeLaw law);

Eigen::MatrixXd edge_coupling_parallel(const Eigen::MatrixXd& q, const Eigen::MatrixXd& velocity,
                                       const FormationGraph& graph, std::span<const EdgeGains> gains,
                                       double min_distance, EdgeLaw law);

}  // namespace phform::kernels
