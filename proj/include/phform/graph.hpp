#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace phform {

// Directed edge between two agents. Indices are 0-based; the relative
// position carried by the edge is q[tail] - q[head].
struct Edge {
    std::size_t tail = 0;
    std::size_t head = 0;

    friend bool operator==(const Edge&, const Edge&) = default;
};

class FormationGraph {
public:
    FormationGraph() = default;

    // Throws std::invalid_argument if an edge references a node >= nodes,
    // is a self-loop, or duplicates an unordered pair.
    FormationGraph(std::size_t nodes, std::vector<Edge> edges);

    std::size_t nodes() const { return nodes_; }
    std::size_t edge_count() const { return edges_.size(); }
    const std::vector<Edge>& edges() const { return edges_; }

    // Edges incident to `node`, in edge order, paired with the incidence
    // sign (+1 tail, -1 head).
    const std::vector<std::pair<std::size_t, int>>& incident(std::size_t node) const {
        return incident_[node];
    }

    // True iff every unordered pair of distinct nodes is joined by exactly
    // one edge.
    bool is_tournament() const;

private:
    std::size_t nodes_ = 0;
    std::vector<Edge> edges_;
    std::vector<std::vector<std::pair<std::size_t, int>>> incident_;
};

// Acyclic tournament on `agents` nodes. Agent i is the tail of the edges to
// i+1, ..., N, enumerated lexicographically by (tail, head):
// (1,2), (1,3), ..., (1,N), (2,3), ..., (N-1,N) in 1-based labels.
FormationGraph build_tournament_graph(std::size_t agents);

// Signed node-by-edge incidence matrix: +1 at the tail, -1 at the head.
Eigen::MatrixXi incidence_matrix(const FormationGraph& graph);

// Numerical column rank by Gaussian elimination with partial pivoting.
// A pivot counts if its magnitude exceeds tolerance * max|entry|.
std::size_t column_rank(const Eigen::MatrixXd& matrix, double tolerance = 1e-10);

bool verify_full_column_rank(const Eigen::MatrixXi& incidence, double tolerance = 1e-10);

// Throws std::invalid_argument if k >= edge_count().
Edge edge_endpoints(const FormationGraph& graph, std::size_t k);

}  // namespace phform
