#include "phform/graph.hpp"

#include <cmath>
#include <set>
#include <stdexcept>
#include <string>

namespace phform {

FormationGraph::FormationGraph(std::size_t nodes, std::vector<Edge> edges)
    : nodes_(nodes), edges_(std::move(edges)), incident_(nodes) {
    if (nodes_ < 2) throw std::invalid_argument("graph needs at least 2 nodes");
    std::set<std::pair<std::size_t, std::size_t>> seen;
    for (std::size_t k = 0; k < edges_.size(); ++k) {
        const Edge& e = edges_[k];
        if (e.tail >= nodes_ || e.head >= nodes_)
            throw std::invalid_argument("edge " + std::to_string(k + 1) + " references a missing node");
        if (e.tail == e.head)
            throw std::invalid_argument("edge " + std::to_string(k + 1) + " is a self-loop");
        auto key = std::minmax(e.tail, e.head);
        if (!seen.insert({key.first, key.second}).second)
            throw std::invalid_argument("edge " + std::to_string(k + 1) + " duplicates an agent pair");
        incident_[e.tail].emplace_back(k, +1);
        incident_[e.head].emplace_back(k, -1);
    }
}

bool FormationGraph::is_tournament() const {
    return edges_.size() == nodes_ * (nodes_ - 1) / 2;  // pairs are unique by construction
}

FormationGraph build_tournament_graph(std::size_t agents) {
    if (agents < 2) throw std::invalid_argument("tournament graph needs at least 2 agents");
    std::vector<Edge> edges;
    edges.reserve(agents * (agents - 1) / 2);
    for (std::size_t tail = 0; tail + 1 < agents; ++tail)
        for (std::size_t head = tail + 1; head < agents; ++head)
            edges.push_back({tail, head});
    return FormationGraph(agents, std::move(edges));
}

Eigen::MatrixXi incidence_matrix(const FormationGraph& graph) {
    Eigen::MatrixXi b = Eigen::MatrixXi::Zero(static_cast<Eigen::Index>(graph.nodes()),
                                              static_cast<Eigen::Index>(graph.edge_count()));
    for (std::size_t k = 0; k < graph.edge_count(); ++k) {
        const Edge& e = graph.edges()[k];
        b(static_cast<Eigen::Index>(e.tail), static_cast<Eigen::Index>(k)) = 1;
        b(static_cast<Eigen::Index>(e.head), static_cast<Eigen::Index>(k)) = -1;
    }
    return b;
}

std::size_t column_rank(const Eigen::MatrixXd& matrix, double tolerance) {
    Eigen::MatrixXd a = matrix;
    const Eigen::Index rows = a.rows();
    const Eigen::Index cols = a.cols();
    const double scale = a.size() ? a.cwiseAbs().maxCoeff() : 0.0;
    if (scale == 0.0) return 0;
    const double threshold = tolerance * scale;

    std::size_t rank = 0;
    Eigen::Index row = 0;
    for (Eigen::Index col = 0; col < cols && row < rows; ++col) {
        Eigen::Index pivot = row;
        for (Eigen::Index r = row + 1; r < rows; ++r)
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        if (std::abs(a(pivot, col)) <= threshold) continue;
        a.row(row).swap(a.row(pivot));
        for (Eigen::Index r = row + 1; r < rows; ++r) {
            const double f = a(r, col) / a(row, col);
            a.row(r).tail(cols - col) -= f * a.row(row).tail(cols - col);
        }
        ++row;
        ++rank;
    }
    return rank;
}

bool verify_full_column_rank(const Eigen::MatrixXi& incidence, double tolerance) {
    return column_rank(incidence.cast<double>(), tolerance) == static_cast<std::size_t>(incidence.cols());
}

Edge edge_endpoints(const FormationGraph& graph, std::size_t k) {
    if (k >= graph.edge_count())
        throw std::invalid_argument("edge index " + std::to_string(k) + " out of range");
    return graph.edges()[k];
}

}  // namespace phform
