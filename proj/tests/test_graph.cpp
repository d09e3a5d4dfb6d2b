#include <doctest.h>

#include <stdexcept>

#include <Eigen/SVD>

#include "phform/graph.hpp"

using namespace phform;

namespace {

// Independent rank oracle: count singular values above a relative threshold.
Eigen::Index svd_rank(const Eigen::MatrixXi& b) {
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(b.cast<double>());
    const auto& s = svd.singularValues();
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < s.size(); ++i) r += s(i) > 1e-9 * s(0) ? 1 : 0;
    return r;
}

}  // namespace

TEST_CASE("tournament on two agents has a single edge") {
    const FormationGraph g = build_tournament_graph(2);
    REQUIRE(g.edge_count() == 1);
    CHECK(g.edges()[0] == Edge{0, 1});
    Eigen::MatrixXi expected(2, 1);
    expected << 1, -1;
    CHECK(incidence_matrix(g) == expected);
    CHECK(verify_full_column_rank(incidence_matrix(g)));
}

TEST_CASE("tournament on three agents follows lexicographic edge order") {
    const FormationGraph g = build_tournament_graph(3);
    REQUIRE(g.edge_count() == 3);
    CHECK(g.edges()[0] == Edge{0, 1});
    CHECK(g.edges()[1] == Edge{0, 2});
    CHECK(g.edges()[2] == Edge{1, 2});
    Eigen::MatrixXi expected(3, 3);
    expected << 1, 1, 0,
               -1, 0, 1,
                0, -1, -1;
    CHECK(incidence_matrix(g) == expected);
}

TEST_CASE("three-agent incidence has rank two") {
    // Columns satisfy c1 - c2 + c3 = 0, so the rank is N-1 = 2 < M = 3.
    const Eigen::MatrixXi b = incidence_matrix(build_tournament_graph(3));
    CHECK((b.col(0) - b.col(1) + b.col(2)).isZero());
    CHECK(column_rank(b.cast<double>()) == 2);
    CHECK(svd_rank(b) == 2);
    CHECK_FALSE(verify_full_column_rank(b));
}

TEST_CASE("eight-agent tournament starts with the star block of agent 1") {
    const FormationGraph g = build_tournament_graph(8);
    REQUIRE(g.edge_count() == 28);
    const Eigen::MatrixXi b = incidence_matrix(g);
    Eigen::MatrixXi block(8, 7);
    block.row(0).setOnes();
    block.bottomRows(7) = -Eigen::MatrixXi::Identity(7, 7);
    CHECK(b.leftCols(7) == block);
    for (std::size_t k = 0; k < 7; ++k) CHECK(g.edges()[k].tail == 0);
}

TEST_CASE("tournament invariants for N = 2..12") {
    for (std::size_t n = 2; n <= 12; ++n) {
        CAPTURE(n);
        const FormationGraph g = build_tournament_graph(n);
        const Eigen::MatrixXi b = incidence_matrix(g);
        CHECK(g.edge_count() == n * (n - 1) / 2);
        CHECK(g.is_tournament());
        CHECK(b.rows() == static_cast<Eigen::Index>(n));
        for (Eigen::Index k = 0; k < b.cols(); ++k) {
            CHECK((b.col(k).array() == 1).count() == 1);
            CHECK((b.col(k).array() == -1).count() == 1);
            CHECK(b.col(k).sum() == 0);
        }
        for (const Edge& e : g.edges()) CHECK(e.tail < e.head);
        // Row i: tail of N-1-i edges, head of i edges.
        for (Eigen::Index i = 0; i < b.rows(); ++i) CHECK(b.row(i).sum() == static_cast<int>(n) - 1 - 2 * i);
        const auto rank = column_rank(b.cast<double>());
        CHECK(rank == static_cast<std::size_t>(svd_rank(b)));
        CHECK(rank == n - 1);
        CHECK(verify_full_column_rank(b) == (n == 2));
    }
}

TEST_CASE("column rank of generic matrices agrees with SVD") {
    Eigen::MatrixXd full(3, 2);
    full << 1, 2, 3, 4, 5, 7;
    CHECK(column_rank(full) == 2);
    Eigen::MatrixXd deficient(3, 2);
    deficient << 1, 2, 2, 4, 3, 6;
    CHECK(column_rank(deficient) == 1);
    CHECK(column_rank(Eigen::MatrixXd::Zero(4, 3)) == 0);
}

TEST_CASE("a directed path on three nodes has full column rank") {
    const FormationGraph path(3, {{0, 1}, {1, 2}});
    CHECK(verify_full_column_rank(incidence_matrix(path)));
    CHECK_FALSE(path.is_tournament());
}

TEST_CASE("incident lists follow edge order") {
    const FormationGraph g = build_tournament_graph(4);
    const auto& inc = g.incident(2);
    REQUIRE(inc.size() == 3);
    CHECK(inc[0] == std::pair<std::size_t, int>{1, -1});
    CHECK(inc[1] == std::pair<std::size_t, int>{3, -1});
    CHECK(inc[2] == std::pair<std::size_t, int>{5, 1});
}

TEST_CASE("graph construction errors") {
    CHECK_THROWS_AS(build_tournament_graph(1), std::invalid_argument);
    CHECK_THROWS_AS(build_tournament_graph(0), std::invalid_argument);
    CHECK_THROWS_AS(FormationGraph(3, {{0, 0}}), std::invalid_argument);
    CHECK_THROWS_AS(FormationGraph(3, {{0, 3}}), std::invalid_argument);
    CHECK_THROWS_AS(FormationGraph(3, {{0, 1}, {1, 0}}), std::invalid_argument);
}

TEST_CASE("edge endpoints") {
    const FormationGraph g = build_tournament_graph(4);
    CHECK(edge_endpoints(g, 0) == Edge{0, 1});
    CHECK(edge_endpoints(g, 3) == Edge{1, 2});
    CHECK(edge_endpoints(g, 5) == Edge{2, 3});
    CHECK_THROWS_AS(edge_endpoints(g, 6), std::invalid_argument);
}
