#include "phform/export.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

namespace phform {

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

nlohmann::json matrix_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(finite_or_null(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json series_json(const std::vector<double>& v) {
    nlohmann::json out = nlohmann::json::array();
    for (double x : v) out.push_back(finite_or_null(x));
    return out;
}

const char* axis(Eigen::Index c) {
    static const char* names[] = {"x", "y", "z"};
    return names[c];
}

}  // namespace

std::vector<std::string> trajectory_columns(std::size_t agents, Eigen::Index dimension, std::size_t edges) {
    std::vector<std::string> cols{"t"};
    for (const char* prefix : {"q", "p"})
        for (std::size_t i = 1; i <= agents; ++i)
            for (Eigen::Index c = 0; c < dimension; ++c)
                cols.push_back(std::string(prefix) + "_" + std::to_string(i) + "_" + axis(c));
    for (std::size_t k = 1; k <= edges; ++k) cols.push_back("e_" + std::to_string(k));
    for (std::size_t k = 1; k <= edges; ++k) cols.push_back("d_" + std::to_string(k));
    cols.insert(cols.end(), {"Hv", "Hf", "HF"});
    return cols;
}

void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log, std::size_t edges) {
    if (log.empty()) return;
    const SystemState& first = log.states.front();
    const auto cols = trajectory_columns(first.agents(), first.dimension(), edges);
    for (std::size_t c = 0; c < cols.size(); ++c) out << (c ? "," : "") << cols[c];
    out << '\n';

    std::ostringstream line;
    line << std::setprecision(17);
    for (std::size_t s = 0; s < log.size(); ++s) {
        line.str("");
        const SystemState& st = log.states[s];
        line << log.times[s];
        for (const Eigen::MatrixXd* m : {&st.q, &st.p})
            for (Eigen::Index i = 0; i < m->rows(); ++i)
                for (Eigen::Index c = 0; c < m->cols(); ++c) line << ',' << (*m)(i, c);
        for (double e : log.edge_errors[s]) line << ',' << e;
        for (double d : log.edge_distances[s]) line << ',' << d;
        const Energies& en = log.energies[s];
        line << ',' << en.velocity << ',' << en.formation << ',' << en.total << '\n';
        out << line.str();
    }
}

nlohmann::json trajectory_json(const TrajectoryLog& log, const FormationGraph& graph) {
    nlohmann::json j;
    const std::size_t agents = graph.nodes();
    const Eigen::Index dim = log.empty() ? 0 : log.states.front().dimension();
    j["columns"] = trajectory_columns(agents, dim, graph.edge_count());
    j["agents"] = agents;
    j["dimension"] = dim;
    j["edges"] = graph_json(graph)["edges"];
    nlohmann::json samples = nlohmann::json::array();
    for (std::size_t s = 0; s < log.size(); ++s) {
        nlohmann::json row;
        row["t"] = log.times[s];
        row["q"] = matrix_json(log.states[s].q);
        row["p"] = matrix_json(log.states[s].p);
        row["e"] = series_json(log.edge_errors[s]);
        row["d"] = series_json(log.edge_distances[s]);
        row["Hv"] = finite_or_null(log.energies[s].velocity);
        row["Hf"] = finite_or_null(log.energies[s].formation);
        row["HF"] = finite_or_null(log.energies[s].total);
        samples.push_back(std::move(row));
    }
    j["samples"] = std::move(samples);
    return j;
}

nlohmann::json report_json(const RunReport& r) {
    nlohmann::json j;
    j["controller"] = std::string(to_string(r.controller));
    j["converged"] = r.converged;
    j["collision"] = r.collision;
    j["final_edge_errors"] = series_json(r.final_edge_errors);
    j["max_momentum_error_final"] = finite_or_null(r.max_momentum_error_final);
    j["min_distance_overall"] = finite_or_null(r.min_distance_overall);
    j["min_distance_time"] = r.min_distance_time;
    j["first_collision_time"] = finite_or_null(r.first_collision_time);
    j["energy_monotone_violations"] = r.energy_monotone_violations;
    j["worst_energy_increase"] = finite_or_null(r.worst_energy_increase);
    j["final_hamiltonian"] = finite_or_null(r.final_hamiltonian);
    j["samples_checked"] = r.samples_checked;
    return j;
}

std::string report_text(const RunReport& r, const Scenario& scenario) {
    std::ostringstream os;
    os << std::setprecision(6);
    os << "scenario            " << scenario.name << '\n';
    os << "controller          " << to_string(r.controller) << '\n';
    os << "converged           " << (r.converged ? "yes" : "no") << '\n';
    os << "collision           " << (r.collision ? "yes" : "no");
    if (r.collision) os << " (first at t=" << r.first_collision_time << " s)";
    os << '\n';
    os << "min distance        " << r.min_distance_overall << " m at t=" << r.min_distance_time << " s (d_s = "
       << scenario.safety.min_distance << " m)\n";
    os << "final edge errors  ";
    for (double e : r.final_edge_errors) os << ' ' << e;
    os << '\n';
    os << "max |p_bar| final   " << r.max_momentum_error_final << '\n';
    os << "final H^F           " << r.final_hamiltonian << '\n';
    os << "H^F rises > " << scenario.metrics.energy_tol << "  " << r.energy_monotone_violations << " (worst "
       << r.worst_energy_increase << ")\n";
    return os.str();
}

nlohmann::json sweep_json(const SweepReport& report) {
    nlohmann::json j;
    j["trials"] = report.trials;
    j["collisions"] = report.collisions;
    j["converged"] = report.converged;
    j["aborted"] = report.aborted;
    j["min_distance"] = finite_or_null(report.min_distance);
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& t : report.results) {
        nlohmann::json row;
        row["index"] = t.index;
        row["initial_positions"] = matrix_json(t.initial_q);
        row["aborted"] = t.aborted;
        if (t.aborted)
            row["error"] = t.error;
        else
            row["report"] = report_json(t.report);
        rows.push_back(std::move(row));
    }
    j["results"] = std::move(rows);
    return j;
}

void write_graph_csv(std::ostream& out, const FormationGraph& graph) {
    const Eigen::MatrixXi b = incidence_matrix(graph);
    out << "node";
    for (Eigen::Index k = 0; k < b.cols(); ++k) out << ",E" << k + 1;
    out << '\n';
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        out << i + 1;
        for (Eigen::Index k = 0; k < b.cols(); ++k) out << ',' << b(i, k);
        out << '\n';
    }
}

nlohmann::json graph_json(const FormationGraph& graph) {
    nlohmann::json j;
    j["agents"] = graph.nodes();
    j["edge_count"] = graph.edge_count();
    nlohmann::json edges = nlohmann::json::array();
    for (const Edge& e : graph.edges()) edges.push_back({e.tail + 1, e.head + 1});
    j["edges"] = std::move(edges);
    const Eigen::MatrixXi b = incidence_matrix(graph);
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index k = 0; k < b.cols(); ++k) row.push_back(b(i, k));
        rows.push_back(std::move(row));
    }
    j["incidence"] = std::move(rows);
    return j;
}

}  // namespace phform
