#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "phform/graph.hpp"
#include "phform/scenario.hpp"
#include "phform/sim.hpp"
#include "phform/trajectory.hpp"

namespace phform {

// Column names of the trajectory CSV:
//   t, q_1_x, q_1_y[, q_1_z], ..., q_N_*, p_1_x, ..., p_N_*, e_1..e_M, d_1..d_M, Hv, Hf, HF
std::vector<std::string> trajectory_columns(std::size_t agents, Eigen::Index dimension, std::size_t edges);

// Values use 17 significant digits so every double round-trips.
void write_trajectory_csv(std::ostream& out, const TrajectoryLog& log, std::size_t edges);

// {"columns": [...], "agents", "dimension", "edges": [[tail, head], ...],
//  "samples": [{"t", "q", "p", "e", "d", "Hv", "Hf", "HF"}, ...]}
// Non-finite values become null.
nlohmann::json trajectory_json(const TrajectoryLog& log, const FormationGraph& graph);

nlohmann::json report_json(const RunReport& report);
std::string report_text(const RunReport& report, const Scenario& scenario);

nlohmann::json sweep_json(const SweepReport& report);

// Header `node,E1,...,EM`, then one row of signed entries per node.
void write_graph_csv(std::ostream& out, const FormationGraph& graph);
// {"agents", "edge_count", "edges": [[1,2],...], "incidence": [[...], ...]}, 1-based labels.
nlohmann::json graph_json(const FormationGraph& graph);

}  // namespace phform
