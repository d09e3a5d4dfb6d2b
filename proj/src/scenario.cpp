#include "phform/scenario.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <toml++/toml.hpp>

namespace phform {

ScenarioError::ScenarioError(std::string field, const std::string& message)
    : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}

namespace {

std::string join(std::string_view section, std::string_view key) {
    if (section == "<root>") return std::string(key);
    return std::string(section) + "." + std::string(key);
}

std::optional<double> as_number(const toml::node& node) {
    if (auto v = node.value<double>()) return *v;
    return std::nullopt;
}

double number(const toml::table& table, std::string_view section, std::string_view key,
              std::optional<double> fallback = std::nullopt) {
    const toml::node* node = table.get(key);
    if (!node) {
        if (fallback) return *fallback;
        throw ScenarioError(join(section, key), "missing");
    }
    auto v = as_number(*node);
    if (!v) throw ScenarioError(join(section, key), "expected a number");
    return *v;
}

std::int64_t integer(const toml::table& table, std::string_view section, std::string_view key,
                     std::optional<std::int64_t> fallback = std::nullopt) {
    const toml::node* node = table.get(key);
    if (!node) {
        if (fallback) return *fallback;
        throw ScenarioError(join(section, key), "missing");
    }
    auto v = node->value<std::int64_t>();
    if (!v || !node->is_integer()) throw ScenarioError(join(section, key), "expected an integer");
    return *v;
}

std::string text(const toml::table& table, std::string_view section, std::string_view key,
                 std::optional<std::string> fallback = std::nullopt) {
    const toml::node* node = table.get(key);
    if (!node) {
        if (fallback) return *fallback;
        throw ScenarioError(join(section, key), "missing");
    }
    auto v = node->value<std::string>();
    if (!v) throw ScenarioError(join(section, key), "expected a string");
    return *v;
}

Eigen::VectorXd vector_of(const toml::node& node, const std::string& field, Eigen::Index length) {
    const toml::array* arr = node.as_array();
    if (!arr) throw ScenarioError(field, "expected an array of " + std::to_string(length) + " numbers");
    if (static_cast<Eigen::Index>(arr->size()) != length)
        throw ScenarioError(field, "expected " + std::to_string(length) + " entries, got " + std::to_string(arr->size()));
    Eigen::VectorXd v(length);
    for (Eigen::Index i = 0; i < length; ++i) {
        auto x = as_number((*arr)[static_cast<std::size_t>(i)]);
        if (!x) throw ScenarioError(field, "entry " + std::to_string(i + 1) + " is not a number");
        v(i) = *x;
    }
    return v;
}

// Rows x cols nested array.
Eigen::MatrixXd matrix_of(const toml::node& node, const std::string& field, Eigen::Index rows, Eigen::Index cols) {
    const toml::array* arr = node.as_array();
    if (!arr || static_cast<Eigen::Index>(arr->size()) != rows)
        throw ScenarioError(field, "expected " + std::to_string(rows) + " rows");
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        m.row(r) = vector_of((*arr)[static_cast<std::size_t>(r)], field + "[" + std::to_string(r + 1) + "]", cols)
                       .transpose();
    return m;
}

// Square gain matrix given as a scalar (multiple of I), a diagonal, or a
// full n x n array.
Eigen::MatrixXd square_matrix(const toml::node& node, const std::string& field, Eigen::Index n) {
    if (auto s = as_number(node)) return *s * Eigen::MatrixXd::Identity(n, n);
    const toml::array* arr = node.as_array();
    if (!arr) throw ScenarioError(field, "expected a number, a diagonal, or a matrix");
    if (!arr->empty() && (*arr)[0].is_array()) return matrix_of(node, field, n, n);
    return vector_of(node, field, n).asDiagonal();
}

// One value per item: a single number broadcast, or an array of `count`.
std::vector<double> per_item(const toml::node& node, const std::string& field, std::size_t count) {
    if (auto s = as_number(node)) return std::vector<double>(count, *s);
    const Eigen::VectorXd v = vector_of(node, field, static_cast<Eigen::Index>(count));
    return {v.data(), v.data() + v.size()};
}

// One square matrix per agent: either one value broadcast or an array of
// per-agent specs under `<key>_per_agent`.
std::vector<Eigen::MatrixXd> per_agent_matrices(const toml::table& table, std::string_view section,
                                                std::string_view key, std::size_t agents, Eigen::Index n,
                                                std::optional<double> fallback) {
    const std::string per_agent_key = std::string(key) + "_per_agent";
    if (const toml::node* node = table.get(per_agent_key)) {
        const toml::array* arr = node->as_array();
        const std::string field = join(section, per_agent_key);
        if (!arr || arr->size() != agents) throw ScenarioError(field, "expected one entry per agent");
        std::vector<Eigen::MatrixXd> out;
        for (std::size_t i = 0; i < agents; ++i)
            out.push_back(square_matrix((*arr)[i], field + "[" + std::to_string(i + 1) + "]", n));
        return out;
    }
    const toml::node* node = table.get(key);
    if (!node) {
        if (!fallback) throw ScenarioError(join(section, key), "missing");
        return std::vector<Eigen::MatrixXd>(agents, *fallback * Eigen::MatrixXd::Identity(n, n));
    }
    return std::vector<Eigen::MatrixXd>(agents, square_matrix(*node, join(section, key), n));
}

const toml::table& section_of(const toml::table& root, std::string_view name, bool required) {
    static const toml::table empty;
    const toml::node* node = root.get(name);
    if (!node) {
        if (required) throw ScenarioError(std::string(name), "section missing");
        return empty;
    }
    const toml::table* t = node->as_table();
    if (!t) throw ScenarioError(std::string(name), "expected a section");
    return *t;
}

void check_known_keys(const toml::table& table, std::string_view section,
                      std::initializer_list<std::string_view> known) {
    for (const auto& [key, value] : table) {
        bool ok = false;
        for (auto k : known) ok = ok || key.str() == k;
        if (!ok) throw ScenarioError(join(section, key.str()), "unknown key");
    }
}

std::vector<EdgeGains> edge_gains_from(const toml::table& table, std::string_view section, std::size_t edges,
                                       const std::vector<EdgeGains>* defaults) {
    auto field = [&](std::string_view key, double EdgeGains::*member, std::optional<double> fallback) {
        std::vector<double> values;
        if (const toml::node* node = table.get(key)) {
            values = per_item(*node, join(section, key), edges);
        } else if (defaults) {
            for (const auto& g : *defaults) values.push_back(g.*member);
        } else if (fallback) {
            values.assign(edges, *fallback);
        } else {
            throw ScenarioError(join(section, key), "missing");
        }
        return values;
    };
    const auto alpha = field("alpha", &EdgeGains::alpha, std::nullopt);
    const auto dist = field("desired_distance", &EdgeGains::desired_distance, std::nullopt);
    const auto damping = field("edge_damping", &EdgeGains::damping, 1.0);
    std::vector<EdgeGains> out(edges);
    for (std::size_t k = 0; k < edges; ++k) out[k] = {alpha[k], dist[k], damping[k]};
    return out;
}

bool triangle_realizable(double a, double b, double c) {
    const double slack = 1e-12 * (a + b + c);
    return a <= b + c + slack && b <= a + c + slack && c <= a + b + slack;
}

}  // namespace

SystemState Scenario::initial_state() const { return SystemState{initial_q, initial_p, 0.0}; }

ControlLaw Scenario::control_law() const {
    return ControlLaw(controller, graph, agent_params, velocity_gains, edge_gains, baseline_gains, safety);
}

Scenario Scenario::with_controller(ControllerKind kind) const {
    Scenario s = *this;
    s.controller = kind;
    s.validate();
    return s;
}

void Scenario::validate() const {
    if (agents < 2) throw ScenarioError("agents.count", "need at least 2 agents");
    if (dimension != 2 && dimension != 3) throw ScenarioError("agents.dimension", "must be 2 or 3");
    if (agent_params.size() != agents) throw ScenarioError("agents", "parameter count does not match agents.count");
    for (std::size_t i = 0; i < agents; ++i) {
        try {
            agent_params[i].validate(dimension);
        } catch (const std::invalid_argument& e) {
            throw ScenarioError("agents[" + std::to_string(i + 1) + "]", e.what());
        }
    }
    if (graph.nodes() != agents) throw ScenarioError("graph", "node count does not match agents.count");
    if (!(safety.min_distance > 0.0)) throw ScenarioError("safety.min_distance", "must be positive");

    if (edge_gains.size() != graph.edge_count()) throw ScenarioError("gains", "need one entry per edge");
    for (std::size_t k = 0; k < edge_gains.size(); ++k) {
        const std::string idx = "[" + std::to_string(k + 1) + "]";
        if (!(edge_gains[k].alpha > 0.0)) throw ScenarioError("gains.alpha" + idx, "must be positive");
        if (!(edge_gains[k].desired_distance > safety.min_distance))
            throw ScenarioError("gains.desired_distance" + idx, "must exceed safety.min_distance");
        if (controller == ControllerKind::proposed && !(edge_gains[k].damping > 0.0))
            throw ScenarioError("gains.edge_damping" + idx, "must be positive");
    }
    if (baseline_gains.size() != graph.edge_count()) throw ScenarioError("gains.baseline", "need one entry per edge");
    for (std::size_t k = 0; k < baseline_gains.size(); ++k) {
        const std::string idx = "[" + std::to_string(k + 1) + "]";
        if (!(baseline_gains[k].alpha > 0.0)) throw ScenarioError("gains.baseline.alpha" + idx, "must be positive");
        if (!(baseline_gains[k].damping >= 0.0))
            throw ScenarioError("gains.baseline.edge_damping" + idx, "must be nonnegative");
    }

    if (velocity_gains.desired_velocity.size() != dimension)
        throw ScenarioError("gains.desired_velocity", "length must equal agents.dimension");
    if (velocity_gains.damping.size() != agents) throw ScenarioError("gains.velocity_damping", "need one per agent");
    for (const auto& dv : velocity_gains.damping)
        if (dv.rows() != dimension || !is_symmetric_psd(dv))
            throw ScenarioError("gains.velocity_damping", "must be symmetric positive semi-definite");

    if (initial_q.rows() != static_cast<Eigen::Index>(agents) || initial_q.cols() != dimension)
        throw ScenarioError("initial.positions", "expected agents.count rows of agents.dimension entries");
    if (initial_p.rows() != static_cast<Eigen::Index>(agents) || initial_p.cols() != dimension)
        throw ScenarioError("initial.momenta", "expected agents.count rows of agents.dimension entries");
    if (!initial_q.allFinite()) throw ScenarioError("initial.positions", "entries must be finite");
    if (!initial_p.allFinite()) throw ScenarioError("initial.momenta", "entries must be finite");

    if (controller == ControllerKind::proposed) {
        for (Eigen::Index i = 0; i < initial_q.rows(); ++i)
            for (Eigen::Index j = i + 1; j < initial_q.rows(); ++j)
                if (!((initial_q.row(i) - initial_q.row(j)).norm() > safety.min_distance))
                    throw ScenarioError("initial.positions", "agents " + std::to_string(i + 1) + " and " +
                                                                 std::to_string(j + 1) +
                                                                 " start within safety.min_distance");
    }

    // Realizability of the target shape: exact for three agents with all
    // three pairs constrained.
    if (agents == 3 && graph.is_tournament()) {
        double d[3];
        for (std::size_t k = 0; k < 3; ++k) d[k] = edge_gains[k].desired_distance;
        if (!triangle_realizable(d[0], d[1], d[2]))
            throw ScenarioError("gains.desired_distance", "distances violate the triangle inequality");
    }

    try {
        integrator.validate();
    } catch (const std::invalid_argument& e) {
        throw ScenarioError("integrator", e.what());
    }
    if (!(metrics.edge_error_tol > 0.0)) throw ScenarioError("metrics.edge_error_tol", "must be positive");
    if (!(metrics.momentum_error_tol > 0.0)) throw ScenarioError("metrics.momentum_error_tol", "must be positive");
    if (!(metrics.energy_tol >= 0.0)) throw ScenarioError("metrics.energy_tol", "must be nonnegative");
    if (sweep.box_min.size() != dimension || sweep.box_max.size() != dimension)
        throw ScenarioError("sweep.box_min", "length must equal agents.dimension");
    if (!((sweep.box_max - sweep.box_min).minCoeff() > 0.0))
        throw ScenarioError("sweep.box_max", "must exceed sweep.box_min componentwise");
    if (!(sweep.margin >= 0.0)) throw ScenarioError("sweep.margin", "must be nonnegative");
}

Scenario load_scenario(std::string_view source) {
    toml::table root;
    try {
        root = toml::parse(source);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << e.description() << " at line " << e.source().begin.line;
        throw ScenarioError("<syntax>", os.str());
    }
    check_known_keys(root, "<root>",
                     {"name", "seed", "agents", "graph", "gains", "safety", "initial", "integrator", "controller",
                      "metrics", "sweep"});

    Scenario s;
    s.name = text(root, "<root>", "name", std::string("unnamed"));
    const std::int64_t seed = integer(root, "<root>", "seed", 0);
    if (seed < 0) throw ScenarioError("seed", "must be nonnegative");
    s.seed = static_cast<std::uint64_t>(seed);

    const toml::table& agents = section_of(root, "agents", true);
    check_known_keys(agents, "agents",
                     {"count", "dimension", "mass", "dissipation", "dissipation_per_agent", "inertia"});
    const std::int64_t count = integer(agents, "agents", "count");
    if (count < 2) throw ScenarioError("agents.count", "need at least 2 agents");
    s.agents = static_cast<std::size_t>(count);
    s.dimension = static_cast<Eigen::Index>(integer(agents, "agents", "dimension", 2));
    if (s.dimension != 2 && s.dimension != 3) throw ScenarioError("agents.dimension", "must be 2 or 3");
    if (agents.get("inertia")) throw ScenarioError("agents.inertia", "only scalar masses (M_i = m_i I) are supported");
    const std::vector<double> masses =
        agents.get("mass") ? per_item(*agents.get("mass"), "agents.mass", s.agents) : std::vector<double>(s.agents, 1.0);
    const auto dissipation = per_agent_matrices(agents, "agents", "dissipation", s.agents, s.dimension, 0.0);
    for (std::size_t i = 0; i < s.agents; ++i) s.agent_params.push_back({masses[i], dissipation[i]});

    const toml::table& graph = section_of(root, "graph", false);
    check_known_keys(graph, "graph", {"kind", "edges"});
    const std::string kind = text(graph, "graph", "kind", std::string("tournament"));
    if (kind == "tournament") {
        if (graph.get("edges")) throw ScenarioError("graph.edges", "only allowed with kind = \"custom\"");
        s.graph = build_tournament_graph(s.agents);
    } else if (kind == "custom") {
        const toml::node* node = graph.get("edges");
        const toml::array* arr = node ? node->as_array() : nullptr;
        if (!arr || arr->empty()) throw ScenarioError("graph.edges", "expected a non-empty array of [tail, head]");
        std::vector<Edge> edges;
        for (std::size_t k = 0; k < arr->size(); ++k) {
            const std::string field = "graph.edges[" + std::to_string(k + 1) + "]";
            const toml::array* pair = (*arr)[k].as_array();
            if (!pair || pair->size() != 2) throw ScenarioError(field, "expected [tail, head]");
            auto t = (*pair)[0].value<std::int64_t>();
            auto h = (*pair)[1].value<std::int64_t>();
            if (!t || !h || *t < 1 || *h < 1 || *t > count || *h > count)
                throw ScenarioError(field, "agent labels must be integers in 1..agents.count");
            edges.push_back({static_cast<std::size_t>(*t - 1), static_cast<std::size_t>(*h - 1)});
        }
        try {
            s.graph = FormationGraph(s.agents, std::move(edges));
        } catch (const std::invalid_argument& e) {
            throw ScenarioError("graph.edges", e.what());
        }
    } else {
        throw ScenarioError("graph.kind", "expected \"tournament\" or \"custom\"");
    }

    const toml::table& gains = section_of(root, "gains", true);
    check_known_keys(gains, "gains",
                     {"alpha", "desired_distance", "edge_damping", "velocity_damping", "velocity_damping_per_agent",
                      "desired_velocity", "baseline"});
    const std::size_t m = s.graph.edge_count();
    s.edge_gains = edge_gains_from(gains, "gains", m, nullptr);
    const toml::table& baseline = section_of(gains, "baseline", false);
    check_known_keys(baseline, "gains.baseline", {"alpha", "desired_distance", "edge_damping"});
    s.baseline_gains = edge_gains_from(baseline, "gains.baseline", m, &s.edge_gains);
    s.velocity_gains.damping = per_agent_matrices(gains, "gains", "velocity_damping", s.agents, s.dimension, 1.0);
    s.velocity_gains.desired_velocity = gains.get("desired_velocity")
                                            ? vector_of(*gains.get("desired_velocity"), "gains.desired_velocity", s.dimension)
                                            : Eigen::VectorXd::Zero(s.dimension);

    const toml::table& safety = section_of(root, "safety", true);
    check_known_keys(safety, "safety", {"min_distance"});
    s.safety.min_distance = number(safety, "safety", "min_distance");

    const toml::table& initial = section_of(root, "initial", true);
    check_known_keys(initial, "initial", {"positions", "momenta"});
    const auto rows = static_cast<Eigen::Index>(s.agents);
    if (!initial.get("positions")) throw ScenarioError("initial.positions", "missing");
    s.initial_q = matrix_of(*initial.get("positions"), "initial.positions", rows, s.dimension);
    s.initial_p = initial.get("momenta") ? matrix_of(*initial.get("momenta"), "initial.momenta", rows, s.dimension)
                                         : Eigen::MatrixXd::Zero(rows, s.dimension);

    const toml::table& integ = section_of(root, "integrator", false);
    check_known_keys(integ, "integrator", {"dt", "t_end", "guard_margin", "max_halvings", "log_stride"});
    s.integrator.dt = number(integ, "integrator", "dt", 1e-3);
    s.integrator.t_end = number(integ, "integrator", "t_end", 100.0);
    s.integrator.guard_margin = number(integ, "integrator", "guard_margin", 1e-6);
    s.integrator.max_halvings = static_cast<int>(integer(integ, "integrator", "max_halvings", 30));
    const std::int64_t stride = integer(integ, "integrator", "log_stride", 0);
    if (stride < 0) throw ScenarioError("integrator.log_stride", "must be nonnegative");
    s.integrator.log_stride = static_cast<std::size_t>(stride);

    const toml::table& controller = section_of(root, "controller", false);
    check_known_keys(controller, "controller", {"kind"});
    const std::string ctrl = text(controller, "controller", "kind", std::string("proposed"));
    auto parsed = parse_controller_kind(ctrl);
    if (!parsed) throw ScenarioError("controller.kind", "expected proposed | baseline | velocity_only | none");
    s.controller = *parsed;

    const toml::table& metrics = section_of(root, "metrics", false);
    check_known_keys(metrics, "metrics", {"edge_error_tol", "momentum_error_tol", "energy_tol"});
    s.metrics.edge_error_tol = number(metrics, "metrics", "edge_error_tol", 1e-2);
    s.metrics.momentum_error_tol = number(metrics, "metrics", "momentum_error_tol", 1e-3);
    s.metrics.energy_tol = number(metrics, "metrics", "energy_tol", 1e-8);

    const toml::table& sweep = section_of(root, "sweep", false);
    check_known_keys(sweep, "sweep", {"trials", "box_min", "box_max", "margin"});
    const std::int64_t trials = integer(sweep, "sweep", "trials", 20);
    if (trials < 1) throw ScenarioError("sweep.trials", "must be at least 1");
    s.sweep.trials = static_cast<std::size_t>(trials);
    s.sweep.box_min = sweep.get("box_min") ? vector_of(*sweep.get("box_min"), "sweep.box_min", s.dimension)
                                           : Eigen::VectorXd::Constant(s.dimension, -5.0);
    s.sweep.box_max = sweep.get("box_max") ? vector_of(*sweep.get("box_max"), "sweep.box_max", s.dimension)
                                           : Eigen::VectorXd::Constant(s.dimension, 5.0);
    s.sweep.margin = number(sweep, "sweep", "margin", 0.2);

    if (s.agents >= 4)
        s.warnings.push_back("realizability of the desired distances is not checked for 4 or more agents");

    s.validate();
    return s;
}

Scenario load_scenario_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError("<file>", "cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return load_scenario(buf.str());
}

Scenario resolve_scenario(const std::string& path_or_name) {
    if (std::filesystem::exists(path_or_name)) return load_scenario_file(path_or_name);
    if (auto bundled = bundled_scenario_text(path_or_name)) return load_scenario(*bundled);
    throw ScenarioError("<file>", "no such file or bundled scenario: " + path_or_name);
}

Scenario golden_scenario() { return load_scenario(*bundled_scenario_text("triangle")); }

}  // namespace phform
