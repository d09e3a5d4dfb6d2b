#include "phform/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "phform/controllers.hpp"
#include "phform/graph.hpp"
#include "phform/integrator.hpp"
#include "phform/scenario.hpp"
#include "phform/sim.hpp"

namespace phform {

namespace {

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

struct GainTriple {
    double alpha;
    double desired_distance;
    double min_distance;
};

constexpr GainTriple kGradientTriples[] = {{5.0, 4.0, 1.0}, {1.0, 2.0, 0.5}, {10.0, 6.0, 2.0}};
constexpr std::size_t kGradientSamples = 120;

double barrier_of_e(double e, const GainTriple& g) {
    const double c = g.desired_distance * g.desired_distance - g.min_distance * g.min_distance;
    return barrier_potential(EdgeError{e, e + c, c}, EdgeGains{g.alpha, g.desired_distance, 0.0});
}

// Sum of barrier potentials over all edges as a function of positions.
double total_barrier(const Eigen::MatrixXd& q, const Scenario& s) {
    SystemState st{q, Eigen::MatrixXd::Zero(q.rows(), q.cols()), 0.0};
    return formation_energy(st, s.graph, s.edge_gains, s.safety);
}

Eigen::VectorXd final_state(const Scenario& s, double dt, double t_end) {
    IntegratorConfig cfg = s.integrator;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.log_stride = cfg.step_count();
    const TrajectoryLog log = integrate(s.initial_state(), s.control_law(), cfg);
    return pack_state(log.states.back());
}

}  // namespace

const std::vector<std::string_view>& suite_names() {
    static const std::vector<std::string_view> names{"rank", "gradient", "force", "order", "energy", "sweep"};
    return names;
}

SuiteResult run_suite(std::string_view name, const VerifyOptions& options) {
    if (name == "rank") return verify_rank_suite(options.max_agents);
    if (name == "gradient") return verify_gradient_suite();
    if (name == "force") return verify_force_suite(options.seed);
    if (name == "order") return verify_order_suite();
    if (name == "energy") return verify_energy_suite();
    if (name == "sweep") return verify_sweep_suite(options.trials, options.seed);
    throw std::invalid_argument("unknown suite: " + std::string(name));
}

SuiteResult verify_rank_suite(std::size_t max_agents) {
    SuiteResult r{"rank", true, {}, nlohmann::json::array()};
    if (max_agents < 2) throw std::invalid_argument("--max-n must be at least 2");
    std::size_t checked = 0;
    std::size_t rank_deficient = 0;
    for (std::size_t n = 2; n <= max_agents; ++n) {
        const FormationGraph g = build_tournament_graph(n);
        const Eigen::MatrixXi b = incidence_matrix(g);
        bool columns_ok = true;
        for (Eigen::Index k = 0; k < b.cols(); ++k)
            columns_ok = columns_ok && (b.col(k).array() == 1).count() == 1 && (b.col(k).array() == -1).count() == 1 &&
                         (b.col(k).array() == 0).count() == b.rows() - 2;
        const bool count_ok = g.edge_count() == n * (n - 1) / 2;
        const std::size_t rank = column_rank(b.cast<double>());
        const bool rank_ok = rank == g.edge_count();
        const bool ok = columns_ok && count_ok && rank_ok;
        r.passed = r.passed && ok;
        ++checked;
        if (!rank_ok) ++rank_deficient;
        r.details.push_back({{"agents", n},
                             {"edges", g.edge_count()},
                             {"rank", rank},
                             {"full_column_rank", rank_ok},
                             {"ok", ok}});
    }
    r.summary = std::to_string(checked) + " graphs checked, " + std::to_string(rank_deficient) +
                " without full column rank (rank = N-1 < M for N >= 3)";
    return r;
}

SuiteResult verify_gradient_suite() {
    SuiteResult r{"gradient", true, {}, nlohmann::json::array()};
    double worst = 0.0;
    for (const GainTriple& g : kGradientTriples) {
        const double c = g.desired_distance * g.desired_distance - g.min_distance * g.min_distance;
        const double lo = -c + 0.1;
        const double hi = 100.0;
        double triple_worst = 0.0;
        for (std::size_t j = 0; j < kGradientSamples; ++j) {
            const double e = lo + (static_cast<double>(j) + 0.5) * (hi - lo) / kGradientSamples;
            const double h = 1e-6 * std::max(1.0, std::abs(e));
            const double fd = (barrier_of_e(e + h, g) - barrier_of_e(e - h, g)) / (2.0 * h);
            const double analytic =
                barrier_gradient(EdgeError{e, e + c, c}, EdgeGains{g.alpha, g.desired_distance, 0.0});
            const double rel = std::abs(analytic - fd) / std::max(std::abs(analytic), 1e-300);
            triple_worst = std::max(triple_worst, rel);
        }
        worst = std::max(worst, triple_worst);
        const bool ok = triple_worst < 1e-6;
        r.passed = r.passed && ok;
        r.details.push_back({{"alpha", g.alpha},
                             {"desired_distance", g.desired_distance},
                             {"min_distance", g.min_distance},
                             {"samples", kGradientSamples},
                             {"worst_relative_error", triple_worst},
                             {"ok", ok}});
    }
    r.summary = "worst relative error " + fmt_double(worst) + " (bound 1e-6)";
    return r;
}

SuiteResult verify_force_suite(std::uint64_t seed) {
    SuiteResult r{"force", true, {}, nlohmann::json::array()};
    Scenario s = golden_scenario();
    for (auto& g : s.edge_gains) g.damping = 0.0;

    std::vector<Eigen::MatrixXd> positions{s.initial_q};
    for (std::size_t t = 0; t < 4; ++t) positions.push_back(sample_safe_positions(s, seed, t));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    double worst = 0.0;
    for (const Eigen::MatrixXd& q : positions) {
        Eigen::MatrixXd p(q.rows(), q.cols());
        for (Eigen::Index i = 0; i < p.size(); ++i) p(i) = normal(rng);
        const Eigen::MatrixXd u = formation_input(SystemState{q, p, 0.0}, s.agent_params, s.graph, s.edge_gains, s.safety);

        Eigen::MatrixXd reference(q.rows(), q.cols());
        for (Eigen::Index i = 0; i < q.rows(); ++i)
            for (Eigen::Index c = 0; c < q.cols(); ++c) {
                const double h = 1e-6 * std::max(1.0, std::abs(q(i, c)));
                Eigen::MatrixXd plus = q, minus = q;
                plus(i, c) += h;
                minus(i, c) -= h;
                reference(i, c) = -0.5 * (total_barrier(plus, s) - total_barrier(minus, s)) / (2.0 * h);
            }
        const double floor = 1e-3 * reference.cwiseAbs().maxCoeff();
        double state_worst = 0.0;
        for (Eigen::Index i = 0; i < u.size(); ++i)
            state_worst = std::max(state_worst, std::abs(u(i) - reference(i)) / std::max(std::abs(reference(i)), floor));
        worst = std::max(worst, state_worst);
        const bool ok = state_worst < 1e-5;
        r.passed = r.passed && ok;
        r.details.push_back({{"worst_relative_error", state_worst}, {"ok", ok}});
    }
    r.summary = std::to_string(positions.size()) + " states, worst relative error " + fmt_double(worst) +
                " (bound 1e-5)";
    return r;
}

SuiteResult verify_order_suite() {
    SuiteResult r{"order", false, {}, {}};
    const Scenario s = golden_scenario();
    constexpr double kBaseStep = 1e-2;
    const Eigen::VectorXd coarse = final_state(s, kBaseStep, 1.0);
    const Eigen::VectorXd mid = final_state(s, kBaseStep / 2, 1.0);
    const Eigen::VectorXd fine = final_state(s, kBaseStep / 4, 1.0);
    const double d1 = (coarse - mid).cwiseAbs().maxCoeff();
    const double d2 = (mid - fine).cwiseAbs().maxCoeff();
    const double ratio = d1 / d2;
    r.passed = ratio >= 12.0;
    r.summary = "contraction " + fmt_double(ratio) + " (observed order " + fmt_double(std::log2(ratio)) +
                ", need >= 12)";
    r.details = {{"base_dt", kBaseStep}, {"diff_dt", d1}, {"diff_half_dt", d2}, {"ratio", ratio}};
    return r;
}

SuiteResult verify_energy_suite() {
    SuiteResult r{"energy", false, {}, {}};
    const Scenario s = golden_scenario();
    const RunResult res = run(s);
    const RunReport& rep = res.report;
    r.passed = rep.energy_monotone_violations == 0 && !rep.collision;
    r.summary = std::to_string(rep.energy_monotone_violations) + " H^F rises above " +
                fmt_double(s.metrics.energy_tol) + " over " + std::to_string(rep.samples_checked) +
                " steps, min distance " + fmt_double(rep.min_distance_overall) + " m";
    r.details = {{"violations", rep.energy_monotone_violations},
                 {"worst_increase", rep.worst_energy_increase},
                 {"steps", rep.samples_checked},
                 {"min_distance", rep.min_distance_overall},
                 {"final_hamiltonian", rep.final_hamiltonian}};
    return r;
}

SuiteResult verify_sweep_suite(std::size_t trials, std::uint64_t seed) {
    SuiteResult r{"sweep", true, {}, nlohmann::json::array()};
    std::ostringstream summary;
    for (const char* name : {"sweep_triangle", "sweep_square"}) {
        const Scenario s = load_scenario(*bundled_scenario_text(name));
        const SweepReport rep = randomized_safety_sweep(s, trials, seed);
        const std::size_t needed = (trials * 9 + 9) / 10;  // 18 of 20
        const bool ok = rep.collisions == 0 && rep.aborted == 0 && rep.converged >= needed;
        r.passed = r.passed && ok;
        r.details.push_back({{"scenario", name},
                             {"agents", s.agents},
                             {"trials", rep.trials},
                             {"collisions", rep.collisions},
                             {"aborted", rep.aborted},
                             {"converged", rep.converged},
                             {"min_distance", rep.min_distance},
                             {"ok", ok}});
        summary << (summary.tellp() > 0 ? "; " : "") << "N=" << s.agents << ": " << rep.collisions
                << " collisions, " << rep.converged << "/" << rep.trials << " converged";
    }
    r.summary = summary.str();
    return r;
}

}  // namespace phform
