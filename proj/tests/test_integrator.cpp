#include <doctest.h>

#include <cmath>
#include <numbers>

#include "phform/integrator.hpp"
#include "phform/scenario.hpp"

using namespace phform;

namespace {

ControlLaw two_agent_law(ControllerKind kind, double alpha) {
    AgentParams a;
    a.mass = 1.0;
    a.dissipation = Eigen::Matrix2d::Zero();
    VelocityTrackingGains vg{Eigen::Vector2d::Zero(), std::vector<Eigen::MatrixXd>(2, Eigen::Matrix2d::Zero())};
    const std::vector<EdgeGains> gains{EdgeGains{alpha, 4.0, 0.0}};
    return ControlLaw(kind, build_tournament_graph(2), {a, a}, vg, gains, gains, SafetyParams{1.0});
}

// Two agents 3 m apart closing at 20 m/s relative speed.
SystemState head_on() {
    SystemState s{Eigen::MatrixXd(2, 2), Eigen::MatrixXd(2, 2), 0.0};
    s.q << 0, 0, 3, 0;
    s.p << 10, 0, -10, 0;
    return s;
}

}  // namespace

TEST_CASE("rk4 is exact for a constant field") {
    const VectorField f = [](double, const Eigen::VectorXd& x) { return Eigen::VectorXd::Constant(x.size(), 2.0); };
    const Eigen::VectorXd x = rk4_step(f, 0.0, Eigen::Vector2d(1.0, -1.0), 0.25);
    CHECK(x(0) == doctest::Approx(1.5).epsilon(1e-15));
    CHECK(x(1) == doctest::Approx(-0.5).epsilon(1e-15));
}

TEST_CASE("rk4 reproduces the fourth-order Taylor polynomial on x' = x") {
    const VectorField f = [](double, const Eigen::VectorXd& x) { return x; };
    const Eigen::VectorXd x = rk4_step(f, 0.0, Eigen::VectorXd::Ones(1), 0.1);
    const double h = 0.1;
    CHECK(x(0) == doctest::Approx(1.0 + h + h * h / 2 + h * h * h / 6 + h * h * h * h / 24).epsilon(1e-15));
}

TEST_CASE("rk4 uses the stage times") {
    const VectorField f = [](double t, const Eigen::VectorXd&) { return Eigen::VectorXd::Constant(1, 3.0 * t * t); };
    // Simpson's rule integrates t^3 exactly.
    CHECK(rk4_step(f, 1.0, Eigen::VectorXd::Zero(1), 1.0)(0) == doctest::Approx(7.0).epsilon(1e-15));
}

TEST_CASE("harmonic oscillator returns after one period") {
    const VectorField f = [](double, const Eigen::VectorXd& x) { return Eigen::Vector2d(x(1), -x(0)); };
    const int n = 1000;
    const double dt = 2.0 * std::numbers::pi / n;
    Eigen::VectorXd x = Eigen::Vector2d(1.0, 0.0);
    for (int k = 0; k < n; ++k) x = rk4_step(f, k * dt, x, dt);
    CHECK((x - Eigen::Vector2d(1.0, 0.0)).norm() < 1e-9);
}

TEST_CASE("global error contracts sixteenfold per halving") {
    const VectorField f = [](double, const Eigen::VectorXd& x) { return x; };
    auto error = [&](int n) {
        Eigen::VectorXd x = Eigen::VectorXd::Ones(1);
        for (int k = 0; k < n; ++k) x = rk4_step(f, k / double(n), x, 1.0 / n);
        return std::abs(x(0) - std::exp(1.0));
    };
    const double ratio = error(20) / error(40);
    CHECK(ratio > 15.0);
    CHECK(ratio < 17.0);
}

TEST_CASE("state packing round-trips") {
    SystemState s{Eigen::MatrixXd::Random(4, 3), Eigen::MatrixXd::Random(4, 3), 2.5};
    const Eigen::VectorXd x = pack_state(s);
    CHECK(x.size() == 24);
    CHECK(x(1) == s.q(0, 1));
    CHECK(x(3) == s.q(1, 0));
    CHECK(x(12) == s.p(0, 0));
    const SystemState back = unpack_state(x, 4, 3, 2.5);
    CHECK(back.q == s.q);
    CHECK(back.p == s.p);
    CHECK_THROWS_AS(unpack_state(x, 3, 3, 0.0), std::invalid_argument);
}

TEST_CASE("integrator configuration") {
    IntegratorConfig c;
    c.dt = 1e-3;
    c.t_end = 1.0;
    CHECK(c.step_count() == 1000);
    CHECK(c.effective_log_stride() == 1);
    c.t_end = 100.0;
    CHECK(c.step_count() == 100000);
    CHECK(c.effective_log_stride() == 10);
    c.log_stride = 7;
    CHECK(c.effective_log_stride() == 7);
    c.dt = 0.3;
    c.t_end = 1.0;
    CHECK(c.step_count() == 4);
    for (auto bad : {IntegratorConfig{0.0}, IntegratorConfig{-1.0}, IntegratorConfig{1e-3, 0.0},
                     IntegratorConfig{1e-3, 1.0, 0.0}, IntegratorConfig{1e-3, 1.0, 1e-6, 0}})
        CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("integration samples the base grid") {
    const Scenario s = golden_scenario();
    IntegratorConfig cfg = s.integrator;
    cfg.t_end = 0.5;
    std::vector<double> observed;
    const TrajectoryLog log = integrate(s.initial_state(), s.control_law(), cfg,
                                        [&](const SystemState& x) { observed.push_back(x.t); });
    CHECK(observed.size() == 501);
    CHECK(log.size() == 501);
    CHECK(log.times.front() == 0.0);
    CHECK(log.times.back() == 0.5);
    for (std::size_t i = 1; i < log.size(); ++i) {
        CHECK(log.times[i] > log.times[i - 1]);
        CHECK(log.times[i] == doctest::Approx(i * 1e-3).epsilon(1e-12));
    }
    CHECK(log.states.size() == log.size());
    CHECK(log.inputs.size() == log.size());
    CHECK(log.edge_errors.size() == log.size());
    CHECK(log.edge_distances.size() == log.size());
    CHECK(log.energies.size() == log.size());
    CHECK(log.momentum_errors.size() == log.size());

    cfg.t_end = 0.05;
    cfg.log_stride = 20;
    const TrajectoryLog sparse = integrate(s.initial_state(), s.control_law(), cfg);
    REQUIRE(sparse.size() == 4);
    CHECK(sparse.times[1] == doctest::Approx(0.02));
    CHECK(sparse.times[3] == doctest::Approx(0.05));
}

TEST_CASE("integration is deterministic") {
    const Scenario s = golden_scenario();
    IntegratorConfig cfg = s.integrator;
    cfg.t_end = 2.0;
    const TrajectoryLog a = integrate(s.initial_state(), s.control_law(), cfg);
    const TrajectoryLog b = integrate(s.initial_state(), s.control_law(), cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a.states[i].q == b.states[i].q);
        CHECK(a.states[i].p == b.states[i].p);
    }
}

TEST_CASE("the guard keeps every step inside the safe set") {
    const ControlLaw law = two_agent_law(ControllerKind::proposed, 5.0);
    IntegratorConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 1.0;
    double min_a = 1e300;
    std::size_t calls = 0;
    integrate(head_on(), law, cfg, [&](const SystemState& x) {
        ++calls;
        min_a = std::min(min_a, min_barrier_argument(x.q, law.graph(), law.safety()));
    });
    CHECK(calls == 21);
    CHECK(min_a >= cfg.guard_margin);
    CHECK(min_a < 1.0);
}

TEST_CASE("the guard aborts when halving cannot recover") {
    const ControlLaw law = two_agent_law(ControllerKind::proposed, 5.0);
    IntegratorConfig cfg;
    cfg.dt = 0.5;
    cfg.t_end = 1.0;
    cfg.max_halvings = 1;
    try {
        integrate(head_on(), law, cfg);
        FAIL("expected SimulationAbort");
    } catch (const SimulationAbort& e) {
        CHECK(e.edge() == 0);
        CHECK(e.time() == 0.0);
    }
}

TEST_CASE("the baseline law is not guarded") {
    const ControlLaw law = two_agent_law(ControllerKind::baseline, 0.0001);
    IntegratorConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 0.5;
    const TrajectoryLog log = integrate(head_on(), law, cfg);
    double dmin = 1e300;
    for (const auto& s : log.states) dmin = std::min(dmin, min_pairwise_distance(s.q));
    CHECK(dmin < 1.0);
}

TEST_CASE("non-finite initial states are rejected") {
    SystemState s = head_on();
    s.p(0, 0) = std::nan("");
    CHECK_THROWS_AS(integrate(s, two_agent_law(ControllerKind::none, 1.0), IntegratorConfig{}), std::invalid_argument);
}
