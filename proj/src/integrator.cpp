#include "phform/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace phform {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

std::string abort_message(std::size_t edge, double time, double a) {
    std::ostringstream os;
    os << "step size underflow at t=" << time << " s: edge " << edge + 1 << " barrier argument " << a;
    return os.str();
}

// Thrown inside a trial step when a stage leaves the guarded region.
struct GuardTrip {
    std::size_t edge;
    double a;
};

struct Guard {
    const FormationGraph* graph = nullptr;
    double ds2 = 0.0;
    double margin = 0.0;
    std::size_t agents = 0;
    Eigen::Index dimension = 0;

    bool active() const { return graph != nullptr; }

    // Smallest barrier argument along the straight segment from `from` to
    // `to`, so agents cannot pass through each other between two states.
    void check(const Eigen::VectorXd& from, const Eigen::VectorXd& to) const {
        const auto n = static_cast<Eigen::Index>(agents);
        Eigen::Map<const RowMajor> q0(from.data(), n, dimension);
        Eigen::Map<const RowMajor> q1(to.data(), n, dimension);
        const auto& edges = graph->edges();
        for (std::size_t k = 0; k < edges.size(); ++k) {
            const auto t = static_cast<Eigen::Index>(edges[k].tail);
            const auto h = static_cast<Eigen::Index>(edges[k].head);
            double r0r0 = 0.0, r0dr = 0.0, drdr = 0.0;
            for (Eigen::Index c = 0; c < dimension; ++c) {
                const double r0 = q0(t, c) - q0(h, c);
                const double dr = q1(t, c) - q1(h, c) - r0;
                r0r0 += r0 * r0;
                r0dr += r0 * dr;
                drdr += dr * dr;
            }
            const double s = drdr > 0.0 ? std::clamp(-r0dr / drdr, 0.0, 1.0) : 0.0;
            const double a = r0r0 + 2.0 * s * r0dr + s * s * drdr - ds2;
            if (!(a >= margin)) throw GuardTrip{k, a};
        }
    }
};

}  // namespace

SimulationAbort::SimulationAbort(std::size_t edge, double time, double barrier_argument)
    : std::runtime_error(abort_message(edge, time, barrier_argument)), edge_(edge), time_(time) {}

std::size_t IntegratorConfig::effective_log_stride() const {
    if (log_stride > 0) return log_stride;
    return t_end <= 10.0 ? 1 : 10;
}

std::size_t IntegratorConfig::step_count() const {
    return static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
}

void IntegratorConfig::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("integrator.dt must be positive");
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("integrator.t_end must be positive");
    if (!(guard_margin > 0.0)) throw std::invalid_argument("integrator.guard_margin must be positive");
    if (max_halvings < 1) throw std::invalid_argument("integrator.max_halvings must be positive");
}

Eigen::VectorXd rk4_step(const VectorField& field, double t, const Eigen::VectorXd& x, double dt) {
    const Eigen::VectorXd k1 = field(t, x);
    const Eigen::VectorXd k2 = field(t + 0.5 * dt, x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = field(t + 0.5 * dt, x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = field(t + dt, x + dt * k3);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Eigen::VectorXd pack_state(const SystemState& state) {
    const Eigen::Index count = state.q.size();
    Eigen::VectorXd x(2 * count);
    Eigen::Map<RowMajor>(x.data(), state.q.rows(), state.q.cols()) = state.q;
    Eigen::Map<RowMajor>(x.data() + count, state.p.rows(), state.p.cols()) = state.p;
    return x;
}

SystemState unpack_state(const Eigen::VectorXd& x, std::size_t agents, Eigen::Index dimension, double t) {
    const auto rows = static_cast<Eigen::Index>(agents);
    const Eigen::Index count = rows * dimension;
    if (x.size() != 2 * count) throw std::invalid_argument("packed state has the wrong length");
    SystemState s;
    s.q = Eigen::Map<const RowMajor>(x.data(), rows, dimension);
    s.p = Eigen::Map<const RowMajor>(x.data() + count, rows, dimension);
    s.t = t;
    return s;
}

VectorField closed_loop_field(const ControlLaw& law, std::size_t agents, Eigen::Index dimension) {
    return [&law, agents, dimension](double t, const Eigen::VectorXd& x) {
        const SystemState s = unpack_state(x, agents, dimension, t);
        const StateRate rate = open_loop_vector_field(s, law.params(), law.input(s));
        SystemState packed{rate.dq, rate.dp, t};
        return pack_state(packed);
    };
}

TrajectoryLog integrate(const SystemState& initial, const ControlLaw& law, const IntegratorConfig& config,
                        const StepObserver& observer) {
    config.validate();
    if (!initial.finite()) throw std::invalid_argument("initial state is not finite");

    const std::size_t agents = initial.agents();
    const Eigen::Index dim = initial.dimension();
    const VectorField raw = closed_loop_field(law, agents, dim);

    Guard guard;
    if (law.uses_barrier()) {
        guard.graph = &law.graph();
        guard.ds2 = law.safety().min_distance * law.safety().min_distance;
        guard.margin = config.guard_margin;
        guard.agents = agents;
        guard.dimension = dim;
    }
    Eigen::VectorXd x = pack_state(initial);
    const VectorField field = [&](double t, const Eigen::VectorXd& stage) {
        if (guard.active()) guard.check(x, stage);
        return raw(t, stage);
    };

    const std::size_t steps = config.step_count();
    const std::size_t stride = config.effective_log_stride();
    const double t0 = initial.t;
    const double t_final = t0 + config.t_end;
    const double min_step = config.dt * std::ldexp(1.0, -config.max_halvings);

    TrajectoryLog log;
    SystemState current = initial;
    log.record(current, law);
    if (observer) observer(current);

    double t = t0;
    double h = config.dt;
    for (std::size_t m = 1; m <= steps; ++m) {
        const double target = m == steps ? t_final : t0 + static_cast<double>(m) * config.dt;
        while (t < target) {
            const double step = std::min(h, target - t);
            try {
                Eigen::VectorXd next = rk4_step(field, t, x, step);
                if (guard.active()) guard.check(x, next);
                if (!next.allFinite()) throw std::runtime_error("state diverged to non-finite values");
                x = std::move(next);
                t = (step == target - t) ? target : t + step;
                h = std::min(2.0 * h, config.dt);
            } catch (const GuardTrip& trip) {
                h = 0.5 * step;
                if (h < min_step) throw SimulationAbort(trip.edge, t, trip.a);
            }
        }
        current = unpack_state(x, agents, dim, target);
        if (observer) observer(current);
        if (m % stride == 0 || m == steps) log.record(current, law);
    }
    return log;
}

}  // namespace phform
