// Serial reference vs OpenMP edge-coupling kernel on tournaments of
// increasing size. Positions sit on a jittered lattice so every pair is
// outside the safety distance.

#include <random>

#include <benchmark/benchmark.h>

#include "phform/controllers.hpp"
#include "phform/graph.hpp"
#include "phform/kernels.hpp"

namespace {

struct Fixture {
    phform::FormationGraph graph;
    std::vector<phform::EdgeGains> gains;
    Eigen::MatrixXd q;
    Eigen::MatrixXd v;

    explicit Fixture(std::size_t agents) : graph(phform::build_tournament_graph(agents)) {
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> jitter(-0.2, 0.2);
        q.resize(static_cast<Eigen::Index>(agents), 2);
        v.resize(static_cast<Eigen::Index>(agents), 2);
        const auto side = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(agents))));
        for (std::size_t i = 0; i < agents; ++i) {
            const auto r = static_cast<Eigen::Index>(i);
            q(r, 0) = 3.0 * static_cast<double>(i % side) + jitter(rng);
            q(r, 1) = 3.0 * static_cast<double>(i / side) + jitter(rng);
            v(r, 0) = jitter(rng);
            v(r, 1) = jitter(rng);
        }
        gains.assign(graph.edge_count(), phform::EdgeGains{5.0, 4.0, 1.0});
    }
};

void BM_CouplingSerial(benchmark::State& state) {
    Fixture f(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto u = phform::kernels::edge_coupling_serial(f.q, f.v, f.graph, f.gains, 1.0,
                                                       phform::kernels::EdgeLaw::barrier);
        benchmark::DoNotOptimize(u.data());
    }
    state.counters["edges"] = static_cast<double>(f.graph.edge_count());
}

void BM_CouplingParallel(benchmark::State& state) {
    Fixture f(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto u = phform::kernels::edge_coupling_parallel(f.q, f.v, f.graph, f.gains, 1.0,
                                                         phform::kernels::EdgeLaw::barrier);
        benchmark::DoNotOptimize(u.data());
    }
    state.counters["edges"] = static_cast<double>(f.graph.edge_count());
}

}  // namespace

BENCHMARK(BM_CouplingSerial)->Arg(3)->Arg(8)->Arg(32)->Arg(128)->Arg(512);
BENCHMARK(BM_CouplingParallel)->Arg(3)->Arg(8)->Arg(32)->Arg(128)->Arg(512);

BENCHMARK_MAIN();
