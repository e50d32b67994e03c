#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <vector>

#include "mfg/argmin.hpp"
#include "mfg/conditions.hpp"
#include "mfg/metrics.hpp"
#include "mfg/operator.hpp"
#include "mfg/quantizer.hpp"

namespace {

mfg::DiscreteMeasure random_measure(std::size_t n, std::mt19937_64& rng) {
    std::exponential_distribution<double> e(1.0);
    std::vector<double> w(n);
    for (double& v : w) v = e(rng);
    return mfg::DiscreteMeasure::renormalized(std::move(w), 1e300);
}

void BM_H1Apply(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const mfg::ModelSpec m = mfg::default_model();
    const mfg::GridGame game(m, mfg::make_grid(n));
    const double gamma = mfg::certify(m).default_gamma;
    mfg::ValueTable V{std::vector<double>(n, 0.1)};
    const auto mu = mfg::DiscreteMeasure::uniform(n);
    for (auto _ : state) benchmark::DoNotOptimize(mfg::h1_apply(game, V, mu, gamma));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_H1Apply)->RangeMultiplier(2)->Range(8, 128)->Complexity();

void BM_W1OneD(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(1);
    const auto g = mfg::make_grid(n);
    const auto a = random_measure(n, rng), b = random_measure(n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(mfg::w1_1d(g, a, b));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_W1OneD)->RangeMultiplier(4)->Range(16, 16384)->Complexity();

void BM_TransportSimplex(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(2);
    const auto g = mfg::make_grid(n);
    const auto cost = mfg::absolute_distance_cost(g);
    const auto a = random_measure(n, rng), b = random_measure(n, rng);
    for (auto _ : state) benchmark::DoNotOptimize(mfg::transport_simplex(cost, a.weights(), b.weights()));
}
BENCHMARK(BM_TransportSimplex)->Arg(8)->Arg(16)->Arg(32);

void BM_BuildQuantized(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const mfg::ModelSpec m = mfg::default_model();
    for (auto _ : state) benchmark::DoNotOptimize(mfg::build_quantized(m, n));
}
BENCHMARK(BM_BuildQuantized)->RangeMultiplier(4)->Range(4, 1024);

void BM_SolveQuantized(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const mfg::ModelSpec m = mfg::default_model();
    const auto qm = mfg::build_quantized(m, n);
    const double gamma = mfg::certify(m).default_gamma;
    for (auto _ : state) benchmark::DoNotOptimize(mfg::solve_quantized(qm, gamma));
}
BENCHMARK(BM_SolveQuantized)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Argmin(benchmark::State& state) {
    double shift = 0.0;
    for (auto _ : state) {
        shift = std::fmod(shift + 0.013, 1.0);
        benchmark::DoNotOptimize(
            mfg::minimize_unimodal([shift](double a) { return std::cosh(a - shift) + 0.1 * a * a; }, 0.0, 1.0));
    }
}
BENCHMARK(BM_Argmin);

}  // namespace

BENCHMARK_MAIN();
