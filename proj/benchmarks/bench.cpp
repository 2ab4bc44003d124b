#include <defiers/binary_model.hpp>
#include <defiers/complier_bounds.hpp>
#include <defiers/estimation.hpp>
#include <defiers/inference.hpp>
#include <defiers/regions.hpp>
#include <defiers/simulation.hpp>

#include <benchmark/benchmark.h>

#include <random>

using namespace defiers;

namespace {

ThetaCont random_theta(std::size_t support) {
    std::mt19937_64 rng(3);
    return random_latent_cont(rng, support).theta();
}

MicroSample normal_sample(std::size_t n) {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> z(0.0, 1.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    MicroSample s;
    for (std::size_t i = 0; i < n; ++i) {
        const int zi = u(rng) < 0.5 ? 1 : 0;
        const double g = u(rng);
        const int d = g < 0.5 ? zi : g < 0.55 ? 1 - zi : g < 0.8 ? 1 : 0;
        s.add(z(rng) + 0.5 * d, d, zi);
    }
    return s;
}

void BM_SharpBounds(benchmark::State& state) {
    const ThetaCont th = random_theta(static_cast<std::size_t>(state.range(0)));
    const Interval pdf = pdf_bounds(th);
    const SensitivityPoint s{0.5 * (pdf.lo + pdf.hi), 0.5};
    for (auto _ : state) benchmark::DoNotOptimize(sharp_bounds_F(th, s, 1));
}
BENCHMARK(BM_SharpBounds)->Arg(64)->Arg(512)->Arg(4096);

void BM_RobustRegion(benchmark::State& state) {
    const ThetaCont th = random_theta(512);
    const std::vector<double> grid = default_pi_grid(pdf_bounds(th), static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(robust_region(th, grid, Conclusion{}));
}
BENCHMARK(BM_RobustRegion)->Arg(11)->Arg(81)->Unit(benchmark::kMillisecond);

void BM_BinaryRegions(benchmark::State& state) {
    const ThetaBin tb = reference_bin();
    const std::vector<double> grid = default_pi_grid(pdf_bounds(tb), 81);
    for (auto _ : state) benchmark::DoNotOptimize(binary_regions(tb, grid, 0.0));
}
BENCHMARK(BM_BinaryRegions);

void BM_Kde(benchmark::State& state) {
    const MicroSample s = normal_sample(static_cast<std::size_t>(state.range(0)));
    KdeConfig kde;
    for (auto _ : state) benchmark::DoNotOptimize(estimate_theta_cont(s, kde));
}
BENCHMARK(BM_Kde)->Arg(1000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_SmoothedPhi(benchmark::State& state) {
    const MicroSample s = normal_sample(2000);
    KdeConfig kde;
    kde.grid_points = static_cast<int>(state.range(0));
    const ThetaCont th = estimate_theta_cont(s, kde);
    const SmoothedModel model(th, SmoothingConfig{});
    const Interval pdf = pdf_bounds(th);
    for (auto _ : state) benchmark::DoNotOptimize(model.phi(0.5 * (pdf.lo + pdf.hi), 0.0));
}
BENCHMARK(BM_SmoothedPhi)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_BinaryBootstrap(benchmark::State& state) {
    DgpSpec spec;
    spec.n = 2000;
    const MicroSample s = simulate_dgp(spec);
    BootstrapConfig bc;
    bc.replications = static_cast<int>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(binary_directional_bootstrap(s, 0.0, bc));
}
BENCHMARK(BM_BinaryBootstrap)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
