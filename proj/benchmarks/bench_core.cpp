#include "moclab/euler_lower_bound.hpp"
#include "moclab/families.hpp"
#include "moclab/forward_map.hpp"
#include "moclab/inverse_map.hpp"
#include "moclab/moc.hpp"
#include "moclab/vorticity_recovery.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

using namespace moclab;

static void BM_MuFromTheta(benchmark::State& state)
{
    const LpProfile prof = family::theta(static_cast<int>(state.range(0)));
    const Moc mu = mu_from_theta(prof, num::log_grid(1e-12, 1e-3, 2));
    double x = 1e-9;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mu(x));
        x *= 1.0001;  // defeat caching
    }
}
BENCHMARK(BM_MuFromTheta)->Arg(0)->Arg(1)->Arg(2);

static void BM_GammaOde(benchmark::State& state)
{
    const Moc mu = family::mu(1);
    for (auto _ : state)
        benchmark::DoNotOptimize(gamma_r_from_mu(mu, 0.5, 50.0));
}
BENCHMARK(BM_GammaOde);

static void BM_ThetaFromMu(benchmark::State& state)
{
    const Moc mu = family::mu(2);
    const auto ps = num::log_grid(1e2, 1e5, static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(theta_from_mu(mu, ps).log_theta.back());
}
BENCHMARK(BM_ThetaFromMu)->Arg(4)->Arg(16);

static void BM_Diagnose(benchmark::State& state)
{
    DiagnosticsOptions opts;
    opts.per_decade = static_cast<int>(state.range(0));
    const Moc mu = family::mu(1);
    for (auto _ : state)
        benchmark::DoNotOptimize(diagnose(mu, opts).dini_finite);
}
BENCHMARK(BM_Diagnose)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_Mellin(benchmark::State& state)
{
    const DistributionProfile d = recover_rho(family::phi(1), 50.0);
    const double p = static_cast<double>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(mellin_forward(d, p).log_theta);
}
BENCHMARK(BM_Mellin)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_BiotSavart2D(benchmark::State& state)
{
    const SquareSymmetricVorticity w = indicator_square(1.0);
    const double x = std::pow(10.0, -static_cast<double>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(biot_savart_axis(w, x).value);
}
BENCHMARK(BM_BiotSavart2D)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

static void BM_BiotSavartShells(benchmark::State& state)
{
    const SquareSymmetricVorticity w = indicator_square(1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(biot_savart_axis_shells(w, 1e-4));
}
BENCHMARK(BM_BiotSavartShells);

static void BM_LpNormSingular(benchmark::State& state)
{
    const double p = static_cast<double>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(lp_norm_singular(2, p).norm);
}
BENCHMARK(BM_LpNormSingular)->Arg(50)->Arg(400);
BENCHMARK_MAIN();
