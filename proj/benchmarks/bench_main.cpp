#include <benchmark/benchmark.h>

#include <cmath>

#include "isirate/bounds.hpp"
#include "isirate/channel.hpp"
#include "isirate/equalizer.hpp"
#include "isirate/highsnr.hpp"
#include "isirate/rate_sim.hpp"
#include "isirate/scalar.hpp"

using namespace isirate;

namespace {

const ChannelResponse kChannelB({0.408, 0.817, 0.408});
const ChannelResponse kJeong({0.19, 0.35, 0.46, 0.5, 0.46, 0.35, 0.19});

void BM_MutualInfo(benchmark::State& state)
{
    const auto x = make_trinary(0.1);
    double g = 0.5;
    for (auto _ : state) {
        benchmark::DoNotOptimize(mutual_info(x, g));
        g = g < 40.0 ? g * 1.01 : 0.5;
    }
}
BENCHMARK(BM_MutualInfo);

void BM_SpectralSummary(benchmark::State& state)
{
    for (auto _ : state)
        benchmark::DoNotOptimize(spectral_summary(kJeong, 3.0));
}
BENCHMARK(BM_SpectralSummary);

void BM_DfeDesign(benchmark::State& state)
{
    const double rho = std::pow(10.0, static_cast<double>(state.range(0)) / 10.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(design_mmse_dfe(kChannelB, make_bpsk(), rho));
}
BENCHMARK(BM_DfeDesign)->Arg(-20)->Arg(0)->Arg(10);

void BM_MmseExact(benchmark::State& state)
{
    const auto x = make_skewed_binary(0.002);
    const auto d = design_mmse_dfe(kChannelB, x, std::pow(10.0, -1.4));
    for (auto _ : state)
        benchmark::DoNotOptimize(i_mmse_exact(d, x));
}
BENCHMARK(BM_MmseExact)->Unit(benchmark::kMillisecond);

void BM_MmseMonteCarlo(benchmark::State& state)
{
    const auto d = design_mmse_dfe(kJeong, make_bpsk(), 1.0);
    McOptions opt;
    opt.threads = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(i_mmse_mc(d, make_bpsk(), 20000, 1, opt));
    state.SetItemsProcessed(state.iterations() * 20000);
}
BENCHMARK(BM_MmseMonteCarlo)->Unit(benchmark::kMillisecond);

void BM_ForwardRecursion(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    SimOptions opt;
    opt.threads = 1;
    for (auto _ : state)
        benchmark::DoNotOptimize(estimate_rate(kChannelB, make_bpsk(), 2.0, n, 1, 1, opt));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ForwardRecursion)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_DeltaMin(benchmark::State& state)
{
    const auto h = kJeong.normalized();
    for (auto _ : state)
        benchmark::DoNotOptimize(delta_min_sq(h, make_bpsk()));
}
BENCHMARK(BM_DeltaMin)->Unit(benchmark::kMillisecond);

} // namespace
BENCHMARK_MAIN();
