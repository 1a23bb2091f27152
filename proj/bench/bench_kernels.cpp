// OpenMP kernels against their serial reference paths.

#include <benchmark/benchmark.h>

#include "territory/asymptotics.hpp"
#include "territory/grid.hpp"
#include "territory/reduced_mc.hpp"
#include "territory/simulation.hpp"

using namespace territory;

namespace {

const DimensionlessSet kSet{0.01, 1.0, 0.1, 0.05, 1.0};

void BM_MsdGrid(benchmark::State& st) {
    const auto p = boundary_from_dimensionless(kSet, GammaMode::Constant);
    const auto w = walker_from_dimensionless(kSet);
    const auto tau = log_grid(1e-3, 1e2, static_cast<std::size_t>(st.range(0)));
    const bool par = st.range(1);
    for (auto _ : st) benchmark::DoNotOptimize(par ? msd_grid(w, p, tau) : msd_grid_serial(w, p, tau));
    st.SetItemsProcessed(st.iterations() * st.range(0));
    st.SetLabel(par ? "openmp" : "serial");
}
BENCHMARK(BM_MsdGrid)->ArgsProduct({{50, 200}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Marginal(benchmark::State& st) {
    const auto p = boundary_from_dimensionless(kSet, GammaMode::Constant);
    const auto w = walker_from_dimensionless(kSet, 0.1);
    std::vector<double> xs;
    for (int i = 0; i < 201; ++i) xs.push_back(-0.6 + 1.2 * i / 200.0);
    const bool par = st.range(0);
    for (auto _ : st) benchmark::DoNotOptimize(par ? marginal_grid(w, p, xs, 1.0) : marginal_grid_serial(w, p, xs, 1.0));
    st.SetLabel(par ? "openmp" : "serial");
}
BENCHMARK(BM_Marginal)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ReducedMc(benchmark::State& st) {
    const auto p = boundary_from_dimensionless(kSet, GammaMode::Constant);
    const auto w = walker_from_dimensionless(kSet, 0.1);
    const std::vector<double> times{0.01, 0.1, 1.0, 10.0, 100.0};
    const bool par = st.range(0);
    for (auto _ : st) benchmark::DoNotOptimize(reduced_model_msd(w, p, times, 100000, 7, par));
    st.SetItemsProcessed(st.iterations() * 100000);
    st.SetLabel(par ? "openmp" : "serial");
}
BENCHMARK(BM_ReducedMc)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_Lattice(benchmark::State& st) {
    sim::SimConfig c;
    c.n_steps = 10000, c.n_realizations = 256, c.record_stride = 1000;
    const bool par = st.range(0);
    for (auto _ : st) benchmark::DoNotOptimize(sim::run_measurement(c, par));
    st.SetItemsProcessed(st.iterations() * c.n_steps * c.n_realizations);
    st.SetLabel(par ? "openmp" : "serial");
}
BENCHMARK(BM_Lattice)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
