// Microbenchmarks for the hot paths: the three integrator dispatches, the
// steady-state solve, phase-space analysis and the spectrum FFT. Run with
// --benchmark_filter=... to narrow.

#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "spinlock/effective.hpp"
#include "spinlock/labframe.hpp"
#include "spinlock/lindblad.hpp"
#include "spinlock/phase_space.hpp"
#include "spinlock/quantum.hpp"
#include "spinlock/sync.hpp"
#include "spinlock/units.hpp"

namespace {

using namespace spinlock;

const RateSet kRates{from_khz(1.27), from_khz(7.33), from_khz(4.42)};
const DriveParams kDrive{from_khz(2.37), 0.0, std::numbers::pi / 2};

// 1000 RK4 steps over 200 us, endpoints only. Marks the per-step cost of
// each dispatch; items processed = steps.
void run_steps(benchmark::State& state, const OpenSystemModel& model,
               bool prefer_bloch) {
  IntegrateOptions options;
  options.store_states = false;
  options.prefer_bloch_path = prefer_bloch;
  options.sample_stride = 1 << 30;
  const DensityMatrix rho0 = rho_from_bloch({0.0, 0.0, 1.0});
  for (auto _ : state) {
    const Trajectory traj = integrate(model, rho0, {0.0, 200e-6}, 0.2e-6,
                                      options);
    benchmark::DoNotOptimize(traj.bloch.back());
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}

void BM_IntegrateSuperop(benchmark::State& state) {
  run_steps(state, build_rotating_model(kRates, kDrive), false);
}
BENCHMARK(BM_IntegrateSuperop);

void BM_IntegrateBloch(benchmark::State& state) {
  run_steps(state, build_rotating_model(kRates, kDrive), true);
}
BENCHMARK(BM_IntegrateBloch);

void BM_IntegrateMatrix(benchmark::State& state) {
  // A callback Hamiltonian disables the precomputed Liouvillian and forces
  // the generic matrix stepper.
  const OpenSystemModel static_model = build_rotating_model(kRates, kDrive);
  const ComplexMatrix h = static_model.hamiltonian(0.0);
  const OpenSystemModel model(2, [h](double) { return h; },
                              static_model.terms());
  run_steps(state, model, false);
}
BENCHMARK(BM_IntegrateMatrix);

void BM_SteadyState(benchmark::State& state) {
  const OpenSystemModel model = build_rotating_model(kRates, kDrive);
  for (auto _ : state) {
    benchmark::DoNotOptimize(steady_state(model));
  }
}
BENCHMARK(BM_SteadyState);

void BM_SyncAnalytics(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sync_analytics(kRates, kDrive));
  }
}
BENCHMARK(BM_SyncAnalytics);

void BM_QGrid(benchmark::State& state) {
  const DensityMatrix rho = steady_state(build_rotating_model(kRates, kDrive));
  for (auto _ : state) {
    benchmark::DoNotOptimize(grid_normalization(q_grid(rho)));
  }
}
BENCHMARK(BM_QGrid);

void BM_SProfileFit(benchmark::State& state) {
  const DensityMatrix rho = steady_state(build_rotating_model(kRates, kDrive));
  for (auto _ : state) {
    benchmark::DoNotOptimize(fit_s_profile(s_profile(rho, 721)));
  }
}
BENCHMARK(BM_SProfileFit);

// Window sizes matching the entrainment analysis: a power of two and the
// awkward prime-rich length the real 1.7 ms window produces.
void BM_PowerSpectrum(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> series(n);
  for (std::size_t i = 0; i < n; ++i) {
    series[i] = std::cos(0.05 * static_cast<double>(i));
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(power_spectrum(series, 2e-9).peak_freq_hz);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n));
}
BENCHMARK(BM_PowerSpectrum)->Arg(1 << 19)->Arg(850001);

void BM_EffectiveReduction(benchmark::State& state) {
  const YbLevelScheme scheme =
      yb_calibrated_scheme(kRates.gamma_g(), kRates.gamma_d());
  for (auto _ : state) {
    benchmark::DoNotOptimize(yb_reduce(scheme).rates.gamma_g());
  }
}
BENCHMARK(BM_EffectiveReduction);

}  // namespace

BENCHMARK_MAIN();
