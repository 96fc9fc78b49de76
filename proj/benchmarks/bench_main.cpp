#include <benchmark/benchmark.h>

#include "levymix/coupling.hpp"
#include "levymix/estimators.hpp"

using namespace levymix;

namespace {

LevyConfig noise_cfg(double alpha, int D) {
  LevyConfig cfg;
  cfg.alpha = alpha;
  cfg.D = D;
  cfg.K = 1.0;
  cfg.eps_small = alpha >= 1.5 ? 1e-3 : 0.05;
  return cfg;
}

ModelConfig ref_model() {
  ModelConfig m;
  m.levy = noise_cfg(1.5, 8);
  m.levy.eps_small = 0.05;
  m.spectrum = build_example_spectrum(1, 16);
  m.spectrum.D = 8;
  m.nonlinearity = Nonlinearity::mode_tanh(0.1, 1.0, {}, 16);
  m.T_refractory = 1.0;
  m.dt = 1e-3;
  m.verification.p = 0.75;
  return m;
}

void BM_BigJump(benchmark::State& state) {
  const LevyConfig cfg = noise_cfg(1.5, static_cast<int>(state.range(0)));
  RngStream rng(1, "bench", 0);
  std::vector<double> out(cfg.D);
  for (auto _ : state) {
    sample_big_jump_into(cfg, rng, out.data());
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_BigJump)->Arg(1)->Arg(8);

void BM_BandIncrement(benchmark::State& state) {
  // the alpha = 1.5, eps = 1e-3 band is the hottest loop in the crosscheck
  const LevyConfig cfg = noise_cfg(1.5, 1);
  SmallIncrementSampler sampler(cfg);
  RngStream rng(2, "bench", 0);
  double out = 0.0;
  const double dt = state.range(0) * 1e-4;
  for (auto _ : state) {
    out = 0.0;
    sampler.add(dt, rng, &out);
    benchmark::DoNotOptimize(out);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<long>(sampler.band_rate() * dt));
}
BENCHMARK(BM_BandIncrement)->Arg(10)->Arg(100);

void BM_MaximalCouplingDraw(benchmark::State& state) {
  const LevyConfig cfg = noise_cfg(1.5, 8);
  RngStream rng(3, "bench", 0);
  std::vector<double> cx(8, 0.0), cy(8, 0.0);
  cy[0] = 1e-3 * state.range(0);
  for (auto _ : state) {
    auto r = maximal_coupling_draw(cx, cy, cfg, rng);
    benchmark::DoNotOptimize(r.coupled);
  }
}
BENCHMARK(BM_MaximalCouplingDraw)->Arg(1)->Arg(1000);

void BM_CoupledChainStep(benchmark::State& state) {
  const ModelConfig m = ref_model();
  State x{std::vector<double>(16, 0.0), 0.0};
  State y = x;
  y.coeffs[0] = 1.0;
  std::uint64_t r = 0;
  for (auto _ : state) {
    RngStream shared(4, "bench.s", r), couple(4, "bench.c", r);
    ++r;
    auto chain = run_coupled_chain(x, y, m, 1, shared, couple);
    benchmark::DoNotOptimize(chain.record.pair_dist[0]);
  }
}
BENCHMARK(BM_CoupledChainStep);

void BM_TvQuadrature(benchmark::State& state) {
  const LevyConfig cfg = noise_cfg(1.5, 1);
  for (auto _ : state) {
    auto tv = tv_overlap_separation(cfg, 0.5, TVMethod::quadrature);
    benchmark::DoNotOptimize(tv.value);
  }
}
BENCHMARK(BM_TvQuadrature);

void BM_TvSpherical(benchmark::State& state) {
  const LevyConfig cfg = noise_cfg(1.5, 8);
  for (auto _ : state) {
    auto tv = tv_overlap_separation(cfg, 0.5, TVMethod::spherical_reduction);
    benchmark::DoNotOptimize(tv.value);
  }
}
BENCHMARK(BM_TvSpherical);

}  // namespace

BENCHMARK_MAIN();
