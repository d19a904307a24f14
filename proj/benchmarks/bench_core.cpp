// Throughput of the hot loops: transforms, drift evaluation, full steps.

#include <benchmark/benchmark.h>

#include <utility>
#include <vector>

#include "sllg/brownian.hpp"
#include "sllg/config.hpp"
#include "sllg/integrator.hpp"
#include "sllg/llg.hpp"
#include "sllg/spectral.hpp"

namespace {

sllg::Config config_1d(int n) {
  sllg::Config cfg;
  cfg.domain.dim = 1;
  cfg.domain.n = n;
  return cfg;
}

sllg::Config config_2d(int n) {
  sllg::Config cfg;
  cfg.domain.dim = 2;
  cfg.domain.n = n;
  return cfg;
}

void bench_analyze(benchmark::State& state, const sllg::Config& cfg) {
  const sllg::DomainPtr dom = sllg::make_domain(cfg);
  const sllg::GridField g = sllg::synthesize(sllg::make_initial(cfg, dom));
  sllg::SpectralField u = sllg::SpectralField::zeros(dom);
  std::vector<double> ws;
  for (auto _ : state) {
    sllg::analyze_into(g, u, ws);
    benchmark::DoNotOptimize(u.c.data());
  }
}

void bench_synthesize(benchmark::State& state, const sllg::Config& cfg) {
  const sllg::DomainPtr dom = sllg::make_domain(cfg);
  const sllg::SpectralField u = sllg::make_initial(cfg, dom);
  sllg::GridField g = sllg::GridField::zeros(dom);
  std::vector<double> ws;
  for (auto _ : state) {
    sllg::synthesize_into(u, g, ws);
    benchmark::DoNotOptimize(g.v.data());
  }
}

void bench_drift(benchmark::State& state, const sllg::Config& cfg) {
  const sllg::DomainPtr dom = sllg::make_domain(cfg);
  const sllg::SpectralField u = sllg::make_initial(cfg, dom);
  const sllg::GridField h = sllg::make_h(cfg, dom);
  const sllg::PhysParams p = sllg::make_params(cfg);
  sllg::LlgScratch s;
  sllg::SpectralField out = sllg::SpectralField::zeros(dom);
  for (auto _ : state) {
    sllg::drift_stratonovich_into(u, h, p, out, s);
    benchmark::DoNotOptimize(out.c.data());
  }
}

void bench_step(benchmark::State& state, const sllg::Config& cfg,
                sllg::Scheme scheme) {
  const sllg::DomainPtr dom = sllg::make_domain(cfg);
  const sllg::SpectralField u0 = sllg::make_initial(cfg, dom);
  const sllg::GridField h = sllg::make_h(cfg, dom);
  const sllg::PhysParams p = sllg::make_params(cfg);
  const sllg::SchemeConfig sc;
  const double dt = 1e-3;
  sllg::SpectralField u = u0;
  long k = 0;
  for (auto _ : state) {
    const double dw = ((k++ % 7) - 3) * 1e-2;
    sllg::SpectralField next = scheme == sllg::Scheme::heun
                                   ? sllg::step_heun(u, h, p, dt, dw)
                                   : sllg::step_midpoint(u, h, p, dt, dw, sc);
    benchmark::DoNotOptimize(next.c.data());
    u = std::move(next);
    // keep the state bounded: restart from u0 rather than letting the
    // deterministic drive wander
    if (k % 64 == 0) u = u0;
  }
}

}  // namespace

BENCHMARK_CAPTURE(bench_analyze, n32_1d, config_1d(32));
BENCHMARK_CAPTURE(bench_analyze, n16_2d, config_2d(16));
BENCHMARK_CAPTURE(bench_synthesize, n32_1d, config_1d(32));
BENCHMARK_CAPTURE(bench_synthesize, n16_2d, config_2d(16));
BENCHMARK_CAPTURE(bench_drift, n32_1d, config_1d(32));
BENCHMARK_CAPTURE(bench_drift, n16_2d, config_2d(16));
BENCHMARK_CAPTURE(bench_step, heun_n32_1d, config_1d(32), sllg::Scheme::heun);
BENCHMARK_CAPTURE(bench_step, midpoint_n32_1d, config_1d(32),
                  sllg::Scheme::midpoint);
BENCHMARK_CAPTURE(bench_step, midpoint_n8_2d, config_2d(8),
                  sllg::Scheme::midpoint);

BENCHMARK_MAIN();
