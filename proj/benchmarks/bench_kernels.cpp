#include <benchmark/benchmark.h>

#include <cmath>

#include "fput2d/ansatz.hpp"
#include "fput2d/lattice.hpp"
#include "fput2d/nls.hpp"

using namespace fput2d;

namespace {

LatticeState wavy_displacement(std::size_t n) {
  LatticeState s = LatticeState::displacement(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) s.q(i, j) = 0.3 * std::sin(0.7 * double(i) + 1.3 * double(j));
  return s;
}

void BM_RhsDisplacement(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const LatticeState s = wavy_displacement(n);
  const ForceLaw f = ForceLaw::cubic();
  for (auto _ : st) benchmark::DoNotOptimize(rhs_displacement(s, f));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n * n));
}
BENCHMARK(BM_RhsDisplacement)->Arg(200)->Arg(400);

void BM_RhsStrain(benchmark::State& st) {
  const auto n = static_cast<std::size_t>(st.range(0));
  const LatticeState s = LatticeState::strain_from_displacement(wavy_displacement(n));
  const ForceLaw f = ForceLaw::cubic();
  for (auto _ : st) benchmark::DoNotOptimize(rhs_strain(s, f));
  st.SetItemsProcessed(st.iterations() * static_cast<long>(n * n));
}
BENCHMARK(BM_RhsStrain)->Arg(400);

void BM_VerletStep(benchmark::State& st) {
  LatticeState s = wavy_displacement(400);
  VerletIntegrator integ(ForceLaw::cubic(), 0.025);
  for (auto _ : st) integ.advance(s, 1);
}
BENCHMARK(BM_VerletStep);

void BM_StrangStep(benchmark::State& st) {
  const auto m = static_cast<std::size_t>(st.range(0));
  const DispersionData d = nls_coefficients({kPi / 2, kPi / 2});
  NlsSolver solver(m, 40.0, NlsProblem::from_dispersion(d, EnvelopeVariant::strain_u, 1e-3));
  EnvelopeField f = gaussian_envelope(m, 40.0, EnvelopeVariant::strain_u, 1.0, 4.0);
  for (auto _ : st) solver.strang_step(f);
}
BENCHMARK(BM_StrangStep)->Arg(128)->Arg(256);

void BM_Resample(benchmark::State& st) {
  const std::size_t n = 400;
  const double eps = 0.1;
  EnvelopeResampler r(256, eps * double(n), n, eps);
  const EnvelopeField f = gaussian_envelope(256, eps * double(n), EnvelopeVariant::strain_u, 1.0, 4.0);
  for (auto _ : st) benchmark::DoNotOptimize(r.resample(f.a, 3.5, 3.5));
}
BENCHMARK(BM_Resample);

void BM_AnsatzSample(benchmark::State& st) {
  const double eps = 0.1;
  const std::size_t n = 400;
  AnsatzBuilder b(nls_coefficients({kPi / 2, kPi / 2}), eps, n);
  const EnvelopeField f = gaussian_envelope(256, eps * double(n), EnvelopeVariant::strain_u, 1.0, 4.0);
  for (auto _ : st) benchmark::DoNotOptimize(b.sample(f, 0.0, LatticeForm::strain));
}
BENCHMARK(BM_AnsatzSample);

}  // namespace

BENCHMARK_MAIN();
