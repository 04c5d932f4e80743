#include <benchmark/benchmark.h>

#include <memory>

#include "primerace/field.hpp"
#include "primerace/gaussian.hpp"
#include "primerace/primes.hpp"
#include "primerace/race.hpp"
#include "primerace/simulator.hpp"
#include "primerace/zeros.hpp"

using namespace primerace;

namespace {

// arg 0 = serial, 1 = OpenMP
bool parallel(const benchmark::State& st) { return st.range(0) != 0; }

void BM_MvnCdfShifts(benchmark::State& st) {
  const int r = 5;
  Eigen::MatrixXd S = Eigen::MatrixXd::Constant(r, r, 0.5);
  S.diagonal().setOnes();
  const std::vector<double> x(r, 0.0);
  MvnOptions opt;
  opt.samples = 1 << 14;
  opt.shifts = 16;
  opt.seed = 3;
  opt.force_mc = true;
  opt.parallel = parallel(st);
  for (auto _ : st) benchmark::DoNotOptimize(mvn_cdf(x, S, opt).value);
  st.SetItemsProcessed(st.iterations() * opt.samples * opt.shifts);
}
BENCHMARK(BM_MvnCdfShifts)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

struct SimFixture {
  std::shared_ptr<const FieldModel> F = std::make_shared<const FieldModel>(multiquadratic({5, 13}));
  std::shared_ptr<const ZeroArchive> archive = std::make_shared<const ZeroArchive>(compute_archive(*F, 60.0));
  RaceSpec spec() const {
    RaceSpec s;
    s.field = F;
    s.classes = {0, 1, 2};
    s.mode = ZeroSumMode::zero_data();
    s.archive = archive;
    return s;
  }
};

void BM_SampleMu(benchmark::State& st) {
  static const SimFixture fx;
  const RaceContext ctx(fx.spec());
  SimConfig cfg;
  cfg.height = 60.0;
  cfg.samples = 100000;
  cfg.seed = 5;
  cfg.parallel = parallel(st);
  for (auto _ : st) benchmark::DoNotOptimize(sample_mu(ctx, cfg).data.data());
  st.SetItemsProcessed(st.iterations() * cfg.samples);
}
BENCHMARK(BM_SampleMu)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ZeroScan(benchmark::State& st) {
  const RealDirichletL L(real_character_discriminant(13));
  ZeroFinderOptions opt;
  opt.parallel = parallel(st);
  for (auto _ : st) benchmark::DoNotOptimize(find_zeros_real_character(L, 40.0, opt).size());
}
BENCHMARK(BM_ZeroScan)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_NextPrime1Mod4(benchmark::State& st) {
  const BigInt x = (BigInt(1) << 1024) + 12345;
  for (auto _ : st) {
    const BigInt p = parallel(st) ? next_prime_1mod4(x) : next_prime_1mod4_serial(x);
    benchmark::DoNotOptimize(p.get_mpz_t());
  }
}
BENCHMARK(BM_NextPrime1Mod4)->ArgName("parallel")->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
