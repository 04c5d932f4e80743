#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "primerace/race.hpp"

namespace primerace {

struct SimConfig {
  double height = 100.0;
  long long samples = 1000000;
  std::uint64_t seed = 0;
  bool parallel = true;
};

// Row-major samples x r.
struct SampleMatrix {
  int r = 0;
  long long rows = 0;
  std::vector<double> data;
  double operator()(long long i, int j) const { return data[i * r + j]; }
  std::span<const double> row(long long i) const { return {data.data() + i * r, static_cast<std::size_t>(r)}; }
};

// X_i = E(t_i) + sum_{chi != 1} sum_{0 < gamma <= T} 2 Re(<t_i,chi> e^{i theta}) / sqrt(1/4 + gamma^2)
// with one uniform phase per (chi, gamma) shared across coordinates.
SampleMatrix sample_mu(const RaceContext& ctx, const SimConfig& cfg);

// Fluctuations W_g of the class indicators 1_g (samples x |G|), drawn from the
// same phase stream as sample_mu, so X_i = E(t_i) + sum_g t_i(g) W_g.
SampleMatrix sample_class_fluctuations(const FieldModel& field, const ZeroArchive& archive, const SimConfig& cfg);
SampleMatrix race_samples(const RaceContext& ctx, const SampleMatrix& fluctuations);

struct EmpiricalDelta {
  double value = 0.0;
  double std_error = 0.0;
};

EmpiricalDelta empirical_delta(const SampleMatrix& samples);

struct EmpiricalCF {
  std::complex<double> value;
  double std_error = 0.0;
};

// (1/n) sum exp(-i <x, X>)
EmpiricalCF empirical_cf(const SampleMatrix& samples, std::span<const double> x);

// e^{-i<E,x>} prod_{chi,gamma <= T} J_0(2 |sum_i x_i <t_i,chi>| / sqrt(1/4 + gamma^2))
std::complex<double> truncated_cf(const RaceContext& ctx, double height, std::span<const double> x);

}  // namespace primerace
