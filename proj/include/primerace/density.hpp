#pragma once

#include <string>

#include "primerace/gaussian.hpp"
#include "primerace/race.hpp"

namespace primerace {

struct DensityEstimate {
  enum class Formula { TwoWay, ThreeWay, RWay };
  double value = 0.0;
  double std_error = 0.0;
  CovarianceReport report;
  // Bracket of the explicit-formula error term with implied constant 1.
  double error_diagnostic = 0.0;
  // 1/sqrt(log d_L), reported beside the three-way closed form.
  double log_disc_term = 0.0;
  Formula formula = Formula::TwoWay;
  OrthantEstimate::Method method = OrthantEstimate::Method::ClosedForm;
  long long sample_count = 0;
};

std::string formula_name(DensityEstimate::Formula f);

double error_diagnostic(const CovarianceReport& rep, int r);

// Density of {x : pi(x; t_i) < 0 for all i}, i.e. of C_1 < C_2 < ... < C_{r+1}.
DensityEstimate delta_two_way(const RaceContext& ctx);
DensityEstimate delta_three_way(const RaceContext& ctx);
DensityEstimate delta_r_way(const RaceContext& ctx, const MvnOptions& opt = {});

DensityEstimate delta_two_way(const RaceSpec& spec);
DensityEstimate delta_three_way(const RaceSpec& spec);
DensityEstimate delta_r_way(const RaceSpec& spec, const MvnOptions& opt = {});

struct Residual {
  double residual = 0.0;
  double std_error = 0.0;
};

// delta(C_1..C_r) - sum over the r+1 insertion positions of delta(.. C ..).
Residual decomposition_check(const RaceSpec& spec, int extra, const MvnOptions& opt = {});

// Sum of delta over all orderings of spec.classes, minus 1.
Residual permutation_sum_check(const RaceSpec& spec, const MvnOptions& opt = {});

}  // namespace primerace
