#include "primerace/density.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

const std::string kModule = "density";

double min_variance(const CovarianceReport& rep) { return rep.V.minCoeff(); }

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

RaceSpec with_classes(const RaceSpec& spec, std::vector<int> classes) {
  RaceSpec s = spec;
  s.classes = std::move(classes);
  return s;
}

}  // namespace

std::string formula_name(DensityEstimate::Formula f) {
  switch (f) {
    case DensityEstimate::Formula::TwoWay: return "two-way";
    case DensityEstimate::Formula::ThreeWay: return "three-way";
    default: return "r-way";
  }
}

double error_diagnostic(const CovarianceReport& rep, int r) {
  const double V = min_variance(rep);
  const double t = rep.t_hat_inf;
  if (r == 1) return t / std::sqrt(V) + std::pow(t, 4) / (V * V);
  const double lam = rep.lambda_min;
  return (std::pow(t, 4.0 * r) / std::pow(V, 2.0 * r) + t / std::sqrt(V)) * (1.0 + 1.0 / lam + std::pow(lam, -r));
}

DensityEstimate delta_two_way(const RaceContext& ctx) {
  if (ctx.r() != 1) throw ValidationError(kModule, "two-way density needs exactly 2 classes");
  DensityEstimate d;
  d.report = ctx.covariance_matrix();
  d.value = std_normal_cdf(-d.report.B[0]);
  d.formula = DensityEstimate::Formula::TwoWay;
  d.error_diagnostic = error_diagnostic(d.report, 1);
  return d;
}

DensityEstimate delta_three_way(const RaceContext& ctx) {
  if (ctx.r() != 2) throw ValidationError(kModule, "three-way density needs exactly 3 classes");
  DensityEstimate d;
  d.report = ctx.covariance_matrix();
  const double rho = d.report.Delta(0, 1);
  d.value = 0.25 + std::asin(rho) / (2.0 * std::numbers::pi) -
            (d.report.B[0] + d.report.B[1]) / (2.0 * std::sqrt(2.0 * std::numbers::pi));
  d.formula = DensityEstimate::Formula::ThreeWay;
  d.error_diagnostic = error_diagnostic(d.report, 2);
  const double ld = log_discriminant(ctx.field());
  d.log_disc_term = ld > 0.0 ? 1.0 / std::sqrt(ld) : 0.0;
  return d;
}

DensityEstimate delta_r_way(const RaceContext& ctx, const MvnOptions& opt) {
  if (ctx.r() < 2) return delta_two_way(ctx);
  DensityEstimate d;
  d.report = ctx.covariance_matrix();
  const int r = ctx.r();
  std::vector<double> x(r);
  for (int i = 0; i < r; ++i) x[i] = -d.report.B[i];
  const auto est = mvn_cdf(x, d.report.Delta, opt);
  d.value = est.value;
  d.std_error = est.std_error;
  d.method = est.method;
  d.sample_count = est.sample_count;
  d.formula = DensityEstimate::Formula::RWay;
  d.error_diagnostic = error_diagnostic(d.report, r);
  return d;
}

DensityEstimate delta_two_way(const RaceSpec& spec) { return delta_two_way(RaceContext(spec)); }
DensityEstimate delta_three_way(const RaceSpec& spec) { return delta_three_way(RaceContext(spec)); }
DensityEstimate delta_r_way(const RaceSpec& spec, const MvnOptions& opt) { return delta_r_way(RaceContext(spec), opt); }

Residual decomposition_check(const RaceSpec& spec, int extra, const MvnOptions& opt) {
  if (std::find(spec.classes.begin(), spec.classes.end(), extra) != spec.classes.end())
    throw ValidationError(kModule, "extra class must differ from the race classes");
  MvnOptions o = opt;
  o.seed = derive_seed(opt.seed, 0);
  const auto base = delta_r_way(spec, o);
  Residual res{base.value, 0.0};
  double var = base.std_error * base.std_error;
  const int r = static_cast<int>(spec.classes.size());
  for (int pos = 0; pos <= r; ++pos) {
    auto cls = spec.classes;
    cls.insert(cls.begin() + pos, extra);
    o.seed = derive_seed(opt.seed, pos + 1);
    const auto d = delta_r_way(with_classes(spec, cls), o);
    res.residual -= d.value;
    var += d.std_error * d.std_error;
  }
  res.std_error = std::sqrt(var);
  return res;
}

Residual permutation_sum_check(const RaceSpec& spec, const MvnOptions& opt) {
  auto cls = spec.classes;
  std::sort(cls.begin(), cls.end());
  Residual res{-1.0, 0.0};
  double var = 0.0;
  std::uint64_t k = 0;
  do {
    MvnOptions o = opt;
    o.seed = derive_seed(opt.seed, k++);
    const auto d = delta_r_way(with_classes(spec, cls), o);
    res.residual += d.value;
    var += d.std_error * d.std_error;
  } while (std::next_permutation(cls.begin(), cls.end()));
  res.std_error = std::sqrt(var);
  return res;
}

}  // namespace primerace
