#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>

namespace primerace {

struct OrthantEstimate {
  enum class Method { ClosedForm, MonteCarlo };
  double value = 0.0;
  double std_error = 0.0;
  long long sample_count = 0;
  Method method = Method::ClosedForm;
};

std::string method_name(OrthantEstimate::Method m);

double std_normal_cdf(double x);
double std_normal_quantile(double p);

// P(Z1 <= 0, Z2 <= 0) for unit-variance Z with correlation rho.
double bvn_orthant_zero(double rho);
// P(Z1 <= h, Z2 <= k), unit variances, correlation rho (Owen's T reduction).
double bvn_cdf(double h, double k, double rho);

struct MvnOptions {
  long long samples = 1LL << 17;  // points per shift
  int shifts = 16;
  std::uint64_t seed = 0;
  bool force_mc = false;
  bool parallel = true;
};

// P(Z <= x) for Z ~ N(0, Sigma). Closed forms for r <= 2 unless force_mc;
// otherwise Genz's sequential conditioning over a digitally shifted Sobol net.
OrthantEstimate mvn_cdf(std::span<const double> x, const Eigen::MatrixXd& Sigma, const MvnOptions& opt = {});
OrthantEstimate mvn_cdf(std::span<const double> x, const Eigen::MatrixXd& Sigma, long long samples, std::uint64_t seed);

// F_r(0; Sigma_r(rho))
OrthantEstimate w_r(int r, double rho, const MvnOptions& opt = {});

// Digital-net generator exposed for tests and benchmarks.
class SobolNet {
 public:
  static constexpr int kMaxDim = 21;
  explicit SobolNet(int dim);
  int dim() const { return dim_; }
  // Raw 32-bit coordinates of point index (gray-code order).
  void point_bits(std::uint64_t index, std::span<std::uint32_t> out) const;
  // Advance from the point at index-1 (gray-code order) to index.
  void next_bits(std::uint64_t index, std::span<std::uint32_t> inout) const;

 private:
  int dim_;
  std::uint32_t v_[kMaxDim][32];
};

}  // namespace primerace
