#include "primerace/gaussian.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/owens_t.hpp>

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "primerace/errors.hpp"
#include "primerace/race.hpp"

namespace primerace {

namespace {

const std::string kModule = "gaussian";

// Joe-Kuo direction numbers (dimensions 2..21): degree s, polynomial a, initial m_k.
struct Direction {
  int s;
  unsigned a;
  std::array<unsigned, 7> m;
};
constexpr Direction kDirections[] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
};

constexpr long long kBlock = 8192;

struct GenzProblem {
  int r;
  Eigen::MatrixXd L;
  std::vector<double> b;
};

double genz_integrand(const GenzProblem& P, const double* u, double* y) {
  double e = std_normal_cdf(P.b[0] / P.L(0, 0));
  double f = e;
  for (int i = 1; i < P.r && f > 0.0; ++i) {
    const double p = std::clamp(u[i - 1] * e, 1e-300, 1.0 - 1e-16);
    y[i - 1] = std_normal_quantile(p);
    double s = 0.0;
    for (int j = 0; j < i; ++j) s += P.L(i, j) * y[j];
    e = std_normal_cdf((P.b[i] - s) / P.L(i, i));
    f *= e;
  }
  return f;
}

double block_sum(const GenzProblem& P, const SobolNet& net, const std::uint32_t* shift, long long start,
                 long long count) {
  std::array<std::uint32_t, SobolNet::kMaxDim> bits{};
  std::array<double, SobolNet::kMaxDim> u{}, y{};
  const int d = net.dim();
  const std::span<std::uint32_t> bs(bits.data(), d);
  net.point_bits(start, bs);
  double sum = 0.0;
  for (long long i = start; i < start + count; ++i) {
    if (i > start) net.next_bits(i, bs);
    for (int k = 0; k < d; ++k) u[k] = (static_cast<double>(bits[k] ^ shift[k]) + 0.5) * 0x1p-32;
    sum += genz_integrand(P, u.data(), y.data());
  }
  return sum;
}

}  // namespace

std::string method_name(OrthantEstimate::Method m) {
  return m == OrthantEstimate::Method::ClosedForm ? "closed-form" : "mc";
}

SobolNet::SobolNet(int dim) : dim_(dim) {
  if (dim < 1 || dim > kMaxDim) throw ValidationError(kModule, "Sobol dimension must be in [1, 21]");
  for (int k = 0; k < 32; ++k) v_[0][k] = 1u << (31 - k);
  for (int d = 1; d < dim; ++d) {
    const auto& D = kDirections[d - 1];
    const int s = D.s;
    for (int k = 0; k < std::min(s, 32); ++k) v_[d][k] = D.m[k] << (31 - k);
    for (int k = s; k < 32; ++k) {
      std::uint32_t v = v_[d][k - s] ^ (v_[d][k - s] >> s);
      for (int l = 1; l < s; ++l)
        if ((D.a >> (s - 1 - l)) & 1u) v ^= v_[d][k - l];
      v_[d][k] = v;
    }
  }
}

void SobolNet::point_bits(std::uint64_t index, std::span<std::uint32_t> out) const {
  const std::uint64_t g = index ^ (index >> 1);
  for (int d = 0; d < dim_; ++d) {
    std::uint32_t x = 0;
    for (int k = 0; k < 32; ++k)
      if ((g >> k) & 1u) x ^= v_[d][k];
    out[d] = x;
  }
}

void SobolNet::next_bits(std::uint64_t index, std::span<std::uint32_t> inout) const {
  const int k = std::countr_zero(index);
  for (int d = 0; d < dim_; ++d) inout[d] ^= v_[d][k];
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw ValidationError(kModule, "quantile needs 0 < p < 1");
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
}

double bvn_orthant_zero(double rho) {
  if (!(std::abs(rho) < 1.0)) throw ValidationError(kModule, "|rho| must be < 1");
  return 0.25 + std::asin(rho) / (2.0 * std::numbers::pi);
}

double bvn_cdf(double h, double k, double rho) {
  if (!(std::abs(rho) < 1.0)) throw ValidationError(kModule, "|rho| must be < 1");
  if (std::isnan(h) || std::isnan(k)) throw ValidationError(kModule, "NaN threshold");
  if (h == 0.0 && k == 0.0) return bvn_orthant_zero(rho);
  const double s = std::sqrt(1.0 - rho * rho);
  auto T = [&](double x, double y) {
    if (x == 0.0) return y > 0.0 ? 0.25 : (y < 0.0 ? -0.25 : 0.0);
    return boost::math::owens_t(x, (y - rho * x) / (x * s));
  };
  const double beta = (h * k < 0.0 || (h * k == 0.0 && h + k < 0.0)) ? 0.5 : 0.0;
  const double v = 0.5 * (std_normal_cdf(h) + std_normal_cdf(k)) - T(h, k) - T(k, h) - beta;
  return std::clamp(v, 0.0, 1.0);
}

OrthantEstimate mvn_cdf(std::span<const double> x, const Eigen::MatrixXd& Sigma, const MvnOptions& opt) {
  const int r = static_cast<int>(x.size());
  if (r < 1) throw ValidationError(kModule, "empty threshold vector");
  if (Sigma.rows() != r || Sigma.cols() != r) throw ValidationError(kModule, "Sigma shape does not match x");
  for (double xi : x)
    if (std::isnan(xi)) throw ValidationError(kModule, "NaN threshold");
  if (!Sigma.allFinite()) throw ValidationError(kModule, "Sigma has non-finite entries");
  if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12) throw ValidationError(kModule, "Sigma not symmetric");
  Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
  if (llt.info() != Eigen::Success) throw ValidationError(kModule, "Cholesky factorization failed (Sigma not positive-definite)");

  OrthantEstimate est;
  if (!opt.force_mc && r <= 2) {
    est.method = OrthantEstimate::Method::ClosedForm;
    if (r == 1) {
      est.value = std_normal_cdf(x[0] / std::sqrt(Sigma(0, 0)));
    } else {
      const double s0 = std::sqrt(Sigma(0, 0)), s1 = std::sqrt(Sigma(1, 1));
      const double rho = Sigma(0, 1) / (s0 * s1);
      est.value = (x[0] == 0.0 && x[1] == 0.0) ? bvn_orthant_zero(rho) : bvn_cdf(x[0] / s0, x[1] / s1, rho);
    }
    return est;
  }
  if (opt.samples < 10000) throw ValidationError(kModule, "samples must be >= 10^4");
  if (opt.shifts < 2) throw ValidationError(kModule, "at least two random shifts are needed");
  if (r - 1 > SobolNet::kMaxDim) throw ValidationError(kModule, "dimension too large for the Sobol net");

  GenzProblem P{r, llt.matrixL(), std::vector<double>(x.begin(), x.end())};
  est.method = OrthantEstimate::Method::MonteCarlo;
  est.sample_count = opt.samples * opt.shifts;
  if (r == 1) {
    est.value = std_normal_cdf(P.b[0] / P.L(0, 0));
    return est;
  }
  const SobolNet net(r - 1);
  std::mt19937_64 rng(opt.seed);
  std::vector<std::uint32_t> shifts(static_cast<std::size_t>(opt.shifts) * (r - 1));
  for (auto& s : shifts) s = static_cast<std::uint32_t>(rng() >> 32);

  const long long nblocks = (opt.samples + kBlock - 1) / kBlock;
  const long long tasks = nblocks * opt.shifts;
  std::vector<double> partial(tasks);
  auto run = [&](long long t) {
    const long long sh = t / nblocks, blk = t % nblocks;
    const long long start = blk * kBlock;
    const long long count = std::min(kBlock, opt.samples - start);
    partial[t] = block_sum(P, net, shifts.data() + sh * (r - 1), start, count);
  };
  if (opt.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long t = 0; t < tasks; ++t) run(t);
  } else {
    for (long long t = 0; t < tasks; ++t) run(t);
  }
  std::vector<double> means(opt.shifts, 0.0);
  for (long long t = 0; t < tasks; ++t) means[t / nblocks] += partial[t];
  double mean = 0.0;
  for (auto& m : means) mean += (m /= static_cast<double>(opt.samples));
  mean /= opt.shifts;
  double ss = 0.0;
  for (double m : means) ss += (m - mean) * (m - mean);
  est.value = mean;
  est.std_error = std::sqrt(ss / (opt.shifts * (opt.shifts - 1.0)));
  return est;
}

OrthantEstimate mvn_cdf(std::span<const double> x, const Eigen::MatrixXd& Sigma, long long samples, std::uint64_t seed) {
  MvnOptions opt;
  opt.samples = samples;
  opt.seed = seed;
  return mvn_cdf(x, Sigma, opt);
}

OrthantEstimate w_r(int r, double rho, const MvnOptions& opt) {
  if (r < 2) throw ValidationError(kModule, "W_r needs r >= 2");
  if (!(std::abs(rho) <= std::numbers::sqrt2 / 2.0 + 1e-12))
    throw ValidationError(kModule, "rho outside the positive-definite window |rho| <= 1/sqrt(2)");
  const auto m = structured_matrices(r, rho);
  const std::vector<double> zero(r, 0.0);
  return mvn_cdf(zero, m.Sigma, opt);
}

}  // namespace primerace
