#include "primerace/race.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <set>

#include "primerace/errors.hpp"

namespace primerace {

namespace {
const std::string kModule = "race_core";
constexpr double kImagTol = 1e-9;
constexpr double kDegenerate = 1e-10;
}  // namespace

RaceContext::RaceContext(RaceSpec spec) : spec_(std::move(spec)) {
  if (!spec_.field) throw ValidationError(kModule, "race spec has no field");
  const auto& G = group();
  if (spec_.classes.size() < 2) throw ValidationError(kModule, "a race needs at least two classes");
  std::set<int> seen;
  for (int c : spec_.classes) {
    if (c < 0 || c >= G.order()) throw ValidationError(kModule, "class index out of range");
    if (!seen.insert(c).second) throw ValidationError(kModule, "race classes must be pairwise distinct");
  }
  for (auto [chi, ord] : spec_.central_orders) {
    if (chi <= 0 || chi >= G.order())
      throw ValidationError(kModule, "central orders are defined only on nontrivial characters");
    if (ord < 0) throw ValidationError(kModule, "central orders must be nonnegative");
  }
  if (spec_.mode.kind == ZeroSumMode::Kind::ZeroData && !spec_.archive)
    throw ValidationError(kModule, "zero-data mode needs an archive");
  if (spec_.mode.kind == ZeroSumMode::Kind::Asymptotic && spec_.archive)
    throw ValidationError(kModule, "asymptotic mode takes no archive");
  w_ = zero_weights(field(), spec_.archive.get(), spec_.mode);
  n_l_ = 0.0;
  for (std::size_t chi = 1; chi < w_.size(); ++chi) n_l_ += w_[chi];
  r_counts_ = G.square_root_counts();
  u_.assign(G.order(), 0.0);
  for (int a = 0; a < G.order(); ++a) {
    double s = 0.0;
    for (int chi = 1; chi < G.order(); ++chi) s += G.character_value(chi, a).real() * w_[chi];
    u_[a] = n_l_ > 0.0 ? s / n_l_ : 0.0;
  }
  u_[0] = 1.0;
}

std::vector<RaceFunction> RaceContext::t_vector() const {
  std::vector<RaceFunction> ts;
  for (std::size_t i = 0; i + 1 < spec_.classes.size(); ++i)
    ts.push_back(race_class_function(group(), spec_.classes[i], spec_.classes[i + 1]));
  return ts;
}

std::vector<cplx> RaceContext::t_hat(const RaceFunction& t) const {
  const auto& G = group();
  std::vector<cplx> hat(G.order());
  for (int chi = 0; chi < G.order(); ++chi) hat[chi] = fourier_coefficient(G, t, chi);
  return hat;
}

double RaceContext::mean_from_hat(const std::vector<cplx>& hat, double r_pairing) const {
  cplx s{};
  for (auto [chi, ord] : spec_.central_orders) s += hat[chi] * static_cast<double>(ord);
  if (std::abs(s.imag()) > kImagTol)
    throw ValidationError(kModule, "central orders give a non-real mean; conjugate characters need equal orders");
  return -r_pairing - s.real();
}

double RaceContext::mean_E(const RaceFunction& t) const {
  const auto& G = group();
  if (static_cast<int>(t.values.size()) != G.order()) throw ValidationError(kModule, "class function domain mismatch");
  std::int64_t total = 0, rp = 0;
  for (int x = 0; x < G.order(); ++x) total += t.values[x], rp += t.values[x] * r_counts_[x];
  if (total != 0) throw ValidationError(kModule, "<t,1> must vanish");
  // rp / |G| is an integer combination for t_{a,b}; keep the exact quotient when possible
  const double r_pairing = rp % G.order() == 0 ? static_cast<double>(rp / G.order())
                                               : static_cast<double>(rp) / G.order();
  if (spec_.central_orders.empty()) return -r_pairing;
  return mean_from_hat(t_hat(t), r_pairing);
}

double RaceContext::mean_E(const ClassFunction& t) const {
  const auto& G = group();
  const cplx mean = inner_product(G, t, constant_function(G, 1.0));
  if (std::abs(mean) > kImagTol) throw ValidationError(kModule, "<t,1> must vanish");
  ClassFunction rg;
  for (int c : r_counts_) rg.values.emplace_back(c, 0.0);
  const cplx rp = inner_product(G, t, rg);
  if (std::abs(rp.imag()) > kImagTol) throw ValidationError(kModule, "<t, r_G> is not real");
  std::vector<cplx> hat(G.order());
  for (auto [chi, ord] : spec_.central_orders) hat[chi] = fourier_coefficient(G, t, chi);
  return mean_from_hat(hat, rp.real());
}

double RaceContext::variance_from_hat(const std::vector<cplx>& hat) const {
  double v = 0.0;
  for (std::size_t chi = 1; chi < hat.size(); ++chi) v += std::norm(hat[chi]) * w_[chi];
  return v;
}

double RaceContext::variance_V(const RaceFunction& t) const { return variance_from_hat(t_hat(t)); }

double RaceContext::variance_V(const ClassFunction& t) const {
  const auto& G = group();
  std::vector<cplx> hat(G.order());
  for (int chi = 1; chi < G.order(); ++chi) hat[chi] = fourier_coefficient(G, t, chi);
  return variance_from_hat(hat);
}

double RaceContext::covariance(const RaceFunction& t1, const RaceFunction& t2) const {
  const auto h1 = t_hat(t1), h2 = t_hat(t2);
  double c = 0.0;
  for (std::size_t chi = 1; chi < h1.size(); ++chi) c += (h1[chi] * std::conj(h2[chi])).real() * w_[chi];
  return c;
}

double RaceContext::bias_B(const RaceFunction& t) const {
  const double V = variance_V(t);
  if (!(V > 0.0)) throw ComputationError(kModule, "zero variance");
  return mean_E(t) / std::sqrt(V);
}

double RaceContext::correlation_rho(const RaceFunction& t1, const RaceFunction& t2) const {
  const double v1 = variance_V(t1), v2 = variance_V(t2);
  if (!(v1 > 0.0 && v2 > 0.0)) throw ComputationError(kModule, "zero variance");
  return covariance(t1, t2) / std::sqrt(v1 * v2);
}

double RaceContext::S(int a, int b) const {
  if (a == 0 || b == 0) throw ValidationError(kModule, "S is defined on non-identity elements");
  return u_[a] - u_[b];
}

double RaceContext::T(int a, int b) const {
  const auto& G = group();
  return 2.0 - 2.0 * u_[G.multiply(a, G.inverse(b))];
}

double RaceContext::rho_closed_form(int a, int b, int c, int d) const {
  const auto& G = group();
  auto Uq = [&](int x, int y) { return u_[G.multiply(x, G.inverse(y))]; };
  const double num = Uq(a, c) - Uq(a, d) - Uq(b, c) + Uq(b, d);
  return num / std::sqrt(T(a, b) * T(c, d));
}

double RaceContext::rho_adjacent_closed_form(int a, int b, int c) const {
  const auto& G = group();
  auto Uq = [&](int x, int y) { return u_[G.multiply(x, G.inverse(y))]; };
  const double uab = Uq(a, b), ubc = Uq(b, c), uac = Uq(a, c);
  return (-1.0 + uab + ubc - uac) / std::sqrt((2.0 - 2.0 * uab) * (2.0 - 2.0 * ubc));
}

CovarianceReport RaceContext::covariance_matrix() const {
  const int r = this->r();
  const auto ts = t_vector();
  std::vector<std::vector<cplx>> hats;
  for (const auto& t : ts) hats.push_back(t_hat(t));
  CovarianceReport rep;
  rep.V.resize(r);
  rep.E.resize(r);
  rep.B.resize(r);
  rep.Delta.resize(r, r);
  for (int i = 0; i < r; ++i) {
    rep.V[i] = variance_from_hat(hats[i]);
    if (!(rep.V[i] > 0.0)) throw ComputationError(kModule, "zero variance for t_" + std::to_string(i + 1));
    rep.E[i] = mean_E(ts[i]);
    rep.B[i] = rep.E[i] / std::sqrt(rep.V[i]);
    for (std::size_t chi = 1; chi < hats[i].size(); ++chi) rep.t_hat_inf = std::max(rep.t_hat_inf, std::abs(hats[i][chi]));
  }
  for (int i = 0; i < r; ++i) {
    rep.Delta(i, i) = 1.0;
    for (int j = i + 1; j < r; ++j) {
      double c = 0.0;
      for (std::size_t chi = 1; chi < hats[i].size(); ++chi) c += (hats[i][chi] * std::conj(hats[j][chi])).real() * w_[chi];
      rep.Delta(i, j) = rep.Delta(j, i) = c / std::sqrt(rep.V[i] * rep.V[j]);
    }
  }
  rep.lambda_min = min_eigenvalue(rep.Delta);
  if (rep.lambda_min <= kDegenerate)
    throw ComputationError(kModule, "covariance matrix is numerically degenerate (lambda_min = " +
                                        std::to_string(rep.lambda_min) + ")");
  return rep;
}

double min_eigenvalue(const Eigen::MatrixXd& symmetric) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw ComputationError(kModule, "eigen-solve failed");
  return es.eigenvalues().minCoeff();
}

double mean_E(const RaceSpec& spec, const RaceFunction& t) { return RaceContext(spec).mean_E(t); }
double variance_V(const RaceSpec& spec, const RaceFunction& t) { return RaceContext(spec).variance_V(t); }
double bias_B(const RaceSpec& spec, const RaceFunction& t) { return RaceContext(spec).bias_B(t); }
std::vector<double> u_map(const RaceSpec& spec) { return RaceContext(spec).u_map(); }
double correlation_rho(const RaceSpec& spec, const RaceFunction& t1, const RaceFunction& t2) {
  return RaceContext(spec).correlation_rho(t1, t2);
}
CovarianceReport covariance_matrix(const RaceSpec& spec) { return RaceContext(spec).covariance_matrix(); }

StructuredMatrices structured_matrices(int r, double rho) {
  if (r < 1) throw ValidationError(kModule, "structured matrices need r >= 1");
  StructuredMatrices m;
  m.Gamma = Eigen::MatrixXd::Identity(r, r);
  for (int i = 0; i + 1 < r; ++i) m.Gamma(i, i + 1) = m.Gamma(i + 1, i) = -0.5;
  m.Sigma = m.Gamma;
  if (r >= 2) m.Sigma(0, 1) = m.Sigma(1, 0) = rho;
  m.det_closed_form = (r - 2.0 * (r - 1) * rho * rho) / std::ldexp(1.0, r - 1);
  return m;
}

}  // namespace primerace
