#pragma once

#include <Eigen/Dense>

#include <map>
#include <memory>
#include <vector>

#include "primerace/field.hpp"
#include "primerace/group.hpp"
#include "primerace/zeros.hpp"

namespace primerace {

struct RaceSpec {
  std::shared_ptr<const FieldModel> field;
  std::vector<int> classes;  // element indices C_1, ..., C_{r+1}
  ZeroSumMode mode;
  std::shared_ptr<const ZeroArchive> archive;
  std::map<int, int> central_orders;  // character index -> ord_{s=1/2} L(s, chi)
};

struct CovarianceReport {
  Eigen::MatrixXd Delta;
  double lambda_min = 0.0;
  Eigen::VectorXd B;
  Eigen::VectorXd V;
  Eigen::VectorXd E;
  double t_hat_inf = 0.0;
};

// Precomputed zero sums and r_G for a spec; all statistics derive from it.
class RaceContext {
 public:
  explicit RaceContext(RaceSpec spec);

  const RaceSpec& spec() const { return spec_; }
  const FieldModel& field() const { return *spec_.field; }
  const AbelianGroup& group() const { return spec_.field->group(); }
  const std::vector<double>& weights() const { return w_; }
  double n_l() const { return n_l_; }
  int r() const { return static_cast<int>(spec_.classes.size()) - 1; }

  // t_i = t_{C_i, C_{i+1}}
  std::vector<RaceFunction> t_vector() const;
  std::vector<cplx> t_hat(const RaceFunction& t) const;

  double mean_E(const RaceFunction& t) const;
  double mean_E(const ClassFunction& t) const;
  double variance_V(const RaceFunction& t) const;
  double variance_V(const ClassFunction& t) const;
  double covariance(const RaceFunction& t1, const RaceFunction& t2) const;
  double bias_B(const RaceFunction& t) const;
  double correlation_rho(const RaceFunction& t1, const RaceFunction& t2) const;

  // U(a) for every element; U(identity) = 1.
  const std::vector<double>& u_map() const { return u_; }
  double U(int a) const { return u_[a]; }
  double S(int a, int b) const;
  double T(int a, int b) const;
  double rho_adjacent_closed_form(int a, int b, int c) const;
  double rho_closed_form(int a, int b, int c, int d) const;

  CovarianceReport covariance_matrix() const;

 private:
  double mean_from_hat(const std::vector<cplx>& hat, double r_pairing) const;
  double variance_from_hat(const std::vector<cplx>& hat) const;

  RaceSpec spec_;
  std::vector<double> w_;
  double n_l_ = 0.0;
  std::vector<int> r_counts_;
  std::vector<double> u_;
};

double mean_E(const RaceSpec& spec, const RaceFunction& t);
double variance_V(const RaceSpec& spec, const RaceFunction& t);
double bias_B(const RaceSpec& spec, const RaceFunction& t);
std::vector<double> u_map(const RaceSpec& spec);
double correlation_rho(const RaceSpec& spec, const RaceFunction& t1, const RaceFunction& t2);
CovarianceReport covariance_matrix(const RaceSpec& spec);

struct StructuredMatrices {
  Eigen::MatrixXd Gamma;
  Eigen::MatrixXd Sigma;
  double det_closed_form = 0.0;
};

StructuredMatrices structured_matrices(int r, double rho);

double min_eigenvalue(const Eigen::MatrixXd& symmetric);

}  // namespace primerace
