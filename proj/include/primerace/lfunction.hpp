#pragma once

#include <complex>
#include <cstdint>
#include <vector>

namespace primerace {

using cplx = std::complex<double>;

// Principal branch, continuous on Re z > 0.
cplx log_gamma(cplx z);

// Kronecker symbol (D/n) for n >= 1.
int kronecker(std::int64_t D, std::int64_t n);

bool is_fundamental_discriminant(std::int64_t D);

struct EulerMaclaurinOptions {
  double tolerance = 1e-13;
  // Scales both the head length and the correction order; 2 gives an
  // independent re-evaluation for auditing.
  int order_scale = 1;
};

// zeta(s, x) for 0 < x <= 1, Re s > 0, s != 1.
cplx hurwitz_zeta(cplx s, double x, const EulerMaclaurinOptions& opt = {});

// L(s, (D/.)) for a primitive real character given by its fundamental discriminant.
class RealDirichletL {
 public:
  explicit RealDirichletL(std::int64_t D);

  std::int64_t discriminant() const { return D_; }
  std::int64_t conductor() const { return q_; }
  int parity() const { return parity_; }

  cplx value(cplx s, const EulerMaclaurinOptions& opt = {}) const;
  double theta(double t) const;
  // Real on the critical line: e^{i theta(t)} L(1/2 + i t).
  double hardy_z(double t, const EulerMaclaurinOptions& opt = {}) const;
  // Smooth approximation theta(T)/pi of the number of zeros with 0 < gamma <= T.
  double zero_count_estimate(double T) const;

 private:
  std::int64_t D_;
  std::int64_t q_;
  int parity_;
  std::vector<std::pair<int, int>> support_;  // (a, chi(a)) with chi(a) != 0
};

}  // namespace primerace
