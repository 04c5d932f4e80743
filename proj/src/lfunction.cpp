#include "primerace/lfunction.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <numeric>

#include "primerace/errors.hpp"
#include "primerace/primes.hpp"

namespace primerace {

namespace {

const std::string kModule = "zeros";
constexpr double kPi = std::numbers::pi;

// B_{2j} / (2j)! for j = 1..kMaxEm, from B_{2j}/(2j)! = (-1)^{j+1} 2 zeta(2j) / (2 pi)^{2j}.
constexpr int kMaxEm = 80;
const std::array<double, kMaxEm + 1>& bernoulli_ratios() {
  static const auto table = [] {
    std::array<double, kMaxEm + 1> b{};
    for (int j = 1; j <= kMaxEm; ++j) {
      double z;
      if (j == 1) {
        z = kPi * kPi / 6.0;
      } else if (j == 2) {
        z = std::pow(kPi, 4) / 90.0;
      } else {
        z = 0.0;
        for (int n = 2000; n >= 1; --n) z += std::pow(static_cast<double>(n), -2.0 * j);
      }
      const double mag = 2.0 * z * std::exp(-2.0 * j * std::log(2.0 * kPi));
      b[j] = (j % 2 == 1) ? mag : -mag;
    }
    return b;
  }();
  return table;
}

}  // namespace

cplx log_gamma(cplx z) {
  if (z.real() <= 0.0) throw ValidationError(kModule, "log_gamma needs Re z > 0");
  constexpr int kShift = 12;
  cplx shift{};
  while (z.real() < kShift) {
    shift += std::log(z);
    z += 1.0;
  }
  // Stirling series with Bernoulli corrections B_{2k}/(2k(2k-1) z^{2k-1})
  static constexpr double c[] = {1.0 / 12, -1.0 / 360, 1.0 / 1260, -1.0 / 1680, 1.0 / 1188,
                                 -691.0 / 360360, 1.0 / 156, -3617.0 / 122400};
  const cplx zinv = 1.0 / z;
  const cplx zinv2 = zinv * zinv;
  cplx series{};
  cplx pw = zinv;
  for (double ck : c) {
    series += ck * pw;
    pw *= zinv2;
  }
  return (z - 0.5) * std::log(z) - z + 0.5 * std::log(2.0 * kPi) + series - shift;
}

int kronecker(std::int64_t D, std::int64_t n) {
  if (n <= 0) throw ValidationError(kModule, "kronecker needs n >= 1");
  int result = 1;
  while (n % 2 == 0) {
    n /= 2;
    const std::int64_t r = ((D % 8) + 8) % 8;
    if (r % 2 == 0) return 0;
    if (r == 3 || r == 5) result = -result;
  }
  // Jacobi symbol (D mod n / n), n odd
  std::int64_t a = ((D % n) + n) % n;
  std::int64_t m = n;
  while (a != 0) {
    while (a % 2 == 0) {
      a /= 2;
      const std::int64_t r = m % 8;
      if (r == 3 || r == 5) result = -result;
    }
    std::swap(a, m);
    if (a % 4 == 3 && m % 4 == 3) result = -result;
    a %= m;
  }
  return m == 1 ? result : 0;
}

bool is_fundamental_discriminant(std::int64_t D) {
  if (D == 0 || D == 1) return false;
  auto squarefree = [](std::int64_t m) {
    m = std::llabs(m);
    for (auto [p, e] : factor_small(m))
      if (e > 1) return false;
    return true;
  };
  const std::int64_t r = ((D % 4) + 4) % 4;
  if (r == 1) return squarefree(D);
  if (r != 0) return false;
  const std::int64_t m = D / 4;
  const std::int64_t rm = ((m % 4) + 4) % 4;
  return (rm == 2 || rm == 3) && squarefree(m);
}

cplx hurwitz_zeta(cplx s, double x, const EulerMaclaurinOptions& opt) {
  if (!(x > 0.0 && x <= 1.0)) throw ValidationError(kModule, "hurwitz_zeta needs 0 < x <= 1");
  const double sigma = s.real();
  if (sigma <= 0.0) throw ValidationError(kModule, "hurwitz_zeta needs Re s > 0");
  const int N = opt.order_scale * (10 + static_cast<int>(std::ceil(std::abs(s.imag()) / kPi)));
  const auto& B = bernoulli_ratios();

  auto cpow_neg = [&](double base) {  // base^{-s}
    const double lb = std::log(base);
    const double mag = std::exp(-sigma * lb);
    const double ang = -s.imag() * lb;
    return cplx(mag * std::cos(ang), mag * std::sin(ang));
  };

  cplx head{};
  for (int k = 0; k < N; ++k) head += cpow_neg(k + x);
  const double a = N + x;
  const cplx a_ms = cpow_neg(a);
  cplx sum = head + a * a_ms / (s - 1.0) + 0.5 * a_ms;

  // T_j = B_{2j}/(2j)! * s(s+1)...(s+2j-2) * a^{-s-2j+1}
  cplx rising = s;  // s(s+1)...(s+2j-2)
  cplx apow = a_ms / a;
  const double inv_a2 = 1.0 / (a * a);
  const int max_j = std::min(kMaxEm, 8 * opt.order_scale + 30);
  const double tol = opt.tolerance / opt.order_scale;
  bool converged = false;
  for (int j = 1; j <= max_j; ++j) {
    const cplx term = B[j] * rising * apow;
    sum += term;
    // remainder after j terms is bounded by the next term times |s+2j+1|/(sigma+2j+1)
    const cplx next_rising = rising * (s + (2.0 * j - 1.0)) * (s + 2.0 * j);
    const double bound = std::abs(B[j + 1 <= kMaxEm ? j + 1 : kMaxEm] * next_rising * apow * inv_a2) *
                         std::abs(s + (2.0 * j + 1.0)) / (sigma + 2.0 * j + 1.0);
    if (j >= 2 * opt.order_scale && bound < tol) {
      converged = true;
      break;
    }
    rising = next_rising;
    apow *= inv_a2;
  }
  if (!converged) throw ComputationError(kModule, "Euler-Maclaurin remainder did not reach tolerance");
  return sum;
}

RealDirichletL::RealDirichletL(std::int64_t D) : D_(D) {
  if (!is_fundamental_discriminant(D))
    throw ValidationError(kModule, std::to_string(D) + " is not a fundamental discriminant (character not real primitive)");
  q_ = std::llabs(D);
  if (q_ > 100000) throw ValidationError(kModule, "conductor too large for the built-in zero finder");
  parity_ = D < 0 ? 1 : 0;
  for (std::int64_t a = 1; a <= q_; ++a) {
    const int k = kronecker(D, a);
    if (k) support_.emplace_back(static_cast<int>(a), k);
  }
}

cplx RealDirichletL::value(cplx s, const EulerMaclaurinOptions& opt) const {
  cplx acc{};
  for (auto [a, chi] : support_) acc += static_cast<double>(chi) * hurwitz_zeta(s, static_cast<double>(a) / q_, opt);
  return std::exp(-s * std::log(static_cast<double>(q_))) * acc;
}

double RealDirichletL::theta(double t) const {
  const cplx z{(0.5 + parity_) / 2.0, t / 2.0};
  return 0.5 * t * std::log(q_ / kPi) + log_gamma(z).imag();
}

double RealDirichletL::hardy_z(double t, const EulerMaclaurinOptions& opt) const {
  const cplx L = value({0.5, t}, opt);
  const double th = theta(t);
  return (cplx(std::cos(th), std::sin(th)) * L).real();
}

double RealDirichletL::zero_count_estimate(double T) const { return theta(T) / kPi; }

}  // namespace primerace
