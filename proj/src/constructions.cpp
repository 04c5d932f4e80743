#include "primerace/constructions.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cmath>
#include <memory>

#include "primerace/errors.hpp"
#include "primerace/race.hpp"

namespace primerace {

namespace {

const std::string kModule = "constructions";
constexpr mpfr_prec_t kPrec = 512;

// Closed interval [lo, hi] with outward rounding.
class Real {
 public:
  Real() {
    mpfr_init2(lo_, kPrec);
    mpfr_init2(hi_, kPrec);
    mpfr_set_zero(lo_, 1);
    mpfr_set_zero(hi_, 1);
  }
  Real(const Real& o) : Real() {
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
  }
  Real& operator=(const Real& o) {
    mpfr_set(lo_, o.lo_, MPFR_RNDD);
    mpfr_set(hi_, o.hi_, MPFR_RNDU);
    return *this;
  }
  ~Real() {
    mpfr_clear(lo_);
    mpfr_clear(hi_);
  }

  static Real constant(double x) {
    Real r;
    mpfr_set_d(r.lo_, x, MPFR_RNDD);
    mpfr_set_d(r.hi_, x, MPFR_RNDU);
    return r;
  }
  static Real log_of(const BigInt& n) {
    Real r;
    mpfr_set_z(r.lo_, n.get_mpz_t(), MPFR_RNDD);
    mpfr_log(r.lo_, r.lo_, MPFR_RNDD);
    mpfr_set_z(r.hi_, n.get_mpz_t(), MPFR_RNDU);
    mpfr_log(r.hi_, r.hi_, MPFR_RNDU);
    return r;
  }
  static Real log2() {
    Real r;
    mpfr_const_log2(r.lo_, MPFR_RNDD);
    mpfr_const_log2(r.hi_, MPFR_RNDU);
    return r;
  }

  friend Real operator+(const Real& a, const Real& b) {
    Real r;
    mpfr_add(r.lo_, a.lo_, b.lo_, MPFR_RNDD);
    mpfr_add(r.hi_, a.hi_, b.hi_, MPFR_RNDU);
    return r;
  }
  friend Real operator-(const Real& a, const Real& b) {
    Real r;
    mpfr_sub(r.lo_, a.lo_, b.hi_, MPFR_RNDD);
    mpfr_sub(r.hi_, a.hi_, b.lo_, MPFR_RNDU);
    return r;
  }
  friend Real operator*(const Real& a, const Real& b) {
    return combine(a, b, [](mpfr_ptr o, mpfr_srcptr x, mpfr_srcptr y, mpfr_rnd_t rnd) { mpfr_mul(o, x, y, rnd); });
  }
  friend Real operator/(const Real& a, const Real& b) {
    if (mpfr_sgn(b.lo_) <= 0 && mpfr_sgn(b.hi_) >= 0) throw ComputationError(kModule, "interval division by zero");
    return combine(a, b, [](mpfr_ptr o, mpfr_srcptr x, mpfr_srcptr y, mpfr_rnd_t rnd) { mpfr_div(o, x, y, rnd); });
  }
  Real abs() const {
    Real r;
    if (mpfr_sgn(lo_) >= 0) return *this;
    if (mpfr_sgn(hi_) <= 0) {
      mpfr_neg(r.lo_, hi_, MPFR_RNDD);
      mpfr_neg(r.hi_, lo_, MPFR_RNDU);
      return r;
    }
    mpfr_set_zero(r.lo_, 1);
    mpfr_neg(r.hi_, lo_, MPFR_RNDU);
    mpfr_max(r.hi_, r.hi_, hi_, MPFR_RNDU);
    return r;
  }

  bool certainly_less(const Real& o) const { return mpfr_cmp(hi_, o.lo_) < 0; }
  bool certainly_leq(const Real& o) const { return mpfr_cmp(hi_, o.lo_) <= 0; }
  double upper() const { return mpfr_get_d(hi_, MPFR_RNDU); }
  double lower() const { return mpfr_get_d(lo_, MPFR_RNDD); }
  double mid() const { return 0.5 * (lower() + upper()); }

  // ceil(exp(hi)) as an integer; an upper bound for exp of every point in the interval.
  BigInt exp_ceil() const {
    mpfr_t t;
    mpfr_init2(t, kPrec);
    mpfr_exp(t, hi_, MPFR_RNDU);
    BigInt z;
    mpfr_get_z(z.get_mpz_t(), t, MPFR_RNDU);
    mpfr_clear(t);
    return z;
  }
  // exp(hi) < n
  bool exp_below(const BigInt& n) const {
    mpfr_t t;
    mpfr_init2(t, kPrec);
    mpfr_exp(t, hi_, MPFR_RNDU);
    const bool r = mpfr_cmp_z(t, n.get_mpz_t()) < 0;
    mpfr_clear(t);
    return r;
  }

 private:
  template <class Op>
  static Real combine(const Real& a, const Real& b, Op op) {
    mpfr_t t;
    mpfr_init2(t, kPrec);
    Real r;
    bool first = true;
    for (mpfr_srcptr x : {static_cast<mpfr_srcptr>(a.lo_), static_cast<mpfr_srcptr>(a.hi_)})
      for (mpfr_srcptr y : {static_cast<mpfr_srcptr>(b.lo_), static_cast<mpfr_srcptr>(b.hi_)}) {
        op(t, x, y, MPFR_RNDD);
        if (first || mpfr_cmp(t, r.lo_) < 0) mpfr_set(r.lo_, t, MPFR_RNDD);
        op(t, x, y, MPFR_RNDU);
        if (first || mpfr_cmp(t, r.hi_) > 0) mpfr_set(r.hi_, t, MPFR_RNDU);
        first = false;
      }
    mpfr_clear(t);
    return r;
  }

  mpfr_t lo_, hi_;
};

Real theta_of(double alpha) { return Real::constant(alpha) / (Real::constant(1.0) - Real::constant(alpha)); }

Real log_product(std::span<const BigInt> ps) {
  Real s;
  for (const auto& p : ps) s = s + Real::log_of(p);
  return s;
}

void check_bits(const BigInt& n, const ConstructionCaps& caps, const std::string& what) {
  if (bit_length(n) > caps.max_bits)
    throw ComputationError(kModule, what + ": candidate exceeds 2^" + std::to_string(caps.max_bits) + " cap");
}

BigInt next_candidate(const BigInt& floor, const ConstructionCaps& caps, const std::string& what) {
  check_bits(floor, caps, what);
  BigInt p = next_prime_1mod4(floor);
  check_bits(p, caps, what);
  return p;
}

Check primes_check(std::span<const BigInt> primes, const BigInt& floor) {
  bool ok = true;
  BigInt prev = floor;
  for (const auto& p : primes) {
    ok = ok && p > prev && p % 4 == 1 && is_prime(p);
    prev = p;
  }
  return {"primes are prime, = 1 mod 4, increasing above " + floor.get_str(), 0.0, 0.0, ok};
}

Check less_check(std::string name, const Real& lhs, const Real& rhs) {
  return {std::move(name), lhs.mid(), rhs.mid(), lhs.certainly_less(rhs)};
}

Check leq_check(std::string name, const Real& lhs, const Real& rhs) {
  return {std::move(name), lhs.mid(), rhs.mid(), lhs.certainly_leq(rhs)};
}

// Smallest p = 1 mod 4 above exp(base), with the number of doublings needed to
// bound log p by base + (doublings + 1) log 2.
std::pair<BigInt, int> window_prime(const Real& base, const ConstructionCaps& caps, const std::string& what) {
  if (base.upper() > static_cast<double>(caps.max_bits) * std::log(2.0))
    throw ComputationError(kModule, what + ": window exceeds 2^" + std::to_string(caps.max_bits) + " cap");
  const BigInt p = next_candidate(base.exp_ceil(), caps, what);
  const Real lp = Real::log_of(p);
  const Real l2 = Real::log2();
  for (int j = 0; j <= caps.max_doublings; ++j)
    if (lp.certainly_less(base + Real::constant(j + 1.0) * l2)) return {p, j};
  throw ComputationError(kModule, what + ": no prime after " + std::to_string(caps.max_doublings) + " window doublings");
}

void validate_caps(const ConstructionCaps& caps) {
  if (caps.max_bits < 8) throw ValidationError(kModule, "max_bits must be at least 8");
  if (caps.max_block < 1) throw ValidationError(kModule, "max_block must be positive");
  if (caps.max_doublings < 0) throw ValidationError(kModule, "max_doublings must be nonnegative");
}

PrimeStepResult finish_step(const BigInt& ell, double alpha, std::vector<BigInt> primes, int doublings) {
  PrimeStepResult res;
  res.ell = ell;
  res.alpha = alpha;
  res.doublings = doublings;
  const Real X = Real::log_of(ell) + log_product(std::span(primes).first(primes.size() - 1));
  const Real lm = Real::log_of(primes.back());
  const Real ratio = lm / (X + lm);
  res.ratio = ratio.mid();
  res.achieved_gap = (ratio - Real::constant(alpha)).abs().upper();
  res.lemma_bound = (Real::log2() / X).lower();
  res.primes = std::move(primes);
  res.certificate = verify_prime_density(ell, alpha, res.primes, res.achieved_gap, doublings);
  return res;
}

}  // namespace

bool Certificate::valid() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.holds; });
}

Certificate verify_prime_density(const BigInt& ell, double alpha, std::span<const BigInt> primes, double achieved_gap,
                                 int doublings) {
  Certificate cert;
  if (primes.empty()) return cert;
  cert.checks.push_back(primes_check(primes, ell));
  const Real theta = theta_of(alpha);
  const Real X = Real::log_of(ell) + log_product(primes.first(primes.size() - 1));
  const BigInt& prev = primes.size() >= 2 ? primes[primes.size() - 2] : ell;
  const Real lm = Real::log_of(primes.back());
  cert.checks.push_back(less_check("theta*log(ell p_1..p_{m-1}) > log p_{m-1}", Real::log_of(prev), theta * X));
  cert.checks.push_back(less_check("log p_m > theta*log(ell p_1..p_{m-1})", theta * X, lm));
  cert.checks.push_back(
      less_check("log p_m < theta*log(ell p_1..p_{m-1}) + k log 2", lm, theta * X + Real::constant(doublings + 1.0) * Real::log2()));
  const Real dev = (lm / (X + lm) - Real::constant(alpha)).abs();
  cert.checks.push_back(leq_check("|log p_m / log(ell p_1..p_m) - alpha| <= gap", dev, Real::constant(achieved_gap)));
  if (doublings == 0)
    cert.checks.push_back(leq_check("gap <= log 2 / log(ell p_1..p_{m-1})", Real::constant(achieved_gap), Real::log2() / X));
  return cert;
}

PrimeStepResult prime_density_step(const BigInt& ell, double alpha, int depth_cap, const ConstructionCaps& caps) {
  validate_caps(caps);
  if (ell < 5) throw ValidationError(kModule, "ell must be at least 5");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ValidationError(kModule, "alpha must lie in (0, 1)");
  if (depth_cap < 0) throw ValidationError(kModule, "depth_cap must be nonnegative");
  const Real theta = theta_of(alpha);
  std::vector<BigInt> primes;
  BigInt prev = ell;
  Real S = Real::log_of(ell);
  while (!Real::log_of(prev).certainly_less(theta * S)) {
    if (static_cast<int>(primes.size()) >= depth_cap)
      throw ComputationError(kModule, "prime_density_step: depth cap " + std::to_string(depth_cap) +
                                          " exhausted before the consecutive-prime condition held");
    prev = next_candidate(prev, caps, "prime_density_step");
    primes.push_back(prev);
    S = S + Real::log_of(prev);
  }
  auto [p, doublings] = window_prime(theta * S, caps, "prime_density_step");
  primes.push_back(p);
  return finish_step(ell, alpha, std::move(primes), doublings);
}

UDenseFamily build_u_dense_family(std::span<const double> targets, const ConstructionCaps& caps) {
  UDenseFamily fam;
  if (targets.empty()) return fam;
  for (double t : targets)
    if (!(t > 0.0 && t < 1.0)) throw ValidationError(kModule, "u-dense targets must lie in (0, 1)");
  fam.primes.push_back(5);
  BigInt ell = 5;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    PrimeStepResult step;
    try {
      step = prime_density_step(ell, targets[k], caps.max_block, caps);
    } catch (const ComputationError& e) {
      throw ComputationError(kModule, "u-dense block " + std::to_string(k + 1) + ": " + e.what());
    }
    for (const auto& p : step.primes) {
      fam.primes.push_back(p);
      ell *= p;
    }
    fam.blocks.push_back(std::move(step));
  }
  return fam;
}

Certificate verify_b_density(std::span<const BigInt> prior, std::span<const BigInt> block, BDenseTarget target) {
  Certificate cert;
  if (block.empty()) return cert;
  const BigInt floor = prior.empty() ? BigInt(4) : prior.back();
  cert.checks.push_back(primes_check(block, floor));
  const double N = std::ldexp(1.0, static_cast<int>(prior.size() + block.size()));
  const Real X = log_product(prior) + log_product(block.first(block.size() - 1));
  const Real lp = Real::log_of(block.back());
  const Real x = Real::constant(target.x), e = Real::constant(target.eps);
  const Real lo = Real::constant(N) / (x + e) - X;
  const Real hi = Real::constant(N) / (x - e) - X;
  cert.checks.push_back(less_check("2^{n+m}/(x+eps) - log(q..p_{n-1}) < log p_n", lo, lp));
  cert.checks.push_back(less_check("log p_n < 2^{n+m}/(x-eps) - log(q..p_{n-1})", lp, hi));
  return cert;
}

BDenseFamily build_b_dense_family(std::span<const BDenseTarget> targets, const ConstructionCaps& caps) {
  validate_caps(caps);
  BDenseFamily fam;
  for (const auto& t : targets)
    if (!(t.x > 0.0 && t.eps > 0.0 && t.x - t.eps > 0.0))
      throw ValidationError(kModule, "b-dense targets need x > eps > 0");
  const Real l2 = Real::log2();
  Real S;
  for (std::size_t k = 0; k < targets.size(); ++k) {
    const auto& t = targets[k];
    const std::string what = "b-dense block " + std::to_string(k + 1);
    BDenseBlock blk;
    blk.target = t;
    BigInt prev = fam.primes.empty() ? BigInt(4) : fam.primes.back();
    Real X = S;
    const Real x = Real::constant(t.x), e = Real::constant(t.eps);
    while (true) {
      const int n = static_cast<int>(blk.primes.size()) + 1;
      const double N = std::ldexp(1.0, static_cast<int>(fam.primes.size()) + n);
      const Real lo = Real::constant(N) / (x + e) - X;
      const Real hi = Real::constant(N) / (x - e) - X;
      const bool a = Real::log_of(prev).certainly_less(lo);
      const bool b = l2.certainly_less(hi - lo);
      if (a && b) {
        if (lo.upper() > static_cast<double>(caps.max_bits) * std::log(2.0))
          throw ComputationError(kModule, what + ": window exceeds 2^" + std::to_string(caps.max_bits) + " cap");
        const BigInt p = next_candidate(lo.exp_ceil(), caps, what);
        if (Real::log_of(p).certainly_less(hi)) {
          blk.primes.push_back(p);
          break;
        }
        ++blk.window_retries;
      }
      if (static_cast<int>(blk.primes.size()) + 1 >= caps.max_block)
        throw ComputationError(kModule, what + ": block length cap " + std::to_string(caps.max_block) + " exhausted");
      prev = next_candidate(prev, caps, what);
      blk.primes.push_back(prev);
      X = X + Real::log_of(prev);
    }
    blk.certificate = verify_b_density(fam.primes, blk.primes, t);
    for (const auto& p : blk.primes) {
      fam.primes.push_back(p);
      S = S + Real::log_of(p);
    }
    blk.achieved = (Real::constant(std::ldexp(1.0, static_cast<int>(fam.primes.size()))) / S).mid();
    fam.blocks.push_back(std::move(blk));
  }
  return fam;
}

Certificate verify_theorem_c(std::span<const BigInt> primes) {
  Certificate cert;
  if (primes.empty()) return cert;
  cert.checks.push_back(primes_check(primes, 4));
  BigInt P = 1;
  for (std::size_t k = 1; k <= primes.size(); ++k) {
    P *= primes[k - 1];
    const Real c = Real::constant(std::ldexp(1.0, static_cast<int>(3 * k + 1)));
    cert.checks.push_back({"log(p_1..p_" + std::to_string(k) + ") > 2^" + std::to_string(3 * k + 1), log_big(P),
                           c.mid(), c.exp_below(P)});
    const int K = static_cast<int>(k);
    cert.checks.push_back({"two_moderacy_index < 2^-" + std::to_string(k) + ", i.e. 4^" + std::to_string(2 * k) +
                               " < log d_" + std::to_string(k) + " = 2^" + std::to_string(k - 1) + " log(p_1..p_" +
                               std::to_string(k) + ")",
                           std::ldexp(1.0, 4 * K), std::ldexp(log_big(P), K - 1), c.exp_below(P)});
  }
  return cert;
}

TheoremCPrefix build_theorem_c_prefix(int n, const ConstructionCaps& caps, int depth_cap) {
  validate_caps(caps);
  if (n < 0) throw ValidationError(kModule, "theorem-c depth must be nonnegative");
  if (n > depth_cap) throw ValidationError(kModule, "theorem-c depth exceeds the cap " + std::to_string(depth_cap));
  TheoremCPrefix res;
  BigInt P = 1, prev = 4;
  for (int k = 1; k <= n; ++k) {
    const std::string what = "theorem-c prime " + std::to_string(k);
    const Real c = Real::constant(std::ldexp(1.0, 3 * k + 1)) - Real::log_of(P);
    if (c.upper() > static_cast<double>(caps.max_bits) * std::log(2.0))
      throw ComputationError(kModule, what + ": candidate exceeds 2^" + std::to_string(caps.max_bits) + " cap");
    const Real total = Real::constant(std::ldexp(1.0, 3 * k + 1));
    BigInt E = total.exp_ceil();
    BigInt t;
    mpz_cdiv_q(t.get_mpz_t(), E.get_mpz_t(), P.get_mpz_t());
    const BigInt p = next_candidate(std::max(t, prev), caps, what);
    res.primes.push_back(p);
    P *= p;
    prev = p;
  }
  res.certificate = verify_theorem_c(res.primes);
  return res;
}

TwoModFamily build_2mod_u_dense(const TwoModSchedule& schedule, const ConstructionCaps& caps) {
  validate_caps(caps);
  if (!(schedule.scale > 0.0)) throw ValidationError(kModule, "schedule scale must be positive");
  for (double a : schedule.alphas)
    if (!(a > 0.5 && a < 1.0)) throw ValidationError(kModule, "2mod-Udense alphas must lie in (1/2, 1)");
  TwoModFamily fam;
  fam.primes.push_back(5);
  BigInt Q = 5;
  for (std::size_t k = 0; k < schedule.alphas.size(); ++k) {
    const std::string what = "2mod step " + std::to_string(k + 1);
    const double alpha = schedule.alphas[k];
    const int m = static_cast<int>(fam.primes.size());
    const double bound = schedule.scale / (2.0 * m);
    const Real need = Real::constant(std::ldexp(1.0, m + 1)) / Real::constant(bound) - Real::log_of(Q);
    if (need.upper() > static_cast<double>(caps.max_bits) * std::log(2.0))
      throw ComputationError(kModule, what + ": candidate exceeds 2^" + std::to_string(caps.max_bits) + " cap");
    BigInt floor = fam.primes.back();
    if (need.lower() > 0.0) floor = std::max(floor, need.exp_ceil());
    const BigInt p1 = next_candidate(floor, caps, what);
    const Real X = Real::log_of(Q) + Real::log_of(p1);
    auto [p2, doublings] = window_prime(theta_of(alpha) * X, caps, what);
    auto step = finish_step(Q, alpha, {p1, p2}, doublings);
    fam.certificate.checks.push_back(less_check("2^{m+1}/log(q_1..q_m p_1) < scale/(2m) at step " + std::to_string(k + 1),
                                                Real::constant(std::ldexp(1.0, m + 1)) / X, Real::constant(bound)));
    for (const auto& c : step.certificate.checks) fam.certificate.checks.push_back(c);
    fam.primes.push_back(p1);
    fam.primes.push_back(p2);
    Q *= p1 * p2;
    fam.steps.push_back(std::move(step));
  }
  return fam;
}

std::vector<FieldModel> multiquadratic_tower(std::span<const BigInt> primes) {
  std::vector<FieldModel> out;
  for (std::size_t k = 1; k <= primes.size(); ++k)
    out.push_back(multiquadratic(std::vector<BigInt>(primes.begin(), primes.begin() + k)));
  return out;
}

std::vector<FamilyRow> moderacy_report(std::span<const FieldModel> family) {
  std::vector<FamilyRow> rows;
  for (std::size_t k = 0; k < family.size(); ++k) {
    const auto& F = family[k];
    const auto& G = F.group();
    FamilyRow row;
    row.depth = static_cast<int>(k + 1);
    row.degree = G.order();
    row.log_disc = log_discriminant(F);
    row.r_G = G.r();
    row.two_moderacy_index = row.log_disc > 0.0 ? row.r_G / std::sqrt(row.log_disc) : 0.0;
    if (G.order() >= 2) {
      double lo = 0.0, hi = 0.0;
      for (int a = 1; a < G.order(); ++a) {
        const double s = signed_conductor_sum(F, a);
        lo = a == 1 ? s : std::min(lo, s);
        hi = a == 1 ? s : std::max(hi, s);
      }
      row.uniform_criterion = row.log_disc > 0.0 ? (hi - lo) / row.log_disc : 0.0;
      RaceSpec spec{std::make_shared<const FieldModel>(F), {0, 1}, ZeroSumMode::asymptotic(), nullptr, {}};
      const RaceContext ctx(spec);
      row.u_min = 1.0;
      row.u_max = 0.0;
      for (int a = 1; a < G.order(); ++a) {
        row.u_min = std::min(row.u_min, std::abs(ctx.U(a)));
        row.u_max = std::max(row.u_max, std::abs(ctx.U(a)));
      }
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace primerace
