#include "primerace/primes.hpp"

#include <omp.h>

#include <array>
#include <cmath>
#include <random>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

constexpr std::array<unsigned, 12> kWitnesses64 = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37};

const std::vector<unsigned>& small_primes() {
  static const std::vector<unsigned> primes = [] {
    std::vector<unsigned> out;
    std::vector<bool> composite(2000, false);
    for (unsigned i = 2; i < composite.size(); ++i) {
      if (composite[i]) continue;
      out.push_back(i);
      for (unsigned j = i * i; j < composite.size(); j += i) composite[j] = true;
    }
    return out;
  }();
  return primes;
}

// n odd > 3, n - 1 = d 2^s
bool mr_round(const BigInt& n, const BigInt& n_minus_1, const BigInt& d, unsigned long s,
              const BigInt& base) {
  BigInt x;
  mpz_powm(x.get_mpz_t(), base.get_mpz_t(), d.get_mpz_t(), n.get_mpz_t());
  if (x == 1 || x == n_minus_1) return true;
  for (unsigned long r = 1; r < s; ++r) {
    x = (x * x) % n;
    if (x == n_minus_1) return true;
    if (x == 1) return false;
  }
  return false;
}

}  // namespace

bool is_prime(const BigInt& n) {
  if (n < 2) return false;
  for (unsigned p : small_primes()) {
    if (n == p) return true;
    if (mpz_divisible_ui_p(n.get_mpz_t(), p)) return false;
  }
  const BigInt n_minus_1 = n - 1;
  BigInt d = n_minus_1;
  const unsigned long s = mpz_scan1(d.get_mpz_t(), 0);
  mpz_fdiv_q_2exp(d.get_mpz_t(), d.get_mpz_t(), s);

  if (mpz_sizeinbase(n.get_mpz_t(), 2) <= 64) {
    for (unsigned w : kWitnesses64)
      if (!mr_round(n, n_minus_1, d, s, BigInt(w))) return false;
    return true;
  }
  std::seed_seq seq{static_cast<unsigned>(mpz_get_ui(n.get_mpz_t())),
                    static_cast<unsigned>(mpz_sizeinbase(n.get_mpz_t(), 2))};
  std::mt19937_64 rng(seq);
  gmp_randclass gen(gmp_randinit_mt);
  gen.seed(static_cast<unsigned long>(rng()));
  const BigInt span = n - 3;
  for (int round = 0; round < 64; ++round) {
    BigInt base = gen.get_z_range(span) + 2;
    if (!mr_round(n, n_minus_1, d, s, base)) return false;
  }
  return true;
}

namespace {

BigInt first_candidate(const BigInt& x) {
  BigInt c = x + 1;
  if (c < 5) return BigInt(5);
  const unsigned long r = mpz_fdiv_ui(c.get_mpz_t(), 4);
  if (r != 1) c += (5 - r) % 4;
  return c;
}

bool sieve_pass(const BigInt& c) {
  for (unsigned p : small_primes()) {
    if (c == p) return true;
    if (mpz_divisible_ui_p(c.get_mpz_t(), p)) return false;
  }
  return true;
}

constexpr int kBatch = 256;

}  // namespace

BigInt next_prime_1mod4_serial(const BigInt& x) {
  for (BigInt c = first_candidate(x);; c += 4)
    if (sieve_pass(c) && is_prime(c)) return c;
}

BigInt next_prime_1mod4(const BigInt& x) {
  BigInt base = first_candidate(x);
  while (true) {
    std::vector<BigInt> survivors;
    for (int i = 0; i < kBatch; ++i) {
      BigInt c = base + 4 * i;
      if (sieve_pass(c)) survivors.push_back(std::move(c));
    }
    const int n = static_cast<int>(survivors.size());
    std::vector<char> prime(n, 0);
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < n; ++i) prime[i] = is_prime(survivors[i]) ? 1 : 0;
    for (int i = 0; i < n; ++i)
      if (prime[i]) return survivors[i];
    base += 4 * kBatch;
  }
}

double log_big(const BigInt& n) {
  if (n <= 0) throw ValidationError("field_models", "log of a nonpositive integer");
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, n.get_mpz_t());
  return std::log(mant) + static_cast<double>(exp) * std::log(2.0);
}

std::size_t bit_length(const BigInt& n) { return mpz_sizeinbase(n.get_mpz_t(), 2); }

std::vector<std::pair<std::int64_t, int>> factor_small(std::int64_t n) {
  std::vector<std::pair<std::int64_t, int>> out;
  for (std::int64_t p = 2; p * p <= n; ++p) {
    if (n % p) continue;
    int e = 0;
    while (n % p == 0) n /= p, ++e;
    out.emplace_back(p, e);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

std::int64_t powmod(std::int64_t b, std::int64_t e, std::int64_t m) {
  __int128 r = 1 % m, x = ((b % m) + m) % m;
  while (e > 0) {
    if (e & 1) r = r * x % m;
    x = x * x % m;
    e >>= 1;
  }
  return static_cast<std::int64_t>(r);
}

}  // namespace primerace
