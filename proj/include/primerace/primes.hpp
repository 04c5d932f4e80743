#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <vector>

namespace primerace {

using BigInt = mpz_class;

// Deterministic below 2^64; 64 Miller-Rabin rounds with bases drawn from a
// generator seeded by n itself above that, so answers are reproducible.
bool is_prime(const BigInt& n);

// Smallest prime p > x with p = 1 mod 4. Candidates are tested in parallel
// batches; the serial variant is the reference.
BigInt next_prime_1mod4(const BigInt& x);
BigInt next_prime_1mod4_serial(const BigInt& x);

// Natural log of a positive big integer to ~1e-15 relative error.
double log_big(const BigInt& n);

std::size_t bit_length(const BigInt& n);

// Factorization of a machine-size integer by trial division, as (p, e) pairs.
std::vector<std::pair<std::int64_t, int>> factor_small(std::int64_t n);

std::int64_t powmod(std::int64_t b, std::int64_t e, std::int64_t m);

}  // namespace primerace
