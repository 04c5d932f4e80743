#pragma once

#include <span>
#include <string>
#include <vector>

#include "primerace/field.hpp"
#include "primerace/primes.hpp"

namespace primerace {

struct ConstructionCaps {
  std::size_t max_bits = 256;  // candidates < 2^max_bits
  int max_block = 8;           // consecutive primes per block
  int max_doublings = 8;       // Bertrand-window doublings
};

// One recomputed inequality; lhs/rhs are double approximations for display,
// holds is decided with directed-rounding arithmetic on the exact primes.
struct Check {
  std::string name;
  double lhs = 0.0;
  double rhs = 0.0;
  bool holds = false;
};

struct Certificate {
  std::vector<Check> checks;
  bool valid() const;
};

struct PrimeStepResult {
  BigInt ell;
  double alpha = 0.0;
  std::vector<BigInt> primes;  // p_1 < ... < p_m
  double ratio = 0.0;          // log p_m / log(ell p_1 ... p_m)
  double achieved_gap = 0.0;   // upper bound on |ratio - alpha|
  double lemma_bound = 0.0;    // log 2 / log(ell p_1 ... p_{m-1})
  int doublings = 0;
  Certificate certificate;
};

PrimeStepResult prime_density_step(const BigInt& ell, double alpha, int depth_cap = 8,
                                   const ConstructionCaps& caps = {});
Certificate verify_prime_density(const BigInt& ell, double alpha, std::span<const BigInt> primes,
                                 double achieved_gap, int doublings);

struct UDenseFamily {
  std::vector<BigInt> primes;  // 5 first, then every block
  std::vector<PrimeStepResult> blocks;
};

UDenseFamily build_u_dense_family(std::span<const double> targets, const ConstructionCaps& caps = {});

struct BDenseTarget {
  double x = 1.0;
  double eps = 0.1;
};

struct BDenseBlock {
  BDenseTarget target;
  std::vector<BigInt> primes;
  double achieved = 0.0;  // 2^{n+m} / log(q_1 ... p_n)
  int window_retries = 0;
  Certificate certificate;
};

struct BDenseFamily {
  std::vector<BigInt> primes;
  std::vector<BDenseBlock> blocks;
};

BDenseFamily build_b_dense_family(std::span<const BDenseTarget> targets, const ConstructionCaps& caps = {});
Certificate verify_b_density(std::span<const BigInt> prior, std::span<const BigInt> block, BDenseTarget target);

struct TheoremCPrefix {
  std::vector<BigInt> primes;
  Certificate certificate;
};

// log(p_1 ... p_k) > 2^{3k+1} for every k <= n.
TheoremCPrefix build_theorem_c_prefix(int n, const ConstructionCaps& caps = {}, int depth_cap = 4);
Certificate verify_theorem_c(std::span<const BigInt> primes);

// Each step appends p_1 large enough that 2^{m+1}/log(q_1...q_m p_1) < scale/(2m),
// then p_2 in the window ((q_1...q_m p_1)^theta, 2(...)^theta), theta = alpha/(1-alpha).
struct TwoModSchedule {
  std::vector<double> alphas;  // each in (1/2, 1)
  double scale = 1.0;
};

struct TwoModFamily {
  std::vector<BigInt> primes;  // 5 first
  std::vector<PrimeStepResult> steps;
  Certificate certificate;
};

TwoModFamily build_2mod_u_dense(const TwoModSchedule& schedule, const ConstructionCaps& caps = {});

struct FamilyRow {
  int depth = 0;
  int degree = 0;
  double log_disc = 0.0;
  int r_G = 0;
  double two_moderacy_index = 0.0;
  double uniform_criterion = 0.0;
  double u_min = 0.0;  // min |U(a)|, a != 1
  double u_max = 0.0;
};

std::vector<FamilyRow> moderacy_report(std::span<const FieldModel> family);

// Multiquadratic towers Q(sqrt p_1), Q(sqrt p_1, sqrt p_2), ...
std::vector<FieldModel> multiquadratic_tower(std::span<const BigInt> primes);

}  // namespace primerace
