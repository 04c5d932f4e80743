#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "primerace/group.hpp"
#include "primerace/primes.hpp"

namespace primerace {

enum class FieldKind { Multiquadratic, CyclotomicSubgroup };

// Ramification at one prime: G_0 >= G_1 >= ... as sorted element-index sets.
struct RamificationData {
  BigInt p;
  double log_p = 0.0;
  std::vector<std::vector<int>> filtration;
  int inertia_order() const { return filtration.empty() ? 1 : static_cast<int>(filtration[0].size()); }
};

class FieldModel {
 public:
  FieldKind kind() const { return kind_; }
  const AbelianGroup& group() const { return group_; }

  const std::vector<RamificationData>& ramification() const { return ram_; }
  int num_ramified() const { return static_cast<int>(ram_.size()); }

  // multiquadratic only: sigma_i generates the inertia group at primes()[i]
  const std::vector<BigInt>& primes() const { return primes_; }
  int sigma(int i) const;

  // cyclotomic only
  std::int64_t modulus() const { return q_; }
  const std::vector<std::int64_t>& subgroup() const { return H_; }
  int element_of_unit(std::int64_t u) const;

  // n(chi, p_k) where k indexes ramification()
  int conductor_exponent_at(int chi, int k) const { return exps_[chi * ram_.size() + k]; }
  double log_conductor(int chi) const { return log_cond_[chi]; }
  std::span<const double> log_conductors() const { return log_cond_; }
  BigInt conductor(int chi) const;

  // Kronecker-symbol discriminant of a real character (nullopt when complex).
  std::optional<BigInt> fundamental_discriminant(int chi) const;

  std::string label(int chi) const { return labels_[chi]; }
  // Field label ("q.m" or bitmask) or canonical "c:(...)" notation.
  int parse_label(std::string_view text) const;

  std::string canonical_spec() const;  // JSON text
  std::string fingerprint() const;

  friend FieldModel multiquadratic(std::vector<BigInt> primes);
  friend FieldModel cyclotomic_subgroup(std::int64_t q, std::vector<std::int64_t> H);

 private:
  FieldModel() = default;
  void finish();

  FieldKind kind_ = FieldKind::Multiquadratic;
  AbelianGroup group_;
  std::vector<RamificationData> ram_;
  std::vector<BigInt> primes_;
  std::int64_t q_ = 0;
  std::vector<std::int64_t> H_;
  std::vector<int> unit_element_;  // indexed by residue mod q, -1 for non-units
  std::vector<int> exps_;
  std::vector<double> log_cond_;
  std::vector<std::string> labels_;
  std::map<std::string, int, std::less<>> label_index_;
};

FieldModel multiquadratic(std::vector<BigInt> primes);
FieldModel cyclotomic_subgroup(std::int64_t q, std::vector<std::int64_t> H);

// Returns 0 for unramified p.
int conductor_exponent(const FieldModel& field, int chi, const BigInt& p);
double log_artin_conductor(const FieldModel& field, int chi);
double log_discriminant(const FieldModel& field);
double signed_conductor_sum(const FieldModel& field, int a);

// n(chi,p) = (1/|G_0|) sum_i sum_{b in G_i} (chi(1) - chi(b^{-1})) from a filtration.
double conductor_exponent_from_filtration(const AbelianGroup& G, const RamificationData& r, int chi);

}  // namespace primerace
