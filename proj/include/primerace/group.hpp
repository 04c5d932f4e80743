#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace primerace {

using cplx = std::complex<double>;

struct GroupElement {
  std::vector<int> exponents;
  friend bool operator==(const GroupElement&, const GroupElement&) = default;
  friend auto operator<=>(const GroupElement&, const GroupElement&) = default;
};

struct CharacterIndex {
  std::vector<int> exponents;
  friend bool operator==(const CharacterIndex&, const CharacterIndex&) = default;
  friend auto operator<=>(const CharacterIndex&, const CharacterIndex&) = default;
};

// Z/n1 x ... x Zk. Elements and characters are enumerated lexicographically
// on exponent vectors (first coordinate most significant); index 0 is the
// identity / trivial character.
class AbelianGroup {
 public:
  AbelianGroup() = default;
  explicit AbelianGroup(std::vector<int> factor_orders);

  std::span<const int> factor_orders() const { return orders_; }
  int order() const { return order_; }
  int rank() const { return static_cast<int>(orders_.size()); }

  GroupElement element(int index) const;
  CharacterIndex character(int index) const;
  int index_of(const GroupElement& g) const;
  int index_of(const CharacterIndex& chi) const;
  int index_of_exponents(std::span<const int> e) const;

  int multiply(int a, int b) const;
  int inverse(int a) const;
  int identity() const { return 0; }
  int conjugate_character(int chi) const { return inverse(chi); }

  cplx character_value(const CharacterIndex& chi, const GroupElement& g) const;
  cplx character_value(int chi, int g) const;
  bool is_real_character(int chi) const { return conjugate_character(chi) == chi; }
  int character_order(int chi) const;

  // lcm of the factor orders; chi(g) = exp(2 pi i pairing(chi, g) / exponent()).
  int exponent() const { return exponent_; }
  int pairing(int chi, int g) const;

  // r_G(g) = #{x : x^2 = g}, indexed by element index.
  std::vector<int> square_root_counts() const;
  int r() const;

  std::string format_element(int g) const;
  std::string format_character(int chi) const;
  int parse_element(std::string_view text) const;
  int parse_character(std::string_view text) const;

  friend bool operator==(const AbelianGroup& a, const AbelianGroup& b) {
    return a.orders_ == b.orders_;
  }

 private:
  void check_shape(std::span<const int> e, const char* what) const;

  std::vector<int> orders_;
  std::vector<int> strides_;
  int order_ = 1;
  int exponent_ = 1;
  std::vector<std::vector<cplx>> roots_;
};

AbelianGroup make_group(std::vector<int> factor_orders);

// Complex-valued function on G, indexed by element index.
struct ClassFunction {
  std::vector<cplx> values;
};

// Integer-valued class function kept exact; t_{a,b} lives here.
struct RaceFunction {
  std::vector<std::int64_t> values;

  RaceFunction& operator+=(const RaceFunction& o);
  friend RaceFunction operator+(RaceFunction a, const RaceFunction& b) { return a += b; }
  friend bool operator==(const RaceFunction&, const RaceFunction&) = default;
  ClassFunction to_complex() const;
};

ClassFunction character_function(const AbelianGroup& G, int chi);
ClassFunction constant_function(const AbelianGroup& G, cplx c);

cplx inner_product(const AbelianGroup& G, const ClassFunction& f, const ClassFunction& h);

// t = |G| 1_a - |G| 1_b
RaceFunction race_class_function(const AbelianGroup& G, int a, int b);

// <t, chi> computed from the (sparse) integer values of t.
cplx fourier_coefficient(const AbelianGroup& G, const RaceFunction& t, int chi);
cplx fourier_coefficient(const AbelianGroup& G, const ClassFunction& t, int chi);

}  // namespace primerace
