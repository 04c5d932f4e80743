#include "primerace/group.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <numeric>

#include "primerace/errors.hpp"

namespace primerace {

namespace {
const std::string kModule = "group_theory";

std::vector<int> parse_tuple(std::string_view text, char prefix) {
  std::string_view s = text;
  if (s.size() < 4 || s[0] != prefix || s[1] != ':' || s[2] != '(' || s.back() != ')')
    throw ValidationError(kModule, "malformed notation '" + std::string(text) + "', expected " +
                                       prefix + ":(x1,...,xk)");
  s = s.substr(3, s.size() - 4);
  std::vector<int> out;
  while (true) {
    auto comma = s.find(',');
    auto tok = s.substr(0, comma);
    while (!tok.empty() && tok.front() == ' ') tok.remove_prefix(1);
    while (!tok.empty() && tok.back() == ' ') tok.remove_suffix(1);
    int v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || p != tok.data() + tok.size() || tok.empty())
      throw ValidationError(kModule, "bad integer in '" + std::string(text) + "'");
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

std::string format_tuple(char prefix, const std::vector<int>& e) {
  std::string s{prefix};
  s += ":(";
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(e[i]);
  }
  return s + ")";
}
}  // namespace

AbelianGroup::AbelianGroup(std::vector<int> factor_orders) : orders_(std::move(factor_orders)) {
  if (orders_.empty()) throw ValidationError(kModule, "factor_orders must be nonempty");
  long long n = 1;
  for (int o : orders_) {
    if (o < 2) throw ValidationError(kModule, "factor order " + std::to_string(o) + " < 2");
    n *= o;
    if (n > (1LL << 26)) throw ValidationError(kModule, "group order too large");
  }
  order_ = static_cast<int>(n);
  for (int o : orders_) exponent_ = std::lcm(exponent_, o);
  strides_.assign(orders_.size(), 1);
  for (int j = rank() - 2; j >= 0; --j) strides_[j] = strides_[j + 1] * orders_[j + 1];
  roots_.resize(orders_.size());
  for (std::size_t j = 0; j < orders_.size(); ++j) {
    const int m = orders_[j];
    roots_[j].resize(m);
    for (int k = 0; k < m; ++k) {
      // exact values at the quarter points keep real characters exactly real
      if (4 * k % m == 0) {
        static constexpr cplx quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        roots_[j][k] = quarter[4 * k / m];
      } else {
        const double a = 2.0 * std::numbers::pi * k / m;
        roots_[j][k] = {std::cos(a), std::sin(a)};
      }
    }
  }
}

AbelianGroup make_group(std::vector<int> factor_orders) { return AbelianGroup(std::move(factor_orders)); }

void AbelianGroup::check_shape(std::span<const int> e, const char* what) const {
  if (static_cast<int>(e.size()) != rank())
    throw ValidationError(kModule, std::string(what) + " has " + std::to_string(e.size()) +
                                       " exponents, group rank is " + std::to_string(rank()));
  for (int j = 0; j < rank(); ++j)
    if (e[j] < 0 || e[j] >= orders_[j])
      throw ValidationError(kModule, std::string(what) + " exponent " + std::to_string(e[j]) +
                                         " out of range [0," + std::to_string(orders_[j]) + ")");
}

int AbelianGroup::index_of_exponents(std::span<const int> e) const {
  check_shape(e, "exponent vector");
  int idx = 0;
  for (int j = 0; j < rank(); ++j) idx += e[j] * strides_[j];
  return idx;
}

int AbelianGroup::index_of(const GroupElement& g) const { return index_of_exponents(g.exponents); }
int AbelianGroup::index_of(const CharacterIndex& c) const { return index_of_exponents(c.exponents); }

GroupElement AbelianGroup::element(int index) const {
  if (index < 0 || index >= order_) throw ValidationError(kModule, "element index out of range");
  GroupElement g;
  g.exponents.resize(orders_.size());
  for (int j = 0; j < rank(); ++j) g.exponents[j] = (index / strides_[j]) % orders_[j];
  return g;
}

CharacterIndex AbelianGroup::character(int index) const { return {element(index).exponents}; }

int AbelianGroup::multiply(int a, int b) const {
  int idx = 0;
  for (int j = 0; j < rank(); ++j) {
    const int x = (a / strides_[j]) % orders_[j];
    const int y = (b / strides_[j]) % orders_[j];
    idx += ((x + y) % orders_[j]) * strides_[j];
  }
  return idx;
}

int AbelianGroup::inverse(int a) const {
  int idx = 0;
  for (int j = 0; j < rank(); ++j) {
    const int x = (a / strides_[j]) % orders_[j];
    idx += ((orders_[j] - x) % orders_[j]) * strides_[j];
  }
  return idx;
}

cplx AbelianGroup::character_value(int chi, int g) const {
  cplx v{1.0, 0.0};
  for (int j = 0; j < rank(); ++j) {
    const long long c = (chi / strides_[j]) % orders_[j];
    const long long x = (g / strides_[j]) % orders_[j];
    if (c && x) v *= roots_[j][(c * x) % orders_[j]];
  }
  return v;
}

cplx AbelianGroup::character_value(const CharacterIndex& chi, const GroupElement& g) const {
  check_shape(chi.exponents, "character");
  check_shape(g.exponents, "element");
  return character_value(index_of(chi), index_of(g));
}

int AbelianGroup::pairing(int chi, int g) const {
  long long s = 0;
  for (int j = 0; j < rank(); ++j) {
    const long long c = (chi / strides_[j]) % orders_[j];
    const long long x = (g / strides_[j]) % orders_[j];
    s = (s + (c * x % orders_[j]) * (exponent_ / orders_[j])) % exponent_;
  }
  return static_cast<int>(s);
}

int AbelianGroup::character_order(int chi) const {
  int o = 1;
  for (int j = 0; j < rank(); ++j) {
    const int c = (chi / strides_[j]) % orders_[j];
    o = std::lcm(o, orders_[j] / std::gcd(orders_[j], c));
  }
  return o;
}

std::vector<int> AbelianGroup::square_root_counts() const {
  std::vector<int> counts(order_, 0);
  for (int x = 0; x < order_; ++x) ++counts[multiply(x, x)];
  return counts;
}

int AbelianGroup::r() const { return square_root_counts()[0]; }

std::string AbelianGroup::format_element(int g) const { return format_tuple('e', element(g).exponents); }
std::string AbelianGroup::format_character(int chi) const {
  return format_tuple('c', element(chi).exponents);
}
int AbelianGroup::parse_element(std::string_view text) const {
  return index_of_exponents(parse_tuple(text, 'e'));
}
int AbelianGroup::parse_character(std::string_view text) const {
  return index_of_exponents(parse_tuple(text, 'c'));
}

RaceFunction& RaceFunction::operator+=(const RaceFunction& o) {
  if (o.values.size() != values.size()) throw ValidationError(kModule, "class function domain mismatch");
  for (std::size_t i = 0; i < values.size(); ++i) values[i] += o.values[i];
  return *this;
}

ClassFunction RaceFunction::to_complex() const {
  ClassFunction f;
  f.values.reserve(values.size());
  for (auto v : values) f.values.emplace_back(static_cast<double>(v), 0.0);
  return f;
}

ClassFunction character_function(const AbelianGroup& G, int chi) {
  ClassFunction f;
  f.values.resize(G.order());
  for (int g = 0; g < G.order(); ++g) f.values[g] = G.character_value(chi, g);
  return f;
}

ClassFunction constant_function(const AbelianGroup& G, cplx c) {
  return ClassFunction{std::vector<cplx>(G.order(), c)};
}

cplx inner_product(const AbelianGroup& G, const ClassFunction& f, const ClassFunction& h) {
  if (static_cast<int>(f.values.size()) != G.order() || static_cast<int>(h.values.size()) != G.order())
    throw ValidationError(kModule, "class function domain mismatch");
  cplx s{};
  for (int x = 0; x < G.order(); ++x) s += f.values[x] * std::conj(h.values[x]);
  return s / static_cast<double>(G.order());
}

RaceFunction race_class_function(const AbelianGroup& G, int a, int b) {
  if (a < 0 || a >= G.order() || b < 0 || b >= G.order())
    throw ValidationError(kModule, "element index out of range");
  if (a == b) throw ValidationError(kModule, "race classes must be distinct");
  RaceFunction t{std::vector<std::int64_t>(G.order(), 0)};
  t.values[a] = G.order();
  t.values[b] = -static_cast<std::int64_t>(G.order());
  return t;
}

cplx fourier_coefficient(const AbelianGroup& G, const RaceFunction& t, int chi) {
  if (static_cast<int>(t.values.size()) != G.order())
    throw ValidationError(kModule, "class function domain mismatch");
  cplx s{};
  for (int x = 0; x < G.order(); ++x)
    if (t.values[x]) s += static_cast<double>(t.values[x]) * std::conj(G.character_value(chi, x));
  return s / static_cast<double>(G.order());
}

cplx fourier_coefficient(const AbelianGroup& G, const ClassFunction& t, int chi) {
  return inner_product(G, t, character_function(G, chi));
}

}  // namespace primerace
