#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "primerace/errors.hpp"
#include "primerace/field.hpp"
#include "primerace/group.hpp"
#include "primerace/primes.hpp"

using namespace primerace;

namespace {

constexpr double kPi = std::numbers::pi;

int el(const AbelianGroup& G, std::vector<int> e) { return G.index_of_exponents(e); }

}  // namespace

TEST(Group, Orders) {
  EXPECT_EQ(make_group({2, 2}).order(), 4);
  EXPECT_EQ(make_group({5}).order(), 5);
  const auto G = make_group({4, 3});
  EXPECT_EQ(G.order(), 12);
  EXPECT_EQ(G.exponent(), 12);
}

TEST(Group, RejectsBadFactors) {
  EXPECT_THROW(make_group({}), ValidationError);
  EXPECT_THROW(make_group({2, 1}), ValidationError);
  EXPECT_THROW(make_group({0}), ValidationError);
}

TEST(Group, LexicographicEnumeration) {
  const auto G = make_group({2, 3});
  EXPECT_EQ(G.element(0).exponents, (std::vector<int>{0, 0}));
  EXPECT_EQ(G.element(1).exponents, (std::vector<int>{0, 1}));
  EXPECT_EQ(G.element(3).exponents, (std::vector<int>{1, 0}));
  for (int i = 0; i < G.order(); ++i) EXPECT_EQ(G.index_of(G.element(i)), i);
}

TEST(Group, CharacterValues) {
  const auto G4 = make_group({4});
  const auto v = G4.character_value(CharacterIndex{{1}}, GroupElement{{3}});
  EXPECT_NEAR(v.real(), 0.0, 1e-15);
  EXPECT_NEAR(v.imag(), -1.0, 1e-15);
  const auto K = make_group({2, 2});
  EXPECT_NEAR(K.character_value(CharacterIndex{{1, 0}}, GroupElement{{1, 1}}).real(), -1.0, 1e-15);
  for (int g = 0; g < K.order(); ++g) EXPECT_EQ(K.character_value(0, g), cplx(1.0));
}

TEST(Group, ShapeMismatch) {
  const auto G = make_group({2, 2});
  EXPECT_THROW(G.character_value(CharacterIndex{{1}}, GroupElement{{1, 0}}), ValidationError);
  EXPECT_THROW(G.index_of(GroupElement{{2, 0}}), ValidationError);
}

TEST(Group, Orthogonality) {
  std::mt19937 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<int> f;
    int n = 1;
    while (true) {
      const int k = 2 + static_cast<int>(rng() % 5);
      if (n * k > 64) break;
      f.push_back(k);
      n *= k;
    }
    const auto G = make_group(f);
    for (int a = 0; a < G.order(); ++a)
      for (int b = 0; b < G.order(); ++b) {
        const auto ip = inner_product(G, character_function(G, a), character_function(G, b));
        EXPECT_NEAR(std::abs(ip - cplx(a == b ? 1.0 : 0.0)), 0.0, 1e-12);
      }
    for (int chi = 1; chi < G.order(); ++chi) {
      cplx s = 0;
      for (int a = 1; a < G.order(); ++a) s += G.character_value(chi, a);
      EXPECT_NEAR(std::abs(s + 1.0), 0.0, 1e-12);
    }
  }
}

TEST(Group, InnerProductDomainMismatch) {
  const auto G = make_group({2});
  ClassFunction f{{1.0, 2.0, 3.0}};
  EXPECT_THROW(inner_product(G, f, constant_function(G, 1.0)), ValidationError);
}

TEST(Group, SquareRootCounts) {
  EXPECT_EQ(make_group({2, 2, 2}).r(), 8);
  EXPECT_EQ(make_group({5}).r(), 1);
  const auto G = make_group({4, 2});
  const auto c = G.square_root_counts();
  EXPECT_EQ(G.r(), 4);
  EXPECT_EQ(c[el(G, {1, 0})], 0);
  EXPECT_EQ(std::accumulate(c.begin(), c.end(), 0), G.order());
}

TEST(Group, RaceClassFunction) {
  const auto G = make_group({2});
  const auto t = race_class_function(G, 0, 1);
  EXPECT_EQ(t.values, (std::vector<std::int64_t>{2, -2}));
  EXPECT_THROW(race_class_function(G, 1, 1), ValidationError);
  const auto G3 = make_group({3});
  const auto t3 = race_class_function(G3, 0, 1);
  EXPECT_NEAR(std::abs(fourier_coefficient(G3, t3, 0)), 0.0, 1e-15);
  const cplx expect = 1.0 - std::exp(cplx(0, -2 * kPi / 3));
  EXPECT_NEAR(std::abs(fourier_coefficient(G3, t3, 1) - expect), 0.0, 1e-14);
}

TEST(Group, Telescoping) {
  const auto G = make_group({4, 2});
  for (int a = 0; a < G.order(); ++a)
    for (int b = 0; b < G.order(); ++b)
      for (int c = 0; c < G.order(); ++c)
        if (a != b && b != c && a != c)
          EXPECT_EQ(race_class_function(G, a, b) + race_class_function(G, b, c), race_class_function(G, a, c));
}

TEST(Group, ElementNotation) {
  const auto G = make_group({4, 2});
  EXPECT_EQ(G.format_element(el(G, {3, 1})), "e:(3,1)");
  EXPECT_EQ(G.parse_element("e:(3,1)"), el(G, {3, 1}));
  EXPECT_EQ(G.parse_character("c:(1,0)"), el(G, {1, 0}));
  EXPECT_THROW(G.parse_element("e:(3)"), ValidationError);
  EXPECT_THROW(G.parse_element("x:(1,1)"), ValidationError);
  EXPECT_THROW(G.parse_element("e:(4,0)"), ValidationError);
}

TEST(Primes, Primality) {
  EXPECT_TRUE(is_prime(BigInt(2)));
  EXPECT_TRUE(is_prime(BigInt(13)));
  EXPECT_FALSE(is_prime(BigInt(1)));
  EXPECT_FALSE(is_prime(BigInt(561)));
  EXPECT_FALSE(is_prime(BigInt("3825123056546413051")));
  EXPECT_TRUE(is_prime(BigInt("170141183460469231731687303715884105727")));
  EXPECT_EQ(next_prime_1mod4(BigInt(14)), BigInt(17));
  EXPECT_EQ(next_prime_1mod4(BigInt(17)), BigInt(29));
  const BigInt x("1000000000000000000000000");
  EXPECT_EQ(next_prime_1mod4(x), next_prime_1mod4_serial(x));
}

TEST(Primes, LogBig) {
  EXPECT_NEAR(log_big(BigInt(65)), std::log(65.0), 1e-15);
  BigInt big = 1;
  big <<= 3000;
  EXPECT_NEAR(log_big(big) / (3000 * std::log(2.0)), 1.0, 1e-14);
  EXPECT_EQ(bit_length(BigInt(256)), 9u);
}

TEST(Field, MultiquadraticBasics) {
  const auto F = multiquadratic({5, 13});
  EXPECT_EQ(F.group().order(), 4);
  ASSERT_EQ(F.primes().size(), 2u);
  EXPECT_NEAR(log_discriminant(F), 2 * std::log(65.0), 1e-12);
  EXPECT_NEAR(log_discriminant(multiquadratic({5})), std::log(5.0), 1e-14);
  const int s1 = F.sigma(0);
  const int chi_both = el(F.group(), {1, 1});
  EXPECT_NEAR(log_artin_conductor(F, chi_both), std::log(65.0), 1e-14);
  EXPECT_EQ(log_artin_conductor(F, 0), 0.0);
  const int chi5 = el(F.group(), {1, 0});
  EXPECT_EQ(conductor_exponent(F, chi5, 5), 1);
  EXPECT_EQ(conductor_exponent(F, 0, 5), 0);
  EXPECT_EQ(conductor_exponent(F, chi5, 7), 0);
  EXPECT_NEAR(signed_conductor_sum(F, s1), -2 * std::log(5.0), 1e-13);
}

TEST(Field, MultiquadraticErrors) {
  EXPECT_THROW(multiquadratic({13, 5}), ValidationError);
  EXPECT_THROW(multiquadratic({5, 5}), ValidationError);
  EXPECT_THROW(multiquadratic({7}), ValidationError);
  EXPECT_THROW(multiquadratic({21}), ValidationError);
  EXPECT_THROW(multiquadratic({}), ValidationError);
}

TEST(Field, CyclotomicBasics) {
  const auto F4 = cyclotomic_subgroup(4, {1});
  EXPECT_EQ(F4.group().order(), 2);
  EXPECT_NEAR(log_artin_conductor(F4, 1), std::log(4.0), 1e-14);
  const auto F5 = cyclotomic_subgroup(5, {1});
  EXPECT_EQ(F5.group().order(), 4);
  EXPECT_NEAR(log_discriminant(F5), 3 * std::log(5.0), 1e-13);
  const auto Q5 = cyclotomic_subgroup(5, {1, 4});
  const auto M5 = multiquadratic({5});
  EXPECT_NEAR(Q5.log_conductor(1), M5.log_conductor(1), 1e-14);
  const auto F9 = cyclotomic_subgroup(9, {1, 8});
  int order3 = -1;
  for (int chi = 0; chi < F9.group().order(); ++chi)
    if (F9.group().character_order(chi) == 3) order3 = chi;
  ASSERT_GE(order3, 0);
  EXPECT_EQ(conductor_exponent(F9, order3, 3), 2);
}

TEST(Field, CyclotomicErrors) {
  EXPECT_THROW(cyclotomic_subgroup(2, {1}), ValidationError);
  EXPECT_THROW(cyclotomic_subgroup(7, {1, 2}), ValidationError);
  EXPECT_THROW(cyclotomic_subgroup(9, {1, 3}), ValidationError);
  EXPECT_THROW(cyclotomic_subgroup(9, {2}), ValidationError);
}

TEST(Field, SignedSumsNegativeAndSumToMinusLogD) {
  for (const auto& F : {multiquadratic({5, 13, 17}), cyclotomic_subgroup(60, {1, 49}), cyclotomic_subgroup(13, {1})}) {
    double total = 0.0;
    for (int a = 1; a < F.group().order(); ++a) {
      const double s = signed_conductor_sum(F, a);
      EXPECT_LE(s, 1e-9);
      total += s;
    }
    EXPECT_NEAR(total, -log_discriminant(F), 1e-9 * log_discriminant(F));
    EXPECT_THROW(signed_conductor_sum(F, 0), ValidationError);
  }
}

TEST(Field, TowerStability) {
  const std::vector<BigInt> ps{5, 13, 17, 29};
  for (std::size_t n = 1; n < ps.size(); ++n) {
    const auto small = multiquadratic({ps.begin(), ps.begin() + n});
    const auto big = multiquadratic({ps.begin(), ps.begin() + n + 1});
    for (int a = 1; a < small.group().order(); ++a) {
      auto e = small.group().element(a).exponents;
      for (int top = 0; top < 2; ++top) {
        auto lift = e;
        lift.push_back(top);
        const double s = signed_conductor_sum(big, big.group().index_of_exponents(lift));
        EXPECT_LE(std::abs(s), 2.0 * big.group().order() * log_discriminant(small));
      }
    }
  }
}

TEST(Field, LabelsAndSpecs) {
  const auto F = multiquadratic({5, 13});
  for (int chi = 0; chi < 4; ++chi) EXPECT_EQ(F.parse_label(F.label(chi)), chi);
  EXPECT_THROW(F.parse_label("zz"), ValidationError);
  EXPECT_NE(F.fingerprint(), multiquadratic({5, 17}).fingerprint());
  EXPECT_EQ(F.fingerprint(), multiquadratic({5, 13}).fingerprint());
  const auto C = cyclotomic_subgroup(8, {1, 3});
  for (int chi = 0; chi < C.group().order(); ++chi) EXPECT_EQ(C.parse_label(C.label(chi)), chi);
  EXPECT_EQ(C.element_of_unit(3), 0);
  EXPECT_THROW(C.element_of_unit(2), ValidationError);
}
