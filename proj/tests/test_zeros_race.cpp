#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "primerace/errors.hpp"
#include "primerace/lfunction.hpp"
#include "primerace/race.hpp"
#include "primerace/zeros.hpp"

using namespace primerace;

namespace {

std::shared_ptr<const FieldModel> mq(std::vector<BigInt> ps) {
  return std::make_shared<const FieldModel>(multiquadratic(std::move(ps)));
}

RaceSpec spec_of(std::shared_ptr<const FieldModel> F, std::vector<int> classes) {
  RaceSpec s;
  s.field = std::move(F);
  s.classes = std::move(classes);
  return s;
}

int el(const FieldModel& F, std::vector<int> e) { return F.group().index_of_exponents(e); }

ZeroArchive parse(const std::string& text, const FieldModel& F) {
  std::istringstream in(text);
  return parse_archive(in, F, "test");
}

}  // namespace

TEST(LFunction, Kronecker) {
  EXPECT_EQ(kronecker(-4, 3), -1);
  EXPECT_EQ(kronecker(-4, 5), 1);
  EXPECT_EQ(kronecker(5, 2), -1);
  EXPECT_EQ(kronecker(8, 7), 1);
  EXPECT_EQ(kronecker(-8, 3), 1);
  EXPECT_TRUE(is_fundamental_discriminant(-4));
  EXPECT_TRUE(is_fundamental_discriminant(12));
  EXPECT_FALSE(is_fundamental_discriminant(-12));
  EXPECT_FALSE(is_fundamental_discriminant(9));
}

TEST(LFunction, HurwitzMatchesZeta) {
  const cplx z2 = hurwitz_zeta(2.0, 1.0);
  EXPECT_NEAR(z2.real(), M_PI * M_PI / 6, 1e-12);
  const cplx l = RealDirichletL(-4).value(2.0);
  EXPECT_NEAR(l.real(), 0.915965594177219015, 1e-11);
}

TEST(Zeros, FirstZeroMod4) {
  const auto z = find_zeros_real_character(4, 10.0);
  ASSERT_EQ(z.size(), 1u);
  EXPECT_GT(z[0], 6.0);
  EXPECT_LT(z[0], 6.1);
  EXPECT_LT(std::abs(RealDirichletL(-4).value({0.5, z[0]})), 1e-8);
}

TEST(Zeros, CountAuditAndLowHeight) {
  const RealDirichletL L(5);
  const auto z = find_zeros_real_character(L, 5.0);
  EXPECT_LE(std::abs(static_cast<double>(z.size()) - L.zero_count_estimate(5.0)), 2.0);
  EXPECT_TRUE(find_zeros_real_character(5, 0.1).empty());
}

TEST(Zeros, ParityAndValidation) {
  EXPECT_EQ(real_character_discriminant(4), -4);
  EXPECT_EQ(real_character_discriminant(5), 5);
  EXPECT_EQ(real_character_discriminant(8, 0), 8);
  EXPECT_EQ(real_character_discriminant(8, 1), -8);
  EXPECT_THROW(real_character_discriminant(8), ValidationError);
  EXPECT_THROW(real_character_discriminant(6), ValidationError);
  EXPECT_THROW(real_character_discriminant(5, 1), ValidationError);
  EXPECT_THROW(find_zeros_real_character(4, 500.0), ValidationError);
}

TEST(Zeros, ZeroSumMonotoneInHeight) {
  const auto F = multiquadratic({5});
  const auto a = compute_archive(F, 40.0);
  double prev = 0.0;
  for (double T : {10.0, 20.0, 40.0}) {
    ZeroArchive cut = a;
    cut.height = T;
    for (auto& [chi, gs] : cut.entries) std::erase_if(gs, [&](double g) { return g > T; });
    const double s = zero_sum(F, &cut, 1, ZeroSumMode::zero_data());
    EXPECT_GE(s, prev);
    prev = s;
  }
}

TEST(Zeros, ZeroSumModes) {
  const auto F = multiquadratic({5, 13});
  const int chi5 = el(F, {1, 0});
  EXPECT_NEAR(zero_sum(F, nullptr, chi5, ZeroSumMode::asymptotic()), std::log(5.0), 1e-15);
  EXPECT_THROW(zero_sum(F, nullptr, 0, ZeroSumMode::asymptotic()), ValidationError);
  EXPECT_EQ(n_l(F, nullptr, ZeroSumMode::asymptotic()), log_discriminant(F));
  EXPECT_NEAR(n_l(*std::make_shared<FieldModel>(cyclotomic_subgroup(5, {1})), nullptr, ZeroSumMode::asymptotic()),
              3 * std::log(5.0), 1e-13);
  const auto empty = parse("height=10\n01,\n10,\n11,\n", F);
  EXPECT_EQ(zero_sum(F, &empty, chi5, ZeroSumMode::zero_data()), 0.0);
  EXPECT_EQ(n_l(F, &empty, ZeroSumMode::zero_data()), 0.0);
  EXPECT_GT(zero_sum(F, &empty, chi5, ZeroSumMode::zero_data(true)), 0.0);
  EXPECT_THROW(zero_sum(F, nullptr, chi5, ZeroSumMode::zero_data()), ValidationError);
}

TEST(Zeros, Mod4SumMatchesExactConstant) {
  const auto F = cyclotomic_subgroup(4, {1});
  const auto a = compute_archive(F, 100.0);
  const double s = zero_sum(F, &a, 1, ZeroSumMode::zero_data(true));
  // log(q/pi) + psi((1+a)/2) + 2 L'/L(1, chi_{-4}), a = 1
  EXPECT_NEAR(s, 0.1556, 5e-3);
}

TEST(Zeros, ArchiveParsing) {
  const auto F = multiquadratic({5});
  const auto a = parse("# comment\nheight=20\n1,6.64\n1,9.83\n", F);
  EXPECT_EQ(a.height, 20.0);
  ASSERT_EQ(a.entries.at(1).size(), 2u);
  EXPECT_EQ(a.provenance, Provenance::Ingested);
  EXPECT_THROW(parse("height=20\n1,9.83\n1,6.64\n", F), ValidationError);
  EXPECT_THROW(parse("height=20\n1,-3.2\n", F), ValidationError);
  EXPECT_THROW(parse("height=20\n1,25\n", F), ValidationError);
  EXPECT_THROW(parse("height=20\n7,2\n", F), ValidationError);
  EXPECT_THROW(parse("1,2\n", F), ValidationError);
  try {
    parse("height=20\n01,6\n", multiquadratic({5, 13}));
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find("10"), std::string::npos);
  }
  try {
    parse("height=20\n1,6.6\n1,-3.2\n", F);
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(":3"), std::string::npos);
  }
}

TEST(Zeros, ArchiveRoundTrip) {
  const auto F = multiquadratic({5, 13});
  const auto a = compute_archive(F, 30.0);
  std::stringstream ss;
  write_archive(ss, a, F);
  const auto b = parse_archive(ss, F, "rt");
  EXPECT_EQ(a.entries, b.entries);
  EXPECT_EQ(a.height, b.height);
}

TEST(Race, MeansAndVariances) {
  const auto F = mq({5, 13});
  const int s1 = F->sigma(0), s2 = F->sigma(1);
  const RaceContext ctx(spec_of(F, {0, s1}));
  const auto t = race_class_function(F->group(), 0, s1);
  EXPECT_NEAR(ctx.mean_E(t), -4.0, 1e-12);
  EXPECT_NEAR(ctx.mean_E(race_class_function(F->group(), s1, s2)), 0.0, 1e-12);
  // Two-sided zero sums: V = sum over chi != 1 of |t_hat|^2 w with w = 2 * log A(chi).
  EXPECT_NEAR(ctx.variance_V(t), 4 * (std::log(5.0) + std::log(65.0)), 1e-10);
  EXPECT_EQ(ctx.variance_V(RaceFunction{std::vector<std::int64_t>(4, 0)}), 0.0);
  EXPECT_THROW(ctx.mean_E(constant_function(F->group(), 1.0)), ValidationError);
  EXPECT_THROW(ctx.bias_B(RaceFunction{std::vector<std::int64_t>(4, 0)}), ComputationError);
  EXPECT_NEAR(ctx.bias_B(t), -ctx.bias_B(race_class_function(F->group(), s1, 0)), 1e-15);
}

TEST(Race, CentralOrdersShiftMean) {
  const auto F = mq({5, 13});
  const int s1 = F->sigma(0), s2 = F->sigma(1);
  auto spec = spec_of(F, {s1, s2});
  const double base = RaceContext(spec).mean_E(race_class_function(F->group(), s1, s2));
  const int chi = el(*F, {1, 0});  // chi(s1) - chi(s2) = -2
  spec.central_orders[chi] = 1;
  EXPECT_NEAR(RaceContext(spec).mean_E(race_class_function(F->group(), s1, s2)), base + 2.0, 1e-12);
  spec.central_orders = {{0, 1}};
  EXPECT_THROW(RaceContext{spec}, ValidationError);
}

TEST(Race, UAndSTMaps) {
  const auto F = mq({5, 13});
  const int s1 = F->sigma(0), s12 = el(*F, {1, 1});
  const RaceContext ctx(spec_of(F, {0, s1}));
  EXPECT_NEAR(ctx.U(s1), -std::log(5.0) / std::log(65.0), 1e-14);
  EXPECT_NEAR(ctx.U(s12), 0.0, 1e-14);
  for (int a = 1; a < 4; ++a) EXPECT_LE(std::abs(ctx.U(a)), 1.0);
  EXPECT_EQ(ctx.S(s1, s1), 0.0);
  EXPECT_THROW(ctx.S(0, s1), ValidationError);
  EXPECT_NEAR(ctx.T(0, s1), 2 + 2 * std::log(5.0) / std::log(65.0), 1e-13);
  for (int a = 0; a < 4; ++a)
    for (int b = 0; b < 4; ++b)
      if (a != b)
        EXPECT_NEAR(ctx.T(a, b) * ctx.n_l(), ctx.variance_V(race_class_function(F->group(), a, b)),
                    1e-12 * ctx.n_l());
}

TEST(Race, RhoClosedFormsMatchDirect) {
  for (const auto& F : {mq({5, 13, 17}),
                        std::make_shared<const FieldModel>(cyclotomic_subgroup(21, {1})),
                        std::make_shared<const FieldModel>(cyclotomic_subgroup(16, {1}))}) {
    const RaceContext ctx(spec_of(F, {0, 1}));
    const auto& G = F->group();
    const int n = G.order();
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          if (a == b || b == c || a == c) continue;
          const double direct = ctx.correlation_rho(race_class_function(G, a, b), race_class_function(G, b, c));
          EXPECT_NEAR(direct, ctx.rho_adjacent_closed_form(a, b, c), 1e-12);
          for (int d = 0; d < n; ++d) {
            if (d == c) continue;
            const double dd = ctx.correlation_rho(race_class_function(G, a, b), race_class_function(G, c, d));
            EXPECT_NEAR(dd, ctx.rho_closed_form(a, b, c, d), 1e-12);
          }
        }
    const auto t = race_class_function(G, 0, 1);
    EXPECT_NEAR(ctx.correlation_rho(t, t), 1.0, 1e-15);
  }
}

TEST(Race, CovarianceReport) {
  const auto F = mq({5, 13});
  const auto r1 = RaceContext(spec_of(F, {0, 1})).covariance_matrix();
  EXPECT_EQ(r1.Delta.rows(), 1);
  EXPECT_NEAR(r1.lambda_min, 1.0, 1e-15);
  const auto r3 = RaceContext(spec_of(F, {0, 1, 2, 3})).covariance_matrix();
  EXPECT_EQ(r3.Delta.rows(), 3);
  EXPECT_GT(r3.lambda_min, 0.0);
  EXPECT_TRUE(r3.Delta.isApprox(r3.Delta.transpose()));
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(r3.Delta(i, i), 1.0, 1e-15);
  EXPECT_NEAR(r3.t_hat_inf, 2.0, 1e-14);
}

TEST(Race, SpecValidation) {
  const auto F = mq({5, 13});
  EXPECT_THROW(RaceContext(spec_of(F, {0})), ValidationError);
  EXPECT_THROW(RaceContext(spec_of(F, {0, 0})), ValidationError);
  EXPECT_THROW(RaceContext(spec_of(F, {0, 9})), ValidationError);
  auto s = spec_of(F, {0, 1});
  s.mode = ZeroSumMode::zero_data();
  EXPECT_THROW(RaceContext{s}, ValidationError);
}

TEST(Race, LiftedClassesApproachGamma) {
  const auto deep = mq({5, 13, 17, 29, 37, 41});
  const RaceContext ctx(spec_of(deep, {0, el(*deep, {1, 0, 0, 0, 0, 0}), el(*deep, {0, 1, 0, 0, 0, 0})}));
  const auto rep = ctx.covariance_matrix();
  const auto gamma = structured_matrices(2, 0.0).Gamma;
  EXPECT_LT((rep.Delta - gamma).cwiseAbs().maxCoeff(), 0.2);
}

TEST(Race, StructuredMatrices) {
  const auto m = structured_matrices(4, 0.5);
  EXPECT_NEAR(m.det_closed_form, 5.0 / 16, 1e-15);
  EXPECT_NEAR(m.Sigma.determinant(), 5.0 / 16, 1e-13);
  EXPECT_NEAR(structured_matrices(2, 0.3).Sigma.determinant(), 1 - 0.09, 1e-14);
  EXPECT_TRUE(structured_matrices(5, -0.5).Sigma.isApprox(structured_matrices(5, 0.0).Gamma));
}
