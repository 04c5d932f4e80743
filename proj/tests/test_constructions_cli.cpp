#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "primerace/cache.hpp"
#include "primerace/cli.hpp"
#include "primerace/constructions.hpp"
#include "primerace/errors.hpp"
#include "primerace/io.hpp"
#include "primerace/race.hpp"

using namespace primerace;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("primerace-test-" + std::to_string(::getpid()) + "-" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

struct Run {
  int code;
  std::string out, err;
};

Run cli(std::vector<std::string> args, const fs::path& cache) {
  args.insert(args.begin(), {"--cache-dir", cache.string()});
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST(Constructions, PrimeStepHalf) {
  const auto s = prime_density_step(5, 0.5);
  ASSERT_FALSE(s.primes.empty());
  EXPECT_TRUE(s.certificate.valid());
  EXPECT_LE(s.achieved_gap, s.lemma_bound);
  EXPECT_TRUE(verify_prime_density(5, 0.5, s.primes, s.achieved_gap, s.doublings).valid());
  for (const auto& p : s.primes) {
    EXPECT_TRUE(is_prime(p));
    EXPECT_EQ(mpz_class(p % 4), 1);
    EXPECT_GT(p, 5);
  }
}

TEST(Constructions, PrimeStepTamperedCertificateFails) {
  const auto s = prime_density_step(5, 0.5);
  auto primes = s.primes;
  primes.back() = next_prime_1mod4(primes.back() * 4);
  EXPECT_FALSE(verify_prime_density(5, 0.5, primes, s.achieved_gap, s.doublings).valid());
}

TEST(Constructions, PrimeStepErrors) {
  EXPECT_THROW(prime_density_step(5, 0.0), ValidationError);
  EXPECT_THROW(prime_density_step(5, 1.0), ValidationError);
  EXPECT_THROW(prime_density_step(4, 0.5), ValidationError);
  EXPECT_THROW(prime_density_step(5, 0.01, 1), ComputationError);
  ConstructionCaps tiny;
  tiny.max_bits = 8;
  EXPECT_THROW(prime_density_step(BigInt(1) << 20, 0.9, 8, tiny), ComputationError);
}

TEST(Constructions, PrimeStepNearOneIsShort) {
  const auto s = prime_density_step(5, 0.9);
  EXPECT_LE(s.primes.size(), 2u);
  EXPECT_TRUE(s.certificate.valid());
}

TEST(Constructions, UDense) {
  const std::vector<double> one{0.5};
  const auto f = build_u_dense_family(one);
  ASSERT_EQ(f.blocks.size(), 1u);
  const auto F = std::make_shared<const FieldModel>(multiquadratic(f.primes));
  RaceSpec spec;
  spec.field = F;
  spec.classes = {0, 1};
  const RaceContext ctx(spec);
  const int last = F->sigma(static_cast<int>(f.primes.size()) - 1);
  EXPECT_NEAR(std::abs(ctx.U(last)), f.blocks[0].ratio, 1e-12);
  const std::vector<double> two{1.0 / 3, 2.0 / 3};
  const auto g = build_u_dense_family(two);
  for (const auto& b : g.blocks) EXPECT_TRUE(b.certificate.valid());
  EXPECT_TRUE(build_u_dense_family(std::vector<double>{}).blocks.empty());
  EXPECT_THROW(build_u_dense_family(std::vector<double>{1.5}), ValidationError);
}

TEST(Constructions, BDense) {
  const std::vector<BDenseTarget> t{{3.0, 0.3}};
  const auto f = build_b_dense_family(t);
  ASSERT_EQ(f.blocks.size(), 1u);
  EXPECT_TRUE(f.blocks[0].certificate.valid());
  EXPECT_TRUE(verify_b_density({}, f.blocks[0].primes, t[0]).valid());
  EXPECT_LT(std::abs(f.blocks[0].achieved - 3.0), 0.3);
  const auto F = multiquadratic(f.primes);
  double sum = 0.0;
  for (const auto& p : f.primes) sum += log_big(p);
  const double n = static_cast<double>(f.primes.size());
  const double index = F.group().r() / std::sqrt(log_discriminant(F));
  EXPECT_NEAR(index, std::sqrt(2.0) * std::sqrt(std::pow(2.0, n) / sum), 1e-12);
  EXPECT_TRUE(build_b_dense_family(std::vector<BDenseTarget>{}).blocks.empty());
  EXPECT_THROW(build_b_dense_family(std::vector<BDenseTarget>{{-1.0, 0.1}}), ValidationError);
}

TEST(Constructions, TheoremC) {
  const auto tc = build_theorem_c_prefix(2);
  ASSERT_EQ(tc.primes.size(), 2u);
  EXPECT_TRUE(tc.certificate.valid());
  const auto rows = moderacy_report(multiquadratic_tower(tc.primes));
  for (const auto& w : rows) EXPECT_LE(w.two_moderacy_index, std::ldexp(1.0, -w.depth));
  EXPECT_TRUE(build_theorem_c_prefix(0).primes.empty());
  EXPECT_THROW(build_theorem_c_prefix(3), ComputationError);
  EXPECT_THROW(build_theorem_c_prefix(5), ValidationError);
  auto bad = tc.primes;
  bad[1] = 13;
  EXPECT_FALSE(verify_theorem_c(bad).valid());
}

TEST(Constructions, TwoMod) {
  TwoModSchedule s{{0.6}, 1.0};
  const auto f = build_2mod_u_dense(s);
  EXPECT_TRUE(f.certificate.valid());
  const auto rows = moderacy_report(multiquadratic_tower(f.primes));
  EXPECT_GE(rows.back().u_max, 0.5 - 0.05);
  EXPECT_LT(rows.back().two_moderacy_index, rows.front().two_moderacy_index);
  EXPECT_THROW(build_2mod_u_dense({{0.4}, 1.0}), ValidationError);
}

TEST(Constructions, ModeracyReport) {
  const std::vector<FieldModel> quad{multiquadratic({13})};
  const auto q = moderacy_report(quad);
  EXPECT_EQ(q[0].r_G, 2);
  EXPECT_NEAR(q[0].two_moderacy_index, 2 / std::sqrt(std::log(13.0)), 1e-14);
  std::vector<FieldModel> cyc;
  for (std::int64_t p : {7, 13, 19}) {
    std::vector<std::int64_t> cubes;
    for (std::int64_t u = 1; u < p; ++u)
      if (std::find(cubes.begin(), cubes.end(), u * u * u % p) == cubes.end()) cubes.push_back(u * u * u % p);
    cyc.push_back(cyclotomic_subgroup(p, cubes));
  }
  for (const auto& w : moderacy_report(cyc)) {
    EXPECT_EQ(w.uniform_criterion, 0.0);
    EXPECT_GE(w.u_min, 0.0);
    EXPECT_LE(w.u_max, 1.0);
  }
}

TEST(Io, RoundTripAllFormats) {
  Result r;
  r.command = "test";
  r.set("text", std::string("a,b \"quoted\""));
  r.set("int", std::int64_t{-42});
  r.set("x", num(1.0 / 3));
  r.set("big", num(6.02214076e23));
  r.set("whole", num(4.0));
  r.set("inf", num(INFINITY));
  r.set("v", vec(std::vector<double>{1.5, -2.0, 1e-9}));
  r.set("m", mat({{1.0, 0.25}, {0.25, 1.0}}));
  auto& t = r.table("rows", {"name", "value"});
  t.rows.push_back({std::string("first"), num(0.1)});
  t.rows.push_back({std::string("second"), std::int64_t{7}});
  for (auto f : {Format::Table, Format::Csv, Format::Json}) {
    const auto text = serialize(r, f);
    EXPECT_EQ(parse_result(text, f), r) << text;
  }
  EXPECT_EQ(parse_format("json-text"), Format::Json);
  EXPECT_THROW(parse_format("xml"), ValidationError);
  EXPECT_EQ(round12(-0.0), 0.0);
  EXPECT_FALSE(std::signbit(round12(-1e-300 * 1e-300)));
}

TEST(Io, FieldSpecs) {
  const auto F = parse_field_spec(R"({"type":"multiquadratic","primes":[5,13,17]})");
  EXPECT_EQ(F.group().order(), 8);
  const auto C = parse_field_spec(R"({"type":"cyclotomic","modulus":60,"subgroup":[1,49]})");
  EXPECT_EQ(C.group().order(), 8);
  EXPECT_EQ(parse_field_spec(F.canonical_spec()).fingerprint(), F.fingerprint());
  EXPECT_THROW(parse_field_spec(R"({"type":"quartic"})"), ValidationError);
  EXPECT_THROW(parse_field_spec("{not json"), ValidationError);
  EXPECT_THROW(parse_field_spec("/nonexistent/field.json"), ValidationError);
  TempDir d;
  std::ofstream(d.path / "f.json") << R"({"type":"multiquadratic","primes":["5"]})";
  EXPECT_EQ(parse_field_spec((d.path / "f.json").string()).group().order(), 2);
}

TEST(Cache, HitAndColdPathsAgree) {
  TempDir d;
  const Cache cache(d.path);
  const auto F = multiquadratic({5, 13});
  bool hit = true;
  const auto cold = conductor_table(F, &cache, &hit);
  EXPECT_FALSE(hit);
  const auto warm = conductor_table(F, &cache, &hit);
  EXPECT_TRUE(hit);
  EXPECT_EQ(cold, warm);
  const auto a = cached_archive(F, 20.0, &cache, &hit);
  EXPECT_FALSE(hit);
  const auto b = cached_archive(F, 20.0, &cache, &hit);
  EXPECT_TRUE(hit);
  const auto c = cached_archive(F, 20.0, nullptr, &hit);
  EXPECT_EQ(a.entries, b.entries);
  EXPECT_EQ(a.entries, c.entries);
  EXPECT_THROW(cache.get("../escape"), ValidationError);
  cache.put("k", "v");
  EXPECT_EQ(cache.get("k"), std::optional<std::string>("v"));
  EXPECT_FALSE(cache.get("missing").has_value());
}

TEST(Cli, OrthantExample) {
  TempDir d;
  const auto r = cli({"orthant", "--sigma", "gamma:3", "--x", "0,0,0", "--samples", "131072", "--seed", "7"}, d.path);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = parse_result(r.out, Format::Table);
  const double v = std::get<double>(*res.find("value"));
  const double se = std::get<double>(*res.find("stderr"));
  EXPECT_NEAR(v, 1.0 / 24, 3 * se + 1e-12);
  EXPECT_EQ(std::get<std::string>(*res.find("seed")), "7");
}

TEST(Cli, RaceDensityTwoWay) {
  TempDir d;
  const auto r = cli({"race", "density", "--field", R"({"type":"multiquadratic","primes":[5,13]})", "--classes",
                      "e:(0,0)", "e:(1,0)", "--format", "json"},
                     d.path);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = parse_result(r.out, Format::Json);
  EXPECT_EQ(std::get<std::string>(*res.find("formula")), "two-way");
  EXPECT_GT(std::get<double>(*res.find("value")), 0.5);
  EXPECT_EQ(std::get<double>(*res.find("stderr")), 0.0);
}

TEST(Cli, CyclotomicResidueClasses) {
  TempDir d;
  const auto r = cli({"race", "stats", "--field", R"({"type":"cyclotomic","modulus":5,"subgroup":[1]})", "--classes",
                      "1,2,4"},
                     d.path);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("lambda_min"), std::string::npos);
}

TEST(Cli, ZerosIngestRejectsUnsorted) {
  TempDir d;
  std::ofstream(d.path / "bad.csv") << "height=20\n1,9.8\n1,6.6\n";
  const auto r = cli({"zeros", "ingest", "--field", R"({"type":"multiquadratic","primes":[5]})", "--file",
                      (d.path / "bad.csv").string()},
                     d.path);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find(":3"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("zeros"), std::string::npos);
}

TEST(Cli, ZerosFindWritesArchive) {
  TempDir d;
  const auto out = (d.path / "q4.txt").string();
  const auto r = cli({"zeros", "find", "--q", "4", "--height", "10", "--out", out}, d.path);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto F = cyclotomic_subgroup(4, {1});
  const auto a = ingest_zeros(out, F);
  ASSERT_EQ(a.entries.at(1).size(), 1u);
  EXPECT_EQ(cli({"zeros", "find", "--q", "8", "--height", "10"}, d.path).code, 2);
}

TEST(Cli, CacheHitReproducesOutput) {
  TempDir d;
  const std::vector<std::string> args{"race", "density", "--field", R"({"type":"multiquadratic","primes":[5,13]})",
                                      "--classes", "e:(0,0),e:(1,0),e:(0,1)", "--mode", "zeros", "--height", "20"};
  const auto a = cli(args, d.path), b = cli(args, d.path);
  ASSERT_EQ(a.code, 0) << a.err;
  auto ra = parse_result(a.out, Format::Table), rb = parse_result(b.out, Format::Table);
  EXPECT_EQ(std::get<std::string>(*ra.find("archive")), "computed");
  EXPECT_EQ(std::get<std::string>(*rb.find("archive")), "cache");
  for (auto* r : {&ra, &rb}) std::erase_if(r->fields, [](const auto& kv) { return kv.first == "archive"; });
  EXPECT_EQ(ra, rb);
}

TEST(Cli, FamilyReportCsv) {
  TempDir d;
  fs::create_directories(d.path / "specs");
  std::ofstream(d.path / "specs" / "a.json") << R"({"type":"multiquadratic","primes":[5]})";
  std::ofstream(d.path / "specs" / "b.json") << R"({"type":"multiquadratic","primes":[5,13]})";
  const auto r = cli({"family", "report", "--specs", (d.path / "specs").string()}, d.path);
  ASSERT_EQ(r.code, 0) << r.err;
  const auto res = parse_result(r.out, Format::Csv);
  ASSERT_EQ(res.tables.size(), 1u);
  EXPECT_EQ(res.tables[0].second.rows.size(), 2u);
}

TEST(Cli, ConstructCertificates) {
  TempDir d;
  const auto r = cli({"construct", "prime-step", "--ell", "5", "--alpha", "0.5", "--format", "csv"}, d.path);
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(std::get<std::int64_t>(*parse_result(r.out, Format::Csv).find("valid")), 1);
  EXPECT_EQ(cli({"construct", "theorem-c", "--n", "3"}, d.path).code, 1);
}

TEST(Cli, ParseErrors) {
  TempDir d;
  auto r = cli({"orthant"}, d.path);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("Usage"), std::string::npos);
  EXPECT_EQ(cli({"bogus"}, d.path).code, 2);
  EXPECT_EQ(cli({"orthant", "--sigma", "gamma:2", "--unknown"}, d.path).code, 2);
  EXPECT_EQ(cli({"--help"}, d.path).code, 0);
  EXPECT_EQ(cli({"orthant", "--sigma", "gamma:2", "--format", "xml"}, d.path).code, 2);
  r = cli({"race", "stats", "--field", R"({"type":"multiquadratic","primes":[7]})", "--classes", "e:(0),e:(1)"},
          d.path);
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("field_models"), std::string::npos) << r.err;
}
