#include "primerace/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numeric>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>

#include "primerace/cache.hpp"
#include "primerace/constructions.hpp"
#include "primerace/density.hpp"
#include "primerace/errors.hpp"
#include "primerace/io.hpp"
#include "primerace/simulator.hpp"

namespace primerace {

namespace {

namespace fs = std::filesystem;
const std::string kModule = "cli";
const std::string kConvention = "delta = density of pi(x;C_1) < pi(x;C_2) < ... < pi(x;C_{r+1}), i.e. pi(x;t_i) < 0 for all i";

struct Globals {
  std::string format;
  std::uint64_t seed = 1;
  std::string cache_dir;
  bool no_cache = false;
  int threads = 0;
};

struct RaceArgs {
  std::string field;
  std::vector<std::string> classes;
  std::string mode = "asymptotic";
  std::string archive;
  double height = 100.0;
  bool tail = false;
  std::vector<std::string> central;
  long long samples = 1LL << 17;
  bool force_mc = false;
};

std::vector<std::string> split_top_level(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  int depth = 0;
  for (char c : s) {
    if (c == '(' || c == '[') ++depth;
    if (c == ')' || c == ']') --depth;
    if (c == sep && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::vector<std::string> flatten(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& it : items)
    for (auto& s : split_top_level(it, ','))
      if (!s.empty()) out.push_back(s);
  return out;
}

std::vector<double> parse_doubles(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : flatten(items)) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != s.size()) throw ValidationError(kModule, "not a number: '" + s + "'");
    out.push_back(v);
  }
  return out;
}

int parse_class(const FieldModel& F, const std::string& token) {
  const auto& G = F.group();
  if (token.starts_with("e:")) return G.parse_element(token);
  if (F.kind() == FieldKind::CyclotomicSubgroup) {
    std::size_t used = 0;
    long long u = 0;
    try {
      u = std::stoll(token, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == token.size()) return F.element_of_unit(u);
  }
  throw ValidationError(kModule, "cannot parse class '" + token + "' (use e:(..) or, for cyclotomic fields, a residue)");
}

std::string join(const std::vector<std::string>& v, const std::string& sep) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? sep : "") + v[i];
  return s;
}

Matrix to_matrix(const Eigen::MatrixXd& M) {
  Matrix out(M.rows(), Vector(M.cols()));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) out[i][j] = M(i, j);
  return out;
}

Vector to_vector(const Eigen::VectorXd& v) { return Vector(v.data(), v.data() + v.size()); }

class Session {
 public:
  Session(const Globals& g, std::ostream& out) : g_(g), out_(out) {
    if (!g.no_cache) cache_.emplace(g.cache_dir.empty() ? Cache::default_dir() : fs::path(g.cache_dir));
  }

  const Cache* cache() const { return cache_ ? &*cache_ : nullptr; }
  std::uint64_t seed() const { return g_.seed; }

  void emit(const Result& r, Format fallback = Format::Table) {
    const Format f = g_.format.empty() ? fallback : parse_format(g_.format);
    out_ << serialize(r, f);
  }

  RaceSpec race_spec(const RaceArgs& a, Result& r) {
    auto F = std::make_shared<const FieldModel>(parse_field_spec(a.field));
    RaceSpec spec;
    spec.field = F;
    for (const auto& c : flatten(a.classes)) spec.classes.push_back(parse_class(*F, c));
    for (const auto& c : flatten(a.central)) {
      const auto eq = c.rfind('=');
      if (eq == std::string::npos) throw ValidationError(kModule, "central order must be label=order, got '" + c + "'");
      const int chi = F->parse_label(c.substr(0, eq));
      int ord = 0;
      try {
        ord = std::stoi(c.substr(eq + 1));
      } catch (const std::exception&) {
        throw ValidationError(kModule, "bad central order in '" + c + "'");
      }
      spec.central_orders[chi] = ord;
    }
    r.set("field", F->canonical_spec());
    r.set("fingerprint", F->fingerprint());
    std::vector<std::string> names;
    for (int c : spec.classes) names.push_back(F->group().format_element(c));
    r.set("classes", join(names, ","));
    if (a.mode == "asymptotic") {
      if (!a.archive.empty()) throw ValidationError(kModule, "--archive requires --mode zeros");
      spec.mode = ZeroSumMode::asymptotic();
    } else if (a.mode == "zeros") {
      spec.mode = ZeroSumMode::zero_data(a.tail);
      spec.archive = std::make_shared<const ZeroArchive>(archive_for(*F, a.archive, a.height, r));
    } else {
      throw ValidationError(kModule, "unknown mode '" + a.mode + "' (asymptotic|zeros)");
    }
    r.set("mode", a.mode + (a.tail ? "+tail" : ""));
    return spec;
  }

  ZeroArchive archive_for(const FieldModel& F, const std::string& path, double height, Result& r) {
    if (!path.empty()) {
      auto a = ingest_zeros(path, F);
      r.set("archive", path);
      r.set("archive_height", num(a.height));
      return a;
    }
    bool hit = false;
    auto a = cached_archive(F, height, cache(), &hit);
    r.set("archive", std::string(hit ? "cache" : "computed"));
    r.set("archive_height", num(a.height));
    return a;
  }

 private:
  const Globals& g_;
  std::ostream& out_;
  std::optional<Cache> cache_;
};

void add_race_options(CLI::App* c, RaceArgs& a, bool sampling) {
  c->add_option("--field", a.field, "field spec: inline JSON or a path")->required();
  c->add_option("--classes", a.classes, "classes C_1,C_2,... as e:(..) or cyclotomic residues")->required();
  c->add_option("--mode", a.mode, "asymptotic|zeros")->capture_default_str();
  c->add_option("--archive", a.archive, "zero archive for --mode zeros (computed and cached when omitted)");
  c->add_option("--height", a.height, "zero height when the archive is computed")->capture_default_str();
  c->add_flag("--tail", a.tail, "add the heuristic zero-density tail to zero sums");
  c->add_option("--central", a.central, "central zero orders as label=order");
  if (sampling) {
    c->add_option("--samples", a.samples, "QMC points per shift")->capture_default_str();
    c->add_flag("--force-mc", a.force_mc, "use QMC even where a closed form exists");
  }
}

void race_stats(Session& s, const RaceArgs& a) {
  Result r;
  r.command = "race stats";
  const RaceContext ctx(s.race_spec(a, r));
  const auto rep = ctx.covariance_matrix();
  r.set("convention", kConvention);
  r.set("r", static_cast<std::int64_t>(ctx.r()));
  r.set("E", vec(to_vector(rep.E)));
  r.set("V", vec(to_vector(rep.V)));
  r.set("B", vec(to_vector(rep.B)));
  r.set("Delta", mat(to_matrix(rep.Delta)));
  r.set("lambda_min", num(rep.lambda_min));
  r.set("t_hat_inf", num(rep.t_hat_inf));
  r.set("N_L", num(ctx.n_l()));
  r.set("log_disc", num(log_discriminant(ctx.field())));
  auto& t = r.table("characters", {"label", "character", "log_conductor", "zero_sum"});
  const auto& G = ctx.group();
  const auto cond = conductor_table(ctx.field(), s.cache());
  for (int chi = 0; chi < G.order(); ++chi)
    t.rows.push_back({ctx.field().label(chi), G.format_character(chi), num(cond[chi]), num(ctx.weights()[chi])});
  s.emit(r);
}

void race_density(Session& s, const RaceArgs& a) {
  Result r;
  r.command = "race density";
  const RaceContext ctx(s.race_spec(a, r));
  MvnOptions opt;
  opt.samples = a.samples;
  opt.seed = s.seed();
  opt.force_mc = a.force_mc;
  DensityEstimate d;
  std::optional<DensityEstimate> gauss;
  if (ctx.r() == 1) {
    d = a.force_mc ? delta_r_way(ctx, opt) : delta_two_way(ctx);
    if (a.force_mc) d.formula = DensityEstimate::Formula::TwoWay;
  } else if (ctx.r() == 2) {
    d = delta_three_way(ctx);
    gauss = delta_r_way(ctx, opt);
  } else {
    d = delta_r_way(ctx, opt);
  }
  r.set("convention", kConvention);
  r.set("formula", formula_name(d.formula));
  r.set("value", num(d.value));
  r.set("stderr", num(d.std_error));
  r.set("method", method_name(d.method));
  if (gauss) {
    r.set("gaussian_value", num(gauss->value));
    r.set("gaussian_stderr", num(gauss->std_error));
    r.set("gaussian_method", method_name(gauss->method));
    r.set("closed_form_minus_gaussian", num(d.value - gauss->value));
    r.set("log_disc_term", num(d.log_disc_term));
  }
  r.set("samples", static_cast<std::int64_t>(d.sample_count + (gauss ? gauss->sample_count : 0)));
  r.set("seed", std::to_string(s.seed()));
  r.set("B", vec(to_vector(d.report.B)));
  r.set("Delta", mat(to_matrix(d.report.Delta)));
  r.set("lambda_min", num(d.report.lambda_min));
  r.set("error_diagnostic", num(d.error_diagnostic));
  s.emit(r);
}

struct SimArgs {
  RaceArgs race;
  long long samples = 1000000;
};

void simulate_cmd(Session& s, SimArgs a) {
  Result r;
  r.command = "simulate";
  a.race.mode = "zeros";
  RaceSpec spec = s.race_spec(a.race, r);
  if (a.race.height > spec.archive->height)
    throw ValidationError("simulator", "height exceeds the archive height");
  if (a.race.height < spec.archive->height) {
    ZeroArchive cut = *spec.archive;
    cut.height = a.race.height;
    for (auto& [chi, gs] : cut.entries)
      gs.erase(std::upper_bound(gs.begin(), gs.end(), a.race.height), gs.end());
    spec.archive = std::make_shared<const ZeroArchive>(std::move(cut));
  }
  const RaceContext ctx(spec);
  SimConfig cfg;
  cfg.height = a.race.height;
  cfg.samples = a.samples;
  cfg.seed = s.seed();
  const auto S = sample_mu(ctx, cfg);
  const auto emp = empirical_delta(S);
  MvnOptions opt;
  opt.seed = s.seed();
  const auto d = delta_r_way(ctx, opt);
  r.set("convention", kConvention);
  r.set("height", num(cfg.height));
  r.set("samples", static_cast<std::int64_t>(cfg.samples));
  r.set("seed", std::to_string(s.seed()));
  r.set("empirical_value", num(emp.value));
  r.set("empirical_stderr", num(emp.std_error));
  r.set("formula", formula_name(d.formula));
  r.set("formula_value", num(d.value));
  r.set("formula_stderr", num(d.std_error));
  r.set("discrepancy", num(emp.value - d.value));
  s.emit(r);
}

Eigen::MatrixXd read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("gaussian", "cannot open matrix file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<double> row;
    for (std::string tok; ls >> tok;) {
      if (tok.starts_with("#")) break;
      try {
        row.push_back(std::stod(tok));
      } catch (const std::exception&) {
        throw ValidationError("gaussian", "bad matrix entry '" + tok + "' in " + path);
      }
    }
    if (!row.empty()) rows.push_back(std::move(row));
  }
  const auto n = static_cast<Eigen::Index>(rows.size());
  Eigen::MatrixXd M(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (static_cast<Eigen::Index>(rows[i].size()) != n) throw ValidationError("gaussian", "matrix file is not square");
    for (Eigen::Index j = 0; j < n; ++j) M(i, j) = rows[i][j];
  }
  return M;
}

Eigen::MatrixXd parse_sigma(const std::string& spec) {
  auto parts = split_top_level(spec, ':');
  auto to_int = [&](const std::string& t) {
    try {
      return std::stoi(t);
    } catch (const std::exception&) {
      throw ValidationError("gaussian", "bad dimension in --sigma '" + spec + "'");
    }
  };
  if (parts.size() == 2 && parts[0] == "gamma") return structured_matrices(to_int(parts[1]), 0.0).Gamma;
  if (parts.size() == 3 && parts[0] == "sigma") {
    double rho = 0.0;
    try {
      rho = std::stod(parts[2]);
    } catch (const std::exception&) {
      throw ValidationError("gaussian", "bad rho in --sigma '" + spec + "'");
    }
    return structured_matrices(to_int(parts[1]), rho).Sigma;
  }
  return read_matrix_file(spec);
}

struct OrthantArgs {
  std::string sigma;
  std::vector<std::string> x;
  long long samples = 1LL << 17;
  int shifts = 16;
  bool force_mc = false;
};

void orthant_cmd(Session& s, const OrthantArgs& a) {
  const Eigen::MatrixXd Sigma = parse_sigma(a.sigma);
  std::vector<double> x = a.x.empty() ? std::vector<double>(Sigma.rows(), 0.0) : parse_doubles(a.x);
  MvnOptions opt;
  opt.samples = a.samples;
  opt.shifts = a.shifts;
  opt.seed = s.seed();
  opt.force_mc = a.force_mc;
  const auto e = mvn_cdf(x, Sigma, opt);
  Result r;
  r.command = "orthant";
  r.set("sigma", a.sigma);
  r.set("dimension", static_cast<std::int64_t>(Sigma.rows()));
  r.set("x", vec(x));
  r.set("value", num(e.value));
  r.set("stderr", num(e.std_error));
  r.set("method", method_name(e.method));
  r.set("samples", static_cast<std::int64_t>(e.sample_count));
  r.set("seed", std::to_string(s.seed()));
  s.emit(r);
}

struct ZerosArgs {
  std::int64_t q = 0;
  int parity = -1;
  std::string field;
  double height = 50.0;
  std::string out;
  std::string file;
};

FieldModel real_character_field(std::int64_t q, int parity) {
  const auto D = real_character_discriminant(q, parity < 0 ? std::nullopt : std::optional<int>(parity));
  std::vector<std::int64_t> kernel;
  for (std::int64_t u = 1; u < q; ++u)
    if (std::gcd(u, q) == 1 && kronecker(D, u) == 1) kernel.push_back(u);
  return cyclotomic_subgroup(q, std::move(kernel));
}

void zeros_find(Session& s, const ZerosArgs& a) {
  if ((a.q != 0) == !a.field.empty()) throw ValidationError("zeros", "give exactly one of --q or --field");
  const FieldModel F = a.q ? real_character_field(a.q, a.parity) : parse_field_spec(a.field);
  bool hit = false;
  const ZeroArchive arch = cached_archive(F, a.height, s.cache(), &hit);
  Result r;
  r.command = "zeros find";
  r.set("field", F.canonical_spec());
  r.set("fingerprint", F.fingerprint());
  r.set("height", num(arch.height));
  r.set("source", std::string(hit ? "cache" : "computed"));
  auto& t = r.table("characters", {"label", "discriminant", "zeros", "count_estimate", "first_zero"});
  for (const auto& [chi, gs] : arch.entries) {
    const auto D = F.fundamental_discriminant(chi);
    const std::int64_t d = D ? D->get_si() : 0;
    const RealDirichletL L(d);
    t.rows.push_back({F.label(chi), static_cast<std::int64_t>(d), static_cast<std::int64_t>(gs.size()),
                      num(L.zero_count_estimate(arch.height)), num(gs.empty() ? 0.0 : gs.front())});
  }
  if (!a.out.empty()) {
    std::ofstream out(a.out);
    if (!out) throw ValidationError("zeros", "cannot write '" + a.out + "'");
    write_archive(out, arch, F);
    r.set("out", a.out);
  }
  s.emit(r);
}

void zeros_ingest(Session& s, const ZerosArgs& a) {
  if (a.field.empty() || a.file.empty()) throw ValidationError("zeros", "ingest needs --field and --file");
  const FieldModel F = parse_field_spec(a.field);
  const ZeroArchive arch = ingest_zeros(a.file, F);
  Result r;
  r.command = "zeros ingest";
  r.set("field", F.canonical_spec());
  r.set("fingerprint", F.fingerprint());
  r.set("file", a.file);
  r.set("height", num(arch.height));
  r.set("provenance", std::string("ingested"));
  auto& t = r.table("characters", {"label", "zeros"});
  for (const auto& [chi, gs] : arch.entries) t.rows.push_back({F.label(chi), static_cast<std::int64_t>(gs.size())});
  s.emit(r);
}

void family_report(Session& s, const std::string& dir) {
  if (!fs::is_directory(dir)) throw ValidationError("constructions", "--specs must be a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw ValidationError("constructions", "no *.json field specs in " + dir);
  std::vector<FieldModel> fam;
  for (const auto& f : files) fam.push_back(parse_field_spec(f.string()));
  const auto rows = moderacy_report(fam);
  Result r;
  r.command = "family report";
  auto& t = r.table("family", {"spec", "depth", "degree", "log_disc", "r_G", "two_moderacy_index", "uniform_criterion",
                               "u_min", "u_max"});
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto cond = conductor_table(fam[i], s.cache());
    const double ld = std::accumulate(cond.begin(), cond.end(), 0.0);
    const auto& w = rows[i];
    t.rows.push_back({files[i].filename().string(), static_cast<std::int64_t>(w.depth),
                      static_cast<std::int64_t>(w.degree), num(ld), static_cast<std::int64_t>(w.r_G),
                      num(w.two_moderacy_index), num(w.uniform_criterion), num(w.u_min), num(w.u_max)});
  }
  s.emit(r, Format::Csv);
}

struct ConstructArgs {
  ConstructionCaps caps;
  std::vector<std::string> targets;
  int n = 2;
  int depth_cap = 4;
  std::string ell = "5";
  double alpha = 0.5;
  double scale = 1.0;
};

void add_certificate(Table& t, const std::string& block, const Certificate& c) {
  for (const auto& ch : c.checks)
    t.rows.push_back({block, ch.name, num(ch.lhs), num(ch.rhs), static_cast<std::int64_t>(ch.holds)});
}

void add_primes(Table& t, const std::string& block, std::span<const BigInt> ps) {
  for (const auto& p : ps) t.rows.push_back({block, p.get_str(), static_cast<std::int64_t>(bit_length(p))});
}

void add_moderacy(Result& r, std::span<const BigInt> primes, bool with_bound) {
  if (primes.empty() || primes.size() > 10) return;
  std::vector<std::string> cols{"depth", "log_disc", "two_moderacy_index", "uniform_criterion", "u_max"};
  if (with_bound) cols.insert(cols.begin() + 3, "bound_2^-k");
  auto& t = r.table("moderacy", cols);
  const auto tower = multiquadratic_tower(primes);
  for (const auto& w : moderacy_report(tower)) {
    std::vector<Value> row{static_cast<std::int64_t>(w.depth), num(w.log_disc), num(w.two_moderacy_index), num(w.uniform_criterion),
            num(w.u_max)};
    if (with_bound) row.insert(row.begin() + 3, num(std::ldexp(1.0, -w.depth)));
    t.rows.push_back(std::move(row));
  }
}

int construct_cmd(Session& s, const std::string& kind, const ConstructArgs& a) {
  Result r;
  r.command = "construct " + kind;
  r.set("max_bits", static_cast<std::int64_t>(a.caps.max_bits));
  r.set("max_block", static_cast<std::int64_t>(a.caps.max_block));
  r.set("max_doublings", static_cast<std::int64_t>(a.caps.max_doublings));
  Table primes{{"block", "prime", "bits"}, {}};
  Table checks{{"block", "check", "lhs", "rhs", "holds"}, {}};
  std::vector<BigInt> all;
  bool valid = true;
  auto take = [&](const std::string& block, std::span<const BigInt> ps, const Certificate& c) {
    add_primes(primes, block, ps);
    add_certificate(checks, block, c);
    valid = valid && c.valid();
  };
  if (kind == "prime-step") {
    BigInt ell;
    try {
      ell = BigInt(a.ell);
    } catch (const std::invalid_argument&) {
      throw ValidationError("constructions", "--ell must be an integer");
    }
    const auto res = prime_density_step(ell, a.alpha, a.depth_cap, a.caps);
    r.set("ell", ell.get_str());
    r.set("alpha", num(a.alpha));
    r.set("ratio", num(res.ratio));
    r.set("achieved_gap", num(res.achieved_gap));
    r.set("lemma_bound", num(res.lemma_bound));
    r.set("doublings", static_cast<std::int64_t>(res.doublings));
    take("1", res.primes, res.certificate);
  } else if (kind == "u-dense") {
    const auto targets = parse_doubles(a.targets);
    const auto fam = build_u_dense_family(targets, a.caps);
    if (!fam.primes.empty()) add_primes(primes, "0", std::span(fam.primes).first(1));
    for (std::size_t k = 0; k < fam.blocks.size(); ++k) {
      const auto& b = fam.blocks[k];
      take(std::to_string(k + 1), b.primes, b.certificate);
      r.set("ratio_" + std::to_string(k + 1), num(b.ratio));
    }
    all = fam.primes;
  } else if (kind == "b-dense") {
    std::vector<BDenseTarget> targets;
    for (const auto& t : flatten(a.targets)) {
      const auto colon = t.find(':');
      if (colon == std::string::npos) throw ValidationError("constructions", "b-dense targets are x:eps, got '" + t + "'");
      const auto xs = parse_doubles({t.substr(0, colon), t.substr(colon + 1)});
      targets.push_back({xs[0], xs[1]});
    }
    const auto fam = build_b_dense_family(targets, a.caps);
    for (std::size_t k = 0; k < fam.blocks.size(); ++k) {
      const auto& b = fam.blocks[k];
      take(std::to_string(k + 1), b.primes, b.certificate);
      r.set("achieved_" + std::to_string(k + 1), num(b.achieved));
      r.set("window_retries_" + std::to_string(k + 1), static_cast<std::int64_t>(b.window_retries));
    }
    all = fam.primes;
  } else if (kind == "theorem-c") {
    const auto res = build_theorem_c_prefix(a.n, a.caps, a.depth_cap);
    take("1", res.primes, res.certificate);
    all = res.primes;
    add_moderacy(r, all, true);
  } else if (kind == "two-mod") {
    TwoModSchedule sched{parse_doubles(a.targets), a.scale};
    const auto fam = build_2mod_u_dense(sched, a.caps);
    add_primes(primes, "0", std::span(fam.primes).first(1));
    for (std::size_t k = 0; k < fam.steps.size(); ++k) add_primes(primes, std::to_string(k + 1), fam.steps[k].primes);
    add_certificate(checks, "all", fam.certificate);
    valid = fam.steps.empty() || fam.certificate.valid();
    all = fam.primes;
    add_moderacy(r, all, false);
  } else {
    throw ValidationError(kModule, "unknown construction '" + kind + "'");
  }
  r.set("valid", static_cast<std::int64_t>(valid));
  r.tables.insert(r.tables.begin(), {"certificate", std::move(checks)});
  r.tables.insert(r.tables.begin(), {"primes", std::move(primes)});
  s.emit(r);
  return valid ? 0 : 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"primerace: prime number races in abelian extensions of Q"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--format", g.format, "table|csv|json-text (family report defaults to csv)");
  app.add_option("--seed", g.seed, "seed for randomized commands")->capture_default_str();
  app.add_option("--cache-dir", g.cache_dir, std::string("cache directory (default $") + kCacheEnv + ")");
  app.add_flag("--no-cache", g.no_cache, "do not read or write the cache");
  app.add_option("--threads", g.threads, "OpenMP threads (0 = runtime default)");

  RaceArgs race_args;
  auto* race = app.add_subcommand("race", "race statistics and densities")->require_subcommand(1);
  auto* stats = race->add_subcommand("stats", "mean, variance, bias and covariance report");
  add_race_options(stats, race_args, false);
  auto* density = race->add_subcommand("density", "race density; " + kConvention);
  add_race_options(density, race_args, true);

  std::string specs_dir;
  auto* family = app.add_subcommand("family", "family diagnostics")->require_subcommand(1);
  auto* report = family->add_subcommand("report", "moderacy rows for a directory of field specs");
  report->add_option("--specs", specs_dir, "directory of *.json field specs, ordered by file name")->required();

  ZerosArgs zargs;
  auto* zeros = app.add_subcommand("zeros", "zeros of real Dirichlet L-functions")->require_subcommand(1);
  auto* zfind = zeros->add_subcommand("find", "compute zeros and optionally write an archive");
  zfind->add_option("--q", zargs.q, "conductor of a real primitive character");
  zfind->add_option("--parity", zargs.parity, "0 even, 1 odd (needed when both exist, e.g. q = 8)");
  zfind->add_option("--field", zargs.field, "compute every character of a field instead");
  zfind->add_option("--height", zargs.height, "height T")->capture_default_str();
  zfind->add_option("--out", zargs.out, "archive output path");
  auto* zingest = zeros->add_subcommand("ingest", "validate an external zero archive");
  zingest->add_option("--field", zargs.field, "field spec")->required();
  zingest->add_option("--file", zargs.file, "archive path")->required();

  SimArgs sargs;
  auto* sim = app.add_subcommand("simulate", "random-phase sampler for the limiting distribution");
  sim->add_option("--field", sargs.race.field, "field spec")->required();
  sim->add_option("--classes", sargs.race.classes, "classes C_1,C_2,...")->required();
  sim->add_option("--archive", sargs.race.archive, "zero archive (computed and cached when omitted)");
  sim->add_option("--height", sargs.race.height, "truncation height T")->capture_default_str();
  sim->add_option("--samples", sargs.samples, "sample count")->capture_default_str();

  OrthantArgs oargs;
  auto* orth = app.add_subcommand("orthant", "Gaussian orthant probability P(Z <= x)");
  orth->add_option("--sigma", oargs.sigma, "matrix-file | gamma:r | sigma:r:rho")->required();
  orth->add_option("--x", oargs.x, "upper limits (default 0)");
  orth->add_option("--samples", oargs.samples, "points per shift")->capture_default_str();
  orth->add_option("--shifts", oargs.shifts, "random shifts")->capture_default_str();
  orth->add_flag("--force-mc", oargs.force_mc, "use QMC even where a closed form exists");

  ConstructArgs cargs;
  auto* cons = app.add_subcommand("construct", "prime constructions with certificates")->require_subcommand(1);
  auto add_caps = [&](CLI::App* c) {
    c->add_option("--max-bits", cargs.caps.max_bits, "candidate size cap in bits")->capture_default_str();
    c->add_option("--max-block", cargs.caps.max_block, "consecutive primes per block")->capture_default_str();
    c->add_option("--max-doublings", cargs.caps.max_doublings, "Bertrand window doublings")->capture_default_str();
  };
  auto* cu = cons->add_subcommand("u-dense", "ratios log p_m / log(product) near targets in (0,1)");
  cu->add_option("--targets", cargs.targets, "targets a,b,...")->required();
  auto* cb = cons->add_subcommand("b-dense", "2^n / log(p_1...p_n) near targets");
  cb->add_option("--targets", cargs.targets, "targets x:eps,...")->required();
  auto* ct = cons->add_subcommand("theorem-c", "primes with log(p_1...p_k) > 2^{3k+1}");
  ct->add_option("--n", cargs.n, "depth")->capture_default_str();
  ct->add_option("--depth-cap", cargs.depth_cap, "largest accepted depth")->capture_default_str();
  auto* cp = cons->add_subcommand("prime-step", "one prime-density step");
  cp->add_option("--ell", cargs.ell, "starting integer ell >= 5")->capture_default_str();
  cp->add_option("--alpha", cargs.alpha, "target ratio in (0,1)")->capture_default_str();
  cp->add_option("--depth-cap", cargs.depth_cap, "consecutive primes allowed")->capture_default_str();
  auto* c2 = cons->add_subcommand("two-mod", "2-moderate towers with |U| near targets in (1/2,1)");
  c2->add_option("--alphas", cargs.targets, "targets a,b,...")->required();
  c2->add_option("--scale", cargs.scale, "index schedule: 2^{m+1}/log(...) < scale/(2m)")->capture_default_str();
  for (auto* c : {cu, cb, ct, cp, c2}) add_caps(c);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    CLI::App* shown = &app;
    for (auto* sub : app.get_subcommands()) {
      shown = sub;
      for (auto* subsub : sub->get_subcommands()) shown = subsub;
    }
    err << shown->help();
    return 2;
  }

  try {
    if (g.threads > 0) omp_set_num_threads(g.threads);
    if (!g.format.empty()) parse_format(g.format);
    Session s(g, out);
    if (stats->parsed()) race_stats(s, race_args);
    else if (density->parsed()) race_density(s, race_args);
    else if (report->parsed()) family_report(s, specs_dir);
    else if (zfind->parsed()) zeros_find(s, zargs);
    else if (zingest->parsed()) zeros_ingest(s, zargs);
    else if (sim->parsed()) simulate_cmd(s, sargs);
    else if (orth->parsed()) orthant_cmd(s, oargs);
    else if (cu->parsed()) return construct_cmd(s, "u-dense", cargs);
    else if (cb->parsed()) return construct_cmd(s, "b-dense", cargs);
    else if (ct->parsed()) return construct_cmd(s, "theorem-c", cargs);
    else if (cp->parsed()) return construct_cmd(s, "prime-step", cargs);
    else if (c2->parsed()) return construct_cmd(s, "two-mod", cargs);
    return 0;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ComputationError& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
}

}  // namespace primerace
