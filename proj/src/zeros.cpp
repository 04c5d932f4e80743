#include "primerace/zeros.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

const std::string kModule = "zeros";

std::string fmt17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::vector<double> scan_once(const RealDirichletL& L, double T, double h, const ZeroFinderOptions& opt) {
  const int K = std::max(1, static_cast<int>(std::ceil(T / h - 1e-12)));
  std::vector<double> grid(K + 1), z(K + 1);
  for (int k = 0; k <= K; ++k) grid[k] = std::min(T, k * h);
  if (opt.parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (int k = 0; k <= K; ++k) z[k] = L.hardy_z(grid[k]);
  } else {
    for (int k = 0; k <= K; ++k) z[k] = L.hardy_z(grid[k]);
  }
  std::vector<int> brackets;
  for (int k = 0; k < K; ++k)
    if (grid[k + 1] > 0.0 && ((z[k] < 0) != (z[k + 1] < 0) || z[k + 1] == 0.0)) brackets.push_back(k);

  std::vector<double> roots(brackets.size());
  auto refine = [&](std::size_t i) {
    const int k = brackets[i];
    double a = grid[k], b = grid[k + 1], za = z[k];
    if (z[k + 1] == 0.0) return b;
    while (b - a > opt.tol) {
      const double m = 0.5 * (a + b);
      const double zm = L.hardy_z(m);
      if (zm == 0.0) return m;
      if ((zm < 0) == (za < 0)) a = m, za = zm;
      else b = m;
    }
    return 0.5 * (a + b);
  };
  const int nb = static_cast<int>(brackets.size());
  if (opt.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (int i = 0; i < nb; ++i) roots[i] = refine(i);
  } else {
    for (int i = 0; i < nb; ++i) roots[i] = refine(i);
  }
  std::erase_if(roots, [&](double g) { return !(g > 0.0 && g <= T); });
  return roots;
}

}  // namespace

std::int64_t real_character_discriminant(std::int64_t q, std::optional<int> parity) {
  std::vector<std::int64_t> found;
  for (std::int64_t D : {q, -q})
    if (is_fundamental_discriminant(D) && (!parity || (*parity == (D < 0 ? 1 : 0)))) found.push_back(D);
  if (found.empty())
    throw ValidationError(kModule, "no real primitive character of conductor " + std::to_string(q) +
                                       (parity ? " with the requested parity" : ""));
  if (found.size() > 1)
    throw ValidationError(kModule, "conductor " + std::to_string(q) + " has an even and an odd real primitive character; specify the parity");
  return found[0];
}

std::vector<double> find_zeros_real_character(const RealDirichletL& L, double T, const ZeroFinderOptions& opt) {
  if (!(T > 0.0) || T > 200.0) throw ValidationError(kModule, "height must lie in (0, 200]");
  if (!(opt.tol >= 1e-10)) throw ValidationError(kModule, "bisection tolerance must be >= 1e-10");
  double h = opt.step;
  std::vector<double> roots;
  for (int attempt = 0; attempt <= opt.max_halvings; ++attempt, h /= 2) {
    roots = scan_once(L, T, h, opt);
    const double est = L.zero_count_estimate(T);
    if (std::abs(static_cast<double>(roots.size()) - est) <= 2.0) return roots;
  }
  // locate the window whose count departs most from the smooth estimate
  double worst = -1.0, wa = 0.0, wb = T;
  for (double a = 0.0; a < T; a += 10.0) {
    const double b = std::min(T, a + 10.0);
    const auto cnt = std::count_if(roots.begin(), roots.end(), [&](double g) { return g > a && g <= b; });
    const double dev = std::abs(cnt - (L.zero_count_estimate(b) - L.zero_count_estimate(a)));
    if (dev > worst) worst = dev, wa = a, wb = b;
  }
  std::ostringstream msg;
  msg << "zero-count audit failed for D=" << L.discriminant() << ": found " << roots.size() << " zeros in (0," << T
      << "], estimate " << L.zero_count_estimate(T) << "; suspected missed zero in (" << wa << "," << wb << "]";
  throw ComputationError(kModule, msg.str());
}

std::vector<double> find_zeros_real_character(std::int64_t q, double T, double tol, std::optional<int> parity) {
  ZeroFinderOptions opt;
  opt.tol = tol;
  return find_zeros_real_character(RealDirichletL(real_character_discriminant(q, parity)), T, opt);
}

ZeroArchive compute_archive(const FieldModel& field, double T, const ZeroFinderOptions& opt) {
  ZeroArchive ar;
  ar.height = T;
  ar.provenance = Provenance::Computed;
  ar.field_fingerprint = field.fingerprint();
  const auto& G = field.group();
  for (int chi = 1; chi < G.order(); ++chi) {
    const auto D = field.fundamental_discriminant(chi);
    if (!D)
      throw ValidationError(kModule, "character " + field.label(chi) + " is complex; its zeros must be ingested");
    if (!mpz_fits_slong_p(D->get_mpz_t()))
      throw ValidationError(kModule, "conductor of " + field.label(chi) + " too large for the built-in zero finder");
    ar.entries[chi] = find_zeros_real_character(RealDirichletL(D->get_si()), T, opt);
  }
  return ar;
}

ZeroArchive parse_archive(std::istream& in, const FieldModel& field, const std::string& source) {
  auto fail = [&](int line, const std::string& what) {
    throw ValidationError(kModule, source + ":" + std::to_string(line) + ": " + what);
  };
  ZeroArchive ar;
  ar.provenance = Provenance::Ingested;
  ar.field_fingerprint = field.fingerprint();
  std::string line;
  int lineno = 0;
  bool have_height = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (!have_height) {
      if (!line.starts_with("height=")) fail(lineno, "expected header 'height=<T>'");
      char* end = nullptr;
      const std::string v = line.substr(7);
      ar.height = std::strtod(v.c_str(), &end);
      if (v.empty() || *end != '\0' || !std::isfinite(ar.height) || ar.height <= 0.0)
        fail(lineno, "invalid height '" + v + "'");
      have_height = true;
      continue;
    }
    const auto comma = line.rfind(',');
    if (comma == std::string::npos) fail(lineno, "expected '<label>,<gamma>'");
    const std::string label = line.substr(0, comma);
    const std::string value = line.substr(comma + 1);
    int chi = 0;
    try {
      chi = field.parse_label(label);
    } catch (const ValidationError&) {
      fail(lineno, "unknown character label '" + label + "'");
    }
    if (chi == 0) fail(lineno, "the trivial character has no zero entry");
    auto& list = ar.entries[chi];
    if (value.empty()) continue;
    char* end = nullptr;
    const double g = std::strtod(value.c_str(), &end);
    if (*end != '\0' || !std::isfinite(g)) fail(lineno, "invalid ordinate '" + value + "'");
    if (g <= 0.0) fail(lineno, "nonpositive ordinate " + value);
    if (g > ar.height) fail(lineno, "ordinate " + value + " exceeds the declared height");
    if (!list.empty() && g <= list.back())
      fail(lineno, "ordering violation: " + value + " does not exceed previous ordinate for " + label);
    list.push_back(g);
  }
  if (!have_height) fail(lineno, "missing header 'height=<T>'");
  std::string missing;
  for (int chi = 1; chi < field.group().order(); ++chi)
    if (!ar.entries.count(chi)) missing += (missing.empty() ? "" : ", ") + field.label(chi);
  if (!missing.empty()) throw ValidationError(kModule, source + ": missing characters: " + missing);
  return ar;
}

ZeroArchive ingest_zeros(const std::string& path, const FieldModel& field) {
  std::ifstream in(path);
  if (!in) throw ValidationError(kModule, "cannot open archive " + path);
  return parse_archive(in, field, path);
}

void write_archive(std::ostream& out, const ZeroArchive& archive, const FieldModel& field) {
  out << "height=" << fmt17(archive.height) << '\n';
  for (const auto& [chi, list] : archive.entries) {
    if (list.empty()) out << field.label(chi) << ",\n";
    for (double g : list) out << field.label(chi) << ',' << fmt17(g) << '\n';
  }
}

double zero_sum(const FieldModel& field, const ZeroArchive* archive, int chi, const ZeroSumMode& mode) {
  const auto& G = field.group();
  if (chi < 0 || chi >= G.order()) throw ValidationError(kModule, "character index out of range");
  if (chi == 0) throw ValidationError(kModule, "zero sum of the trivial character is not defined");
  if (mode.kind == ZeroSumMode::Kind::Asymptotic) return field.log_conductor(chi);
  if (!archive) throw ValidationError(kModule, "zero-data mode needs an archive");
  if (!archive->field_fingerprint.empty() && archive->field_fingerprint != field.fingerprint())
    throw ValidationError(kModule, "archive belongs to a different field");
  auto one_side = [&](int c) {
    auto it = archive->entries.find(c);
    if (it == archive->entries.end())
      throw ValidationError(kModule, "archive has no entry for character " + field.label(c));
    double s = 0.0;
    for (double g : it->second) s += 1.0 / (0.25 + g * g);
    return s;
  };
  double s = one_side(chi) + one_side(G.conjugate_character(chi));
  if (mode.density_tail) {
    const double T = archive->height;
    s += (field.log_conductor(chi) + std::log(T / (2.0 * std::numbers::pi)) + 1.0) / (std::numbers::pi * T);
  }
  return s;
}

std::vector<double> zero_weights(const FieldModel& field, const ZeroArchive* archive, const ZeroSumMode& mode) {
  std::vector<double> w(field.group().order(), 0.0);
  for (int chi = 1; chi < field.group().order(); ++chi) w[chi] = zero_sum(field, archive, chi, mode);
  return w;
}

double n_l(const FieldModel& field, const ZeroArchive* archive, const ZeroSumMode& mode) {
  const auto w = zero_weights(field, archive, mode);
  double s = 0.0;
  for (std::size_t chi = 1; chi < w.size(); ++chi) s += w[chi];
  return s;
}

}  // namespace primerace
