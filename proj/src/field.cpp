#include "primerace/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <set>
#include <tuple>

#include <json.hpp>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

const std::string kModule = "field_models";

using Matrix = std::vector<std::vector<long long>>;

// Returns the invariant factors d_i and a unimodular Q with rowspace(R) Q = diag(d) Z^k.
std::vector<long long> smith_column_transform(Matrix A, Matrix& Q) {
  const int m = static_cast<int>(A.size());
  const int k = static_cast<int>(A[0].size());
  Q.assign(k, std::vector<long long>(k, 0));
  for (int i = 0; i < k; ++i) Q[i][i] = 1;

  auto swap_cols = [&](int a, int b) {
    for (auto& row : A) std::swap(row[a], row[b]);
    for (auto& row : Q) std::swap(row[a], row[b]);
  };
  auto col_axpy = [&](int dst, int src, long long f) {  // col_dst -= f col_src
    for (auto& row : A) row[dst] -= f * row[src];
    for (auto& row : Q) row[dst] -= f * row[src];
  };

  std::vector<long long> d;
  for (int t = 0; t < std::min(m, k); ++t) {
    while (true) {
      int pi = -1, pj = -1;
      long long best = 0;
      for (int i = t; i < m; ++i)
        for (int j = t; j < k; ++j)
          if (A[i][j] != 0 && (best == 0 || std::llabs(A[i][j]) < best)) best = std::llabs(A[i][j]), pi = i, pj = j;
      if (pi < 0) return d;
      std::swap(A[t], A[pi]);
      if (pj != t) swap_cols(t, pj);
      bool clean = true;
      for (int i = t + 1; i < m; ++i) {
        const long long f = A[i][t] / A[t][t];
        if (f)
          for (int j = t; j < k; ++j) A[i][j] -= f * A[t][j];
        if (A[i][t]) clean = false;
      }
      for (int j = t + 1; j < k; ++j) {
        const long long f = A[t][j] / A[t][t];
        if (f) col_axpy(j, t, f);
        if (A[t][j]) clean = false;
      }
      if (!clean) continue;
      bool divides = true;
      for (int i = t + 1; i < m && divides; ++i)
        for (int j = t + 1; j < k; ++j)
          if (A[i][j] % A[t][t]) {
            for (int jj = t; jj < k; ++jj) A[t][jj] += A[i][jj];
            divides = false;
            break;
          }
      if (divides) break;
    }
    d.push_back(std::llabs(A[t][t]));
  }
  return d;
}

struct UnitComponent {
  std::int64_t p = 0;
  int e = 0;
  std::int64_t pe = 1;
  std::vector<int> gen_slots;  // indices into the global generator list
};

std::int64_t inverse_mod(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, a1 = ((a % m) + m) % m;
  while (a1) {
    const std::int64_t t = g / a1;
    std::tie(g, a1) = std::make_pair(a1, g - t * a1);
    std::tie(x, x1) = std::make_pair(x1, x - t * x1);
  }
  return ((x % m) + m) % m;
}

// u = x mod pe, u = 1 mod q/pe
std::int64_t crt_lift(std::int64_t x, std::int64_t pe, std::int64_t q) {
  const std::int64_t rest = q / pe;
  if (rest == 1) return ((x % pe) + pe) % pe;
  x = ((x % pe) + pe) % pe;
  const __int128 t = (__int128)(((1 - x) % rest + rest) % rest) * inverse_mod(pe % rest, rest) % rest;
  return static_cast<std::int64_t>((x + t * pe) % q);
}

std::int64_t least_primitive_root(std::int64_t p, int e) {
  const std::int64_t mod = e >= 2 ? p * p : p;
  const std::int64_t phi = e >= 2 ? p * (p - 1) : p - 1;
  const auto fac = factor_small(phi);
  for (std::int64_t g = 2; g < mod; ++g) {
    if (g % p == 0) continue;
    bool ok = true;
    for (auto [r, _] : fac)
      if (powmod(g, phi / r, mod) == 1) { ok = false; break; }
    if (ok) return g;
  }
  throw ComputationError(kModule, "no primitive root found");
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json bigint_json(const BigInt& p) {
  if (mpz_fits_slong_p(p.get_mpz_t())) return p.get_si();
  return p.get_str();
}

}  // namespace

double conductor_exponent_from_filtration(const AbelianGroup& G, const RamificationData& r, int chi) {
  if (r.filtration.empty()) return 0.0;
  double s = 0.0;
  for (const auto& Gi : r.filtration)
    for (int b : Gi) s += 1.0 - G.character_value(chi, G.inverse(b)).real();
  return s / static_cast<double>(r.filtration[0].size());
}

int FieldModel::sigma(int i) const {
  if (kind_ != FieldKind::Multiquadratic || i < 0 || i >= group_.rank())
    throw ValidationError(kModule, "sigma index out of range");
  std::vector<int> e(group_.rank(), 0);
  e[i] = 1;
  return group_.index_of_exponents(e);
}

int FieldModel::element_of_unit(std::int64_t u) const {
  if (kind_ != FieldKind::CyclotomicSubgroup) throw ValidationError(kModule, "not a cyclotomic model");
  u %= q_;
  if (u < 0) u += q_;
  if (unit_element_[u] < 0) throw ValidationError(kModule, std::to_string(u) + " is not a unit mod " + std::to_string(q_));
  return unit_element_[u];
}

BigInt FieldModel::conductor(int chi) const {
  BigInt f = 1;
  for (std::size_t k = 0; k < ram_.size(); ++k) {
    BigInt pk;
    mpz_pow_ui(pk.get_mpz_t(), ram_[k].p.get_mpz_t(), conductor_exponent_at(chi, static_cast<int>(k)));
    f *= pk;
  }
  return f;
}

std::optional<BigInt> FieldModel::fundamental_discriminant(int chi) const {
  if (!group_.is_real_character(chi)) return std::nullopt;
  BigInt f = conductor(chi);
  if (kind_ == FieldKind::CyclotomicSubgroup && group_.pairing(chi, element_of_unit(q_ - 1)) != 0) f = -f;
  return f;
}

int FieldModel::parse_label(std::string_view text) const {
  if (text.starts_with("c:")) return group_.parse_character(text);
  auto it = label_index_.find(text);
  if (it == label_index_.end()) throw ValidationError(kModule, "unknown character label '" + std::string(text) + "'");
  return it->second;
}

std::string FieldModel::canonical_spec() const {
  nlohmann::json j;
  if (kind_ == FieldKind::Multiquadratic) {
    j["type"] = "multiquadratic";
    j["primes"] = nlohmann::json::array();
    for (const auto& p : primes_) j["primes"].push_back(bigint_json(p));
  } else {
    j["type"] = "cyclotomic";
    j["modulus"] = q_;
    j["subgroup"] = H_;
  }
  return j.dump();
}

std::string FieldModel::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical_spec()) h = (h ^ c) * 1099511628211ULL;
  return hex64(h);
}

void FieldModel::finish() {
  const int n = group_.order();
  const int R = num_ramified();
  log_cond_.assign(n, 0.0);
  for (int chi = 0; chi < n; ++chi) {
    double s = 0.0;
    for (int k = 0; k < R; ++k) s += conductor_exponent_at(chi, k) * ram_[k].log_p;
    log_cond_[chi] = s;
  }
  for (int chi = 0; chi < n; ++chi) label_index_.emplace(labels_[chi], chi);
}

FieldModel multiquadratic(std::vector<BigInt> primes) {
  if (primes.empty()) throw ValidationError(kModule, "multiquadratic needs at least one prime");
  if (primes.size() > 16) throw ValidationError(kModule, "at most 16 primes supported");
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const auto& p = primes[i];
    if (i && p <= primes[i - 1]) throw ValidationError(kModule, "primes must be strictly increasing");
    if (p < 2 || !is_prime(p)) throw ValidationError(kModule, p.get_str() + " is not prime");
    if (mpz_fdiv_ui(p.get_mpz_t(), 4) != 1) throw ValidationError(kModule, p.get_str() + " is not 1 mod 4");
  }
  FieldModel f;
  f.kind_ = FieldKind::Multiquadratic;
  const int k = static_cast<int>(primes.size());
  f.group_ = AbelianGroup(std::vector<int>(k, 2));
  f.primes_ = std::move(primes);
  for (int i = 0; i < k; ++i) {
    RamificationData r{f.primes_[i], log_big(f.primes_[i]), {}};
    r.filtration.push_back({0, f.sigma(i)});
    f.ram_.push_back(std::move(r));
  }
  const int n = f.group_.order();
  f.exps_.assign(static_cast<std::size_t>(n) * k, 0);
  f.labels_.resize(n);
  for (int chi = 0; chi < n; ++chi) {
    for (int i = 0; i < k; ++i) {
      const double e = conductor_exponent_from_filtration(f.group_, f.ram_[i], chi);
      f.exps_[chi * k + i] = static_cast<int>(std::lround(e));
    }
    std::string bits;
    for (int x : f.group_.character(chi).exponents) bits += static_cast<char>('0' + x);
    f.labels_[chi] = bits;
  }
  f.finish();
  return f;
}

FieldModel cyclotomic_subgroup(std::int64_t q, std::vector<std::int64_t> H) {
  if (q < 3) throw ValidationError(kModule, "modulus must be >= 3");
  if (q > 2000000) throw ValidationError(kModule, "modulus too large");
  if (H.empty()) H = {1};
  std::set<std::int64_t> hset;
  for (auto h : H) {
    const std::int64_t r = ((h % q) + q) % q;
    if (std::gcd(r, q) != 1)
      throw ValidationError(kModule, "subgroup element " + std::to_string(h) + " is not a unit mod " + std::to_string(q));
    hset.insert(r);
  }
  for (auto a : hset)
    for (auto b : hset)
      if (!hset.count(static_cast<std::int64_t>((__int128)a * b % q)))
        throw ValidationError(kModule, "subgroup not closed under multiplication: " + std::to_string(a) + "*" +
                                           std::to_string(b) + " mod " + std::to_string(q));

  // cyclic decomposition of (Z/q)^*
  const auto fac = factor_small(q);
  std::vector<UnitComponent> comps;
  std::vector<std::int64_t> gens;       // generators as residues mod q
  std::vector<int> gen_orders;
  std::vector<std::vector<int>> dlog;   // per component slot: dlog table mod p^e
  for (auto [p, e] : fac) {
    UnitComponent c{p, e, 1, {}};
    for (int i = 0; i < e; ++i) c.pe *= p;
    if (p == 2) {
      if (e >= 2) {
        c.gen_slots.push_back(static_cast<int>(gens.size()));
        gens.push_back(crt_lift(c.pe - 1, c.pe, q));
        gen_orders.push_back(2);
      }
      if (e >= 3) {
        c.gen_slots.push_back(static_cast<int>(gens.size()));
        gens.push_back(crt_lift(5, c.pe, q));
        gen_orders.push_back(static_cast<int>(c.pe / 4));
      }
    } else {
      c.gen_slots.push_back(static_cast<int>(gens.size()));
      gens.push_back(crt_lift(least_primitive_root(p, e), c.pe, q));
      gen_orders.push_back(static_cast<int>(c.pe / p * (p - 1)));
    }
    comps.push_back(std::move(c));
  }
  const int kdim = static_cast<int>(gens.size());
  if (kdim == 0) throw ValidationError(kModule, "trivial unit group");

  // discrete logs per component
  std::vector<std::vector<int>> comp_log(comps.size());  // odd p: log of x mod p^e; 2^e: log5 of x (x=1 mod 4)
  for (std::size_t ci = 0; ci < comps.size(); ++ci) {
    const auto& c = comps[ci];
    if (c.gen_slots.empty()) continue;
    comp_log[ci].assign(c.pe, -1);
    std::int64_t g;
    int ord;
    if (c.p == 2) {
      if (c.e < 3) continue;
      g = 5, ord = gen_orders[c.gen_slots[1]];
    } else {
      g = gens[c.gen_slots[0]] % c.pe, ord = gen_orders[c.gen_slots[0]];
    }
    std::int64_t x = 1;
    for (int i = 0; i < ord; ++i, x = x * g % c.pe) comp_log[ci][x] = i;
  }
  auto unit_exponents = [&](std::int64_t u) {
    std::vector<long long> ex(kdim, 0);
    for (std::size_t ci = 0; ci < comps.size(); ++ci) {
      const auto& c = comps[ci];
      if (c.gen_slots.empty()) continue;
      std::int64_t x = u % c.pe;
      if (c.p == 2) {
        const bool neg = x % 4 == 3;
        ex[c.gen_slots[0]] = neg;
        if (c.e >= 3) ex[c.gen_slots[1]] = comp_log[ci][neg ? (c.pe - x) % c.pe : x];
      } else {
        ex[c.gen_slots[0]] = comp_log[ci][x];
      }
    }
    return ex;
  };

  // relation lattice: n_j e_j plus a generating set of H
  Matrix rel;
  for (int j = 0; j < kdim; ++j) {
    std::vector<long long> row(kdim, 0);
    row[j] = gen_orders[j];
    rel.push_back(row);
  }
  std::set<std::int64_t> span{1};
  for (auto h : hset) {
    if (span.count(h)) continue;
    rel.push_back(unit_exponents(h));
    std::set<std::int64_t> grown = span;
    bool changed = true;
    while (changed) {
      changed = false;
      std::vector<std::int64_t> add;
      for (auto s : grown) {
        const std::int64_t t = static_cast<std::int64_t>((__int128)s * h % q);
        if (!grown.count(t)) add.push_back(t);
      }
      for (auto t : add) changed |= grown.insert(t).second;
    }
    span = std::move(grown);
  }
  Matrix Qm;
  const auto d = smith_column_transform(rel, Qm);
  std::vector<int> keep, orders;
  for (int i = 0; i < static_cast<int>(d.size()); ++i)
    if (d[i] > 1) keep.push_back(i), orders.push_back(static_cast<int>(d[i]));
  if (orders.empty()) throw ValidationError(kModule, "subgroup is the full unit group; the field is Q");

  FieldModel f;
  f.kind_ = FieldKind::CyclotomicSubgroup;
  f.q_ = q;
  f.H_.assign(hset.begin(), hset.end());
  f.group_ = AbelianGroup(orders);
  const auto& G = f.group_;
  f.unit_element_.assign(q, -1);
  std::vector<int> coords(keep.size());
  for (std::int64_t u = 1; u < q; ++u) {
    if (std::gcd(u, q) != 1) continue;
    const auto ex = unit_exponents(u);
    for (std::size_t c = 0; c < keep.size(); ++c) {
      long long s = 0;
      const long long dc = d[keep[c]];
      for (int j = 0; j < kdim; ++j) s = (s + (ex[j] % dc) * (((Qm[j][keep[c]] % dc) + dc) % dc)) % dc;
      coords[c] = static_cast<int>(s);
    }
    f.unit_element_[u] = G.index_of_exponents(coords);
  }

  // ramification and conductors via primitive Dirichlet characters
  const int n = G.order();
  const int R = static_cast<int>(comps.size());
  f.exps_.assign(static_cast<std::size_t>(n) * R, 0);
  for (int k = 0; k < R; ++k) {
    const auto& c = comps[k];
    RamificationData r{BigInt(static_cast<long>(c.p)), std::log(static_cast<double>(c.p)), {}};
    std::set<int> inertia;
    std::vector<std::pair<int, int>> level_elem;  // (level, element) for x != 1
    for (std::int64_t x = 1; x < c.pe; ++x) {
      if (x % c.p == 0) continue;
      const int g = f.unit_element_[crt_lift(x, c.pe, q)];
      inertia.insert(g);
      int level = 0;
      std::int64_t pf = c.p;
      while (level < c.e && (x - 1) % pf == 0) ++level, pf *= c.p;
      if (x != 1) level_elem.emplace_back(level, g);
    }
    r.filtration.push_back(std::vector<int>(inertia.begin(), inertia.end()));
    f.ram_.push_back(std::move(r));
    for (int chi = 0; chi < n; ++chi) {
      int ex = 0;
      for (auto [level, g] : level_elem)
        if (G.pairing(chi, g) != 0) ex = std::max(ex, level + 1);
      f.exps_[chi * R + k] = ex;
    }
  }
  // drop primes that never ramify (e.g. 2 || q)
  {
    std::vector<RamificationData> ram;
    std::vector<int> cols;
    for (int k = 0; k < R; ++k) {
      bool used = false;
      for (int chi = 0; chi < n && !used; ++chi) used = f.exps_[chi * R + k] != 0;
      if (used) cols.push_back(k), ram.push_back(f.ram_[k]);
    }
    std::vector<int> exps(static_cast<std::size_t>(n) * cols.size());
    for (int chi = 0; chi < n; ++chi)
      for (std::size_t c = 0; c < cols.size(); ++c) exps[chi * cols.size() + c] = f.exps_[chi * R + cols[c]];
    f.ram_ = std::move(ram);
    f.exps_ = std::move(exps);
  }

  // Conrey labels: pull the character back to (Z/q)^* and read off its index
  f.labels_.resize(n);
  for (int chi = 0; chi < n; ++chi) {
    std::int64_t m = 1;
    for (const auto& c : comps) {
      if (c.gen_slots.empty()) continue;
      std::vector<long long> a;
      for (int slot : c.gen_slots) {
        const long long num = G.pairing(chi, f.unit_element_[gens[slot]]);
        a.push_back(num * gen_orders[slot] / G.exponent());
      }
      std::int64_t mc;
      if (c.p == 2) {
        mc = a[0] ? c.pe - 1 : 1;
        if (c.e >= 3) mc = mc * powmod(5, a[1], c.pe) % c.pe;
      } else {
        mc = powmod(gens[c.gen_slots[0]] % c.pe, a[0], c.pe);
      }
      // combine via CRT
      const std::int64_t lift = crt_lift(mc, c.pe, q);
      m = static_cast<std::int64_t>((__int128)m * lift % q);
    }
    f.labels_[chi] = std::to_string(q) + "." + std::to_string(m);
  }
  f.finish();
  return f;
}

int conductor_exponent(const FieldModel& field, int chi, const BigInt& p) {
  if (chi < 0 || chi >= field.group().order()) throw ValidationError(kModule, "character index out of range");
  for (int k = 0; k < field.num_ramified(); ++k)
    if (field.ramification()[k].p == p) return field.conductor_exponent_at(chi, k);
  return 0;
}

double log_artin_conductor(const FieldModel& field, int chi) {
  if (chi < 0 || chi >= field.group().order()) throw ValidationError(kModule, "character index out of range");
  return field.log_conductor(chi);
}

double log_discriminant(const FieldModel& field) {
  double s = 0.0;
  const auto lc = field.log_conductors();
  for (std::size_t chi = 1; chi < lc.size(); ++chi) s += lc[chi];
  return s;
}

double signed_conductor_sum(const FieldModel& field, int a) {
  const auto& G = field.group();
  if (a <= 0 || a >= G.order()) throw ValidationError(kModule, "signed_conductor_sum needs a non-identity element");
  double total = 0.0;
  for (int k = 0; k < field.num_ramified(); ++k) {
    cplx c{};
    for (int chi = 0; chi < G.order(); ++chi) {
      const int e = field.conductor_exponent_at(chi, k);
      if (e) c += static_cast<double>(e) * G.character_value(chi, a);
    }
    const double scale = std::max(1.0, static_cast<double>(G.order()));
    if (std::abs(c.imag()) > 1e-9 * scale)
      throw ComputationError(kModule, "signed conductor sum has imaginary part " + std::to_string(c.imag()));
    const double ci = std::round(c.real());
    if (std::abs(c.real() - ci) > 1e-6 * scale)
      throw ComputationError(kModule, "signed conductor coefficient is not an integer");
    total += ci * field.ramification()[k].log_p;
  }
  return total;
}

}  // namespace primerace
