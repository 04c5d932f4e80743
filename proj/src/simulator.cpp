#include "primerace/simulator.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

const std::string kModule = "simulator";
constexpr long long kBlock = 4096;

std::uint64_t block_seed(std::uint64_t seed, std::uint64_t block) {
  std::uint64_t z = seed ^ (0x9e3779b97f4a7c15ULL * (block + 1));
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

struct PhaseTable {
  std::array<double, 256> c, s;
  PhaseTable() {
    for (int k = 0; k < 256; ++k) {
      c[k] = std::cos(2.0 * std::numbers::pi * k / 256.0);
      s[k] = std::sin(2.0 * std::numbers::pi * k / 256.0);
    }
  }
};

// (cos, sin) of 2 pi bits / 2^32: table for the top 8 bits, Taylor for the rest.
inline void unit_phase(const PhaseTable& T, std::uint32_t bits, double& c, double& s) {
  const int k = static_cast<int>(bits >> 24);
  const double r = 2.0 * std::numbers::pi * static_cast<double>(bits & 0xFFFFFFu) * 0x1p-32;
  const double r2 = r * r;
  const double cr = 1.0 - r2 / 2.0 * (1.0 - r2 / 12.0 * (1.0 - r2 / 30.0 * (1.0 - r2 / 56.0)));
  const double sr = r * (1.0 - r2 / 6.0 * (1.0 - r2 / 20.0 * (1.0 - r2 / 42.0 * (1.0 - r2 / 72.0))));
  c = T.c[k] * cr - T.s[k] * sr;
  s = T.s[k] * cr + T.c[k] * sr;
}

const PhaseTable& phase_table() {
  static const PhaseTable t;
  return t;
}

// One term per (chi, gamma), chi != 1 ascending, gamma ascending up to T; the
// phase stream is indexed by this order regardless of the coefficients.
struct Terms {
  int dim = 0;
  std::vector<double> re, im;  // term-major, dim per term
  std::size_t count() const { return dim == 0 ? 0 : re.size() / dim; }
};

template <class Coeff>
Terms build_terms(const ZeroArchive& arch, double height, int dim, Coeff coeff) {
  if (!(height > 0.0)) throw ValidationError(kModule, "height must be positive");
  if (height > arch.height)
    throw ValidationError(kModule, "height " + std::to_string(height) + " exceeds the archive height " +
                                       std::to_string(arch.height));
  Terms T;
  T.dim = dim;
  for (const auto& [chi, gammas] : arch.entries) {
    if (chi == 0) continue;
    for (double g : gammas) {
      if (g > height) break;
      const double s = 2.0 / std::sqrt(0.25 + g * g);
      for (int i = 0; i < dim; ++i) {
        const cplx a = s * coeff(chi, i);
        T.re.push_back(a.real());
        T.im.push_back(a.imag());
      }
    }
  }
  return T;
}

const ZeroArchive& archive_of(const RaceContext& ctx) {
  if (!ctx.spec().archive) throw ValidationError(kModule, "simulation needs a zero archive");
  return *ctx.spec().archive;
}

Terms race_terms(const RaceContext& ctx, double height) {
  const auto ts = ctx.t_vector();
  std::vector<std::vector<cplx>> hats;
  for (const auto& t : ts) hats.push_back(ctx.t_hat(t));
  return build_terms(archive_of(ctx), height, ctx.r(), [&](int chi, int i) { return hats[i][chi]; });
}

SampleMatrix simulate(const Terms& T, const std::vector<double>& E, const SimConfig& cfg) {
  if (cfg.samples < 1) throw ValidationError(kModule, "samples must be positive");
  SampleMatrix M;
  M.r = T.dim;
  M.rows = cfg.samples;
  M.data.assign(static_cast<std::size_t>(cfg.samples) * T.dim, 0.0);
  const long long nblocks = (cfg.samples + kBlock - 1) / kBlock;
  const PhaseTable& tab = phase_table();
  auto run = [&](long long b) {
    std::mt19937_64 rng(block_seed(cfg.seed, static_cast<std::uint64_t>(b)));
    const long long start = b * kBlock;
    const long long count = std::min(kBlock, cfg.samples - start);
    const int d = T.dim;
    const std::size_t n = T.count();
    for (long long row = start; row < start + count; ++row) {
      double* x = M.data.data() + row * d;
      for (int i = 0; i < d; ++i) x[i] = E[i];
      std::uint64_t word = 0;
      for (std::size_t k = 0; k < n; ++k) {
        if ((k & 1u) == 0) word = rng();
        const auto bits = static_cast<std::uint32_t>((k & 1u) ? word >> 32 : word);
        double c, s;
        unit_phase(tab, bits, c, s);
        const double* re = T.re.data() + k * d;
        const double* im = T.im.data() + k * d;
        for (int i = 0; i < d; ++i) x[i] += re[i] * c - im[i] * s;
      }
    }
  };
  if (cfg.parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (long long b = 0; b < nblocks; ++b) run(b);
  } else {
    for (long long b = 0; b < nblocks; ++b) run(b);
  }
  return M;
}

std::vector<double> means(const RaceContext& ctx) {
  const auto ts = ctx.t_vector();
  std::vector<double> E(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) E[i] = ctx.mean_E(ts[i]);
  return E;
}

}  // namespace

SampleMatrix sample_mu(const RaceContext& ctx, const SimConfig& cfg) {
  return simulate(race_terms(ctx, cfg.height), means(ctx), cfg);
}

SampleMatrix sample_class_fluctuations(const FieldModel& field, const ZeroArchive& archive, const SimConfig& cfg) {
  const auto& G = field.group();
  const double n = G.order();
  const Terms T = build_terms(archive, cfg.height, G.order(),
                              [&](int chi, int g) { return std::conj(G.character_value(chi, g)) / n; });
  return simulate(T, std::vector<double>(G.order(), 0.0), cfg);
}

SampleMatrix race_samples(const RaceContext& ctx, const SampleMatrix& fluctuations) {
  const int order = ctx.group().order();
  if (fluctuations.r != order) throw ValidationError(kModule, "fluctuation matrix does not match the group order");
  const auto ts = ctx.t_vector();
  const auto E = means(ctx);
  const int r = ctx.r();
  SampleMatrix M;
  M.r = r;
  M.rows = fluctuations.rows;
  M.data.assign(static_cast<std::size_t>(M.rows) * r, 0.0);
  for (long long row = 0; row < M.rows; ++row) {
    const auto w = fluctuations.row(row);
    for (int i = 0; i < r; ++i) {
      double x = E[i];
      for (int g = 0; g < order; ++g)
        if (ts[i].values[g]) x += static_cast<double>(ts[i].values[g]) * w[g];
      M.data[row * r + i] = x;
    }
  }
  return M;
}

EmpiricalDelta empirical_delta(const SampleMatrix& samples) {
  if (samples.rows < 1) throw ValidationError(kModule, "no samples");
  long long hits = 0;
  for (long long i = 0; i < samples.rows; ++i) {
    bool all = true;
    for (int j = 0; j < samples.r && all; ++j) all = samples(i, j) < 0.0;
    hits += all;
  }
  const double n = static_cast<double>(samples.rows);
  const double p = hits / n;
  return {p, std::sqrt(p * (1.0 - p) / n)};
}

EmpiricalCF empirical_cf(const SampleMatrix& samples, std::span<const double> x) {
  if (static_cast<int>(x.size()) != samples.r) throw ValidationError(kModule, "argument dimension mismatch");
  if (samples.rows < 2) throw ValidationError(kModule, "need at least two samples");
  double sc = 0.0, ss = 0.0, sc2 = 0.0, ss2 = 0.0;
  for (long long i = 0; i < samples.rows; ++i) {
    double dot = 0.0;
    for (int j = 0; j < samples.r; ++j) dot += x[j] * samples(i, j);
    const double c = std::cos(dot), s = -std::sin(dot);
    sc += c;
    ss += s;
    sc2 += c * c;
    ss2 += s * s;
  }
  const double n = static_cast<double>(samples.rows);
  const double mc = sc / n, ms = ss / n;
  const double var = (sc2 / n - mc * mc) + (ss2 / n - ms * ms);
  return {{mc, ms}, std::sqrt(std::max(var, 0.0) / (n - 1.0))};
}

std::complex<double> truncated_cf(const RaceContext& ctx, double height, std::span<const double> x) {
  const int r = ctx.r();
  if (static_cast<int>(x.size()) != r) throw ValidationError(kModule, "argument dimension mismatch");
  const Terms T = race_terms(ctx, height);
  const auto E = means(ctx);
  double phase = 0.0;
  for (int i = 0; i < r; ++i) phase += x[i] * E[i];
  double prod = 1.0;
  for (std::size_t k = 0; k < T.count(); ++k) {
    cplx a{0.0, 0.0};
    for (int i = 0; i < r; ++i) a += x[i] * cplx{T.re[k * r + i], T.im[k * r + i]};
    prod *= std::cyl_bessel_j(0.0, std::abs(a));
  }
  return prod * std::exp(cplx{0.0, -phase});
}

}  // namespace primerace
