#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "primerace/field.hpp"
#include "primerace/lfunction.hpp"

namespace primerace {

enum class Provenance { Computed, Ingested };

struct ZeroArchive {
  double height = 0.0;
  Provenance provenance = Provenance::Computed;
  std::string field_fingerprint;
  // character index -> strictly increasing ordinates in (0, height]
  std::map<int, std::vector<double>> entries;
};

struct ZeroSumMode {
  enum class Kind { Asymptotic, ZeroData };
  Kind kind = Kind::Asymptotic;
  bool density_tail = false;

  static ZeroSumMode asymptotic() { return {}; }
  static ZeroSumMode zero_data(bool tail = false) { return {Kind::ZeroData, tail}; }
};

struct ZeroFinderOptions {
  double tol = 1e-9;
  double step = 0.05;
  int max_halvings = 4;
  bool parallel = true;
};

// Discriminant of the real primitive character of conductor q (parity 0 even,
// 1 odd; required when both signs exist, e.g. q = 8).
std::int64_t real_character_discriminant(std::int64_t q, std::optional<int> parity = std::nullopt);

std::vector<double> find_zeros_real_character(const RealDirichletL& L, double T,
                                              const ZeroFinderOptions& opt = {});
std::vector<double> find_zeros_real_character(std::int64_t q, double T, double tol = 1e-9,
                                              std::optional<int> parity = std::nullopt);

// Zeros for every nontrivial character of the field; complex characters are rejected.
ZeroArchive compute_archive(const FieldModel& field, double T, const ZeroFinderOptions& opt = {});

ZeroArchive parse_archive(std::istream& in, const FieldModel& field, const std::string& source = "<stream>");
ZeroArchive ingest_zeros(const std::string& path, const FieldModel& field);
void write_archive(std::ostream& out, const ZeroArchive& archive, const FieldModel& field);

// Sum over zeros of L(s, chi) and L(s, conj chi) of 1/(1/4 + gamma^2) with
// 0 < gamma <= T, plus the optional heuristic tail; log A(chi) in asymptotic mode.
double zero_sum(const FieldModel& field, const ZeroArchive* archive, int chi, const ZeroSumMode& mode);
double n_l(const FieldModel& field, const ZeroArchive* archive, const ZeroSumMode& mode);
// zero_sum for every character (0 at the trivial one).
std::vector<double> zero_weights(const FieldModel& field, const ZeroArchive* archive, const ZeroSumMode& mode);

}  // namespace primerace
