#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "primerace/field.hpp"

namespace primerace {

using Vector = std::vector<double>;
using Matrix = std::vector<std::vector<double>>;
// Doubles are stored already rounded to 12 significant digits so that every
// format re-parses to an equal value.
using Value = std::variant<std::string, std::int64_t, double, Vector, Matrix>;

double round12(double x);
Value num(double x);
Value vec(std::span<const double> v);
Value mat(const Matrix& m);

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Value>> rows;
  friend bool operator==(const Table&, const Table&) = default;
};

struct Result {
  std::string command;
  std::vector<std::pair<std::string, Value>> fields;
  std::vector<std::pair<std::string, Table>> tables;

  Result& set(std::string key, Value v);
  Table& table(std::string name, std::vector<std::string> columns);
  const Value* find(std::string_view key) const;
  friend bool operator==(const Result&, const Result&) = default;
};

enum class Format { Table, Csv, Json };

Format parse_format(std::string_view name);
std::string serialize(const Result& r, Format f);
Result parse_result(std::string_view text, Format f);

// Field spec: inline JSON or a path to a JSON file.
FieldModel parse_field_spec(std::string_view spec_or_path);
FieldModel field_from_json(std::string_view json_text);

}  // namespace primerace
