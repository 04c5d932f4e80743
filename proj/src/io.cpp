#include "primerace/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "primerace/errors.hpp"

namespace primerace {

namespace {

const std::string kModule = "cli";
using ojson = nlohmann::ordered_json;

std::string fmt_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  std::string s = buf;
  if (s.find_first_of(".e") == std::string::npos) s += ".0";
  return s;
}

std::string quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string encode(const Value& v) {
  struct {
    std::string operator()(const std::string& s) const { return quote(s); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(double d) const { return fmt_double(d); }
    std::string operator()(const Vector& xs) const {
      std::string s = "[";
      for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ";" : "") + fmt_double(xs[i]);
      return s + "]";
    }
    std::string operator()(const Matrix& m) const {
      if (m.empty()) return "[[]]";
      std::string s = "[";
      for (std::size_t i = 0; i < m.size(); ++i) s += (i ? ";" : "") + (*this)(m[i]);
      return s + "]";
    }
  } visitor;
  return std::visit(visitor, v);
}

double parse_double(std::string_view t) {
  const std::string s(t);
  char* end = nullptr;
  const double d = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) throw ValidationError(kModule, "bad number '" + s + "'");
  return d;
}

Vector parse_vector(std::string_view t) {
  if (t.size() < 2 || t.front() != '[' || t.back() != ']') throw ValidationError(kModule, "bad vector '" + std::string(t) + "'");
  Vector out;
  t = t.substr(1, t.size() - 2);
  if (t.empty()) return out;
  std::size_t pos = 0;
  while (true) {
    const auto next = t.find(';', pos);
    out.push_back(parse_double(t.substr(pos, next - pos)));
    if (next == std::string_view::npos) break;
    pos = next + 1;
  }
  return out;
}

Value decode(std::string_view t) {
  if (t.empty()) throw ValidationError(kModule, "empty value");
  if (t.front() == '"') {
    if (t.size() < 2 || t.back() != '"') throw ValidationError(kModule, "unterminated string");
    std::string s;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      s += t[i];
      if (t[i] == '"') ++i;
    }
    return s;
  }
  if (t.starts_with("[[")) {
    Matrix m;
    if (t == "[[]]") return m;
    const auto inner = t.substr(1, t.size() - 2);
    std::size_t pos = 0;
    while (pos < inner.size()) {
      const auto close = inner.find(']', pos);
      if (close == std::string_view::npos) throw ValidationError(kModule, "bad matrix");
      m.push_back(parse_vector(inner.substr(pos, close - pos + 1)));
      pos = close + 2;
    }
    return m;
  }
  if (t.front() == '[') return parse_vector(t);
  if (t.find_first_of(".eEn") != std::string_view::npos) return parse_double(t);
  const std::string s(t);
  char* end = nullptr;
  const long long i = std::strtoll(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size()) throw ValidationError(kModule, "bad value '" + s + "'");
  return static_cast<std::int64_t>(i);
}

// Split on `sep` (or any whitespace when sep == 0) outside double quotes.
std::vector<std::string> tokenize(std::string_view line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false, have = false;
  for (char c : line) {
    if (c == '"') in_quotes = !in_quotes;
    const bool split = !in_quotes && (sep ? c == sep : (c == ' ' || c == '\t'));
    if (split) {
      if (sep || have) out.push_back(cur);
      cur.clear();
      have = false;
    } else {
      cur += c;
      have = true;
    }
  }
  if (sep || have) out.push_back(cur);
  return out;
}

std::vector<std::string> lines_of(std::string_view text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string line(text.substr(pos, nl - pos));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out.push_back(std::move(line));
    pos = nl + 1;
  }
  while (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

ojson to_json(const Value& v) {
  struct {
    ojson operator()(const std::string& s) const { return s; }
    ojson operator()(std::int64_t i) const { return i; }
    ojson operator()(double d) const { return std::isfinite(d) ? ojson(d) : ojson(fmt_double(d)); }
    ojson operator()(const Vector& xs) const {
      ojson a = ojson::array();
      for (double x : xs) a.push_back((*this)(x));
      return a;
    }
    ojson operator()(const Matrix& m) const {
      ojson a = ojson::array();
      for (const auto& row : m) a.push_back((*this)(row));
      return a;
    }
  } visitor;
  return std::visit(visitor, v);
}

double json_double(const ojson& j) {
  if (j.is_string()) return parse_double(j.get<std::string>());
  return j.get<double>();
}

Value from_json(const ojson& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "nan" || s == "inf" || s == "-inf") return parse_double(s);
    return s;
  }
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  if (j.is_array()) {
    if (!j.empty() && j[0].is_array()) {
      Matrix m;
      for (const auto& row : j) {
        Vector r;
        for (const auto& x : row) r.push_back(json_double(x));
        m.push_back(std::move(r));
      }
      return m;
    }
    Vector v;
    for (const auto& x : j) v.push_back(json_double(x));
    return v;
  }
  throw ValidationError(kModule, "unsupported JSON value");
}

std::string serialize_table_format(const Result& r) {
  std::ostringstream out;
  out << "[" << r.command << "]\n";
  std::size_t width = 0;
  for (const auto& [k, v] : r.fields) width = std::max(width, k.size());
  for (const auto& [k, v] : r.fields) out << k << std::string(width - k.size() + 2, ' ') << encode(v) << "\n";
  for (const auto& [name, t] : r.tables) {
    out << "\n== " << name << " ==\n";
    std::vector<std::vector<std::string>> cells;
    cells.push_back(t.columns);
    for (const auto& row : t.rows) {
      std::vector<std::string> c;
      for (const auto& v : row) c.push_back(encode(v));
      cells.push_back(std::move(c));
    }
    std::vector<std::size_t> w(t.columns.size(), 0);
    for (const auto& row : cells)
      for (std::size_t i = 0; i < row.size() && i < w.size(); ++i) w[i] = std::max(w[i], row[i].size());
    for (const auto& row : cells) {
      for (std::size_t i = 0; i < row.size(); ++i) {
        out << row[i];
        if (i + 1 < row.size()) out << std::string(w[i] - row[i].size() + 2, ' ');
      }
      out << "\n";
    }
  }
  return out.str();
}

Result parse_table_format(std::string_view text) {
  const auto lines = lines_of(text);
  if (lines.empty() || lines[0].size() < 2 || lines[0].front() != '[' || lines[0].back() != ']')
    throw ValidationError(kModule, "table output must start with [command]");
  Result r;
  r.command = lines[0].substr(1, lines[0].size() - 2);
  std::size_t i = 1;
  for (; i < lines.size() && !lines[i].empty(); ++i) {
    const auto tok = tokenize(lines[i], 0);
    if (tok.size() != 2) throw ValidationError(kModule, "bad field line '" + lines[i] + "'");
    r.fields.emplace_back(tok[0], decode(tok[1]));
  }
  while (i < lines.size()) {
    if (lines[i].empty()) {
      ++i;
      continue;
    }
    const auto& h = lines[i];
    if (!h.starts_with("== ") || !h.ends_with(" ==")) throw ValidationError(kModule, "bad table header '" + h + "'");
    Table t;
    const std::string name = h.substr(3, h.size() - 6);
    ++i;
    if (i >= lines.size()) throw ValidationError(kModule, "table without columns");
    t.columns = tokenize(lines[i++], 0);
    for (; i < lines.size() && !lines[i].empty(); ++i) {
      std::vector<Value> row;
      for (const auto& c : tokenize(lines[i], 0)) row.push_back(decode(c));
      t.rows.push_back(std::move(row));
    }
    r.tables.emplace_back(name, std::move(t));
  }
  return r;
}

std::string serialize_csv(const Result& r) {
  std::ostringstream out;
  out << "# command," << quote(r.command) << "\n";
  if (!r.fields.empty()) {
    out << "key,value\n";
    for (const auto& [k, v] : r.fields) out << k << "," << encode(v) << "\n";
  }
  for (const auto& [name, t] : r.tables) {
    out << "# table," << quote(name) << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
      for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << encode(row[i]);
      out << "\n";
    }
  }
  return out.str();
}

Result parse_csv(std::string_view text) {
  const auto lines = lines_of(text);
  Result r;
  std::size_t i = 0;
  auto header_name = [&](const std::string& line, const std::string& tag) {
    const auto tok = tokenize(line, ',');
    if (tok.size() != 2 || tok[0] != tag) throw ValidationError(kModule, "bad CSV header '" + line + "'");
    return std::get<std::string>(decode(tok[1]));
  };
  if (lines.empty()) throw ValidationError(kModule, "empty CSV");
  r.command = header_name(lines[i++], "# command");
  if (i < lines.size() && lines[i] == "key,value") {
    for (++i; i < lines.size() && !lines[i].starts_with("# table,"); ++i) {
      const auto tok = tokenize(lines[i], ',');
      if (tok.size() != 2) throw ValidationError(kModule, "bad CSV field line '" + lines[i] + "'");
      r.fields.emplace_back(tok[0], decode(tok[1]));
    }
  }
  while (i < lines.size()) {
    const std::string name = header_name(lines[i++], "# table");
    if (i >= lines.size()) throw ValidationError(kModule, "CSV table without columns");
    Table t;
    t.columns = tokenize(lines[i++], ',');
    for (; i < lines.size() && !lines[i].starts_with("# table,"); ++i) {
      std::vector<Value> row;
      for (const auto& c : tokenize(lines[i], ',')) row.push_back(decode(c));
      t.rows.push_back(std::move(row));
    }
    r.tables.emplace_back(name, std::move(t));
  }
  return r;
}

std::string serialize_json(const Result& r) {
  ojson j;
  j["command"] = r.command;
  j["fields"] = ojson::object();
  for (const auto& [k, v] : r.fields) j["fields"][k] = to_json(v);
  j["tables"] = ojson::object();
  for (const auto& [name, t] : r.tables) {
    ojson tj;
    tj["columns"] = t.columns;
    tj["rows"] = ojson::array();
    for (const auto& row : t.rows) {
      ojson rj = ojson::array();
      for (const auto& v : row) rj.push_back(to_json(v));
      tj["rows"].push_back(rj);
    }
    j["tables"][name] = tj;
  }
  return j.dump(2) + "\n";
}

Result parse_json(std::string_view text) {
  ojson j;
  try {
    j = ojson::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(kModule, std::string("invalid JSON: ") + e.what());
  }
  Result r;
  r.command = j.at("command").get<std::string>();
  for (const auto& [k, v] : j.at("fields").items()) r.fields.emplace_back(k, from_json(v));
  for (const auto& [name, tj] : j.at("tables").items()) {
    Table t;
    t.columns = tj.at("columns").get<std::vector<std::string>>();
    for (const auto& row : tj.at("rows")) {
      std::vector<Value> vals;
      for (const auto& v : row) vals.push_back(from_json(v));
      t.rows.push_back(std::move(vals));
    }
    r.tables.emplace_back(name, std::move(t));
  }
  return r;
}

}  // namespace

double round12(double x) {
  if (!std::isfinite(x)) return x;
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  const double y = std::strtod(buf, nullptr);
  return y == 0.0 ? 0.0 : y;
}

Value num(double x) { return round12(x); }

Value vec(std::span<const double> v) {
  Vector out;
  for (double x : v) out.push_back(round12(x));
  return out;
}

Value mat(const Matrix& m) {
  Matrix out;
  for (const auto& row : m) out.push_back(std::get<Vector>(vec(row)));
  return out;
}

Result& Result::set(std::string key, Value v) {
  for (auto& [k, old] : fields)
    if (k == key) {
      old = std::move(v);
      return *this;
    }
  fields.emplace_back(std::move(key), std::move(v));
  return *this;
}

Table& Result::table(std::string name, std::vector<std::string> columns) {
  tables.emplace_back(std::move(name), Table{std::move(columns), {}});
  return tables.back().second;
}

const Value* Result::find(std::string_view key) const {
  for (const auto& [k, v] : fields)
    if (k == key) return &v;
  return nullptr;
}

Format parse_format(std::string_view name) {
  if (name == "table") return Format::Table;
  if (name == "csv") return Format::Csv;
  if (name == "json" || name == "json-text") return Format::Json;
  throw ValidationError(kModule, "unknown format '" + std::string(name) + "' (table|csv|json-text)");
}

std::string serialize(const Result& r, Format f) {
  switch (f) {
    case Format::Table: return serialize_table_format(r);
    case Format::Csv: return serialize_csv(r);
    default: return serialize_json(r);
  }
}

Result parse_result(std::string_view text, Format f) {
  switch (f) {
    case Format::Table: return parse_table_format(text);
    case Format::Csv: return parse_csv(text);
    default: return parse_json(text);
  }
}

FieldModel field_from_json(std::string_view json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("field_models", std::string("invalid field spec JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("type") || !j["type"].is_string())
    throw ValidationError("field_models", "field spec needs a string \"type\"");
  const auto type = j["type"].get<std::string>();
  try {
    if (type == "multiquadratic") {
      std::vector<BigInt> primes;
      for (const auto& p : j.at("primes")) {
        if (p.is_number_integer()) primes.emplace_back(std::to_string(p.get<std::int64_t>()));
        else if (p.is_string()) primes.emplace_back(p.get<std::string>());
        else throw ValidationError("field_models", "primes must be integers or decimal strings");
      }
      return multiquadratic(std::move(primes));
    }
    if (type == "cyclotomic" || type == "cyclotomic_subgroup") {
      const auto q = j.at("modulus").get<std::int64_t>();
      std::vector<std::int64_t> H;
      if (j.contains("subgroup")) H = j["subgroup"].get<std::vector<std::int64_t>>();
      return cyclotomic_subgroup(q, std::move(H));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("field_models", std::string("malformed field spec: ") + e.what());
  } catch (const std::invalid_argument&) {
    throw ValidationError("field_models", "prime is not a decimal integer");
  }
  throw ValidationError("field_models", "unknown field type '" + type + "' (multiquadratic|cyclotomic)");
}

FieldModel parse_field_spec(std::string_view spec_or_path) {
  const auto first = spec_or_path.find_first_not_of(" \t\n");
  if (first != std::string_view::npos && spec_or_path[first] == '{') return field_from_json(spec_or_path);
  std::ifstream in{std::string(spec_or_path)};
  if (!in) throw ValidationError("field_models", "cannot open field spec '" + std::string(spec_or_path) + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return field_from_json(ss.str());
}

}  // namespace primerace
