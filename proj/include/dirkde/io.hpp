#pragma once

// Model files (JSON) and sample/grid CSV files.

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "json.hpp"

#include "dirkde/errors.hpp"
#include "dirkde/models.hpp"

namespace dirkde {

/// Malformed input file; the message names the offending field or line.
class FormatError : public DomainError {
 public:
  using DomainError::DomainError;
};

enum class ModelKind { Directional, DirectionalLinear, Linear };

struct Model {
  ModelKind kind = ModelKind::Directional;
  int q = 0;  // 0 for purely linear models
  DirMixture dir;
  DirLinMixture dirlin;
  LinMixture lin;
  std::vector<std::string> warnings;
};

namespace detail {

inline double json_number(const nlohmann::json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw FormatError(where + "." + key + ": missing");
  const auto& v = obj.at(key);
  if (!v.is_number()) throw FormatError(where + "." + key + ": expected a number");
  return v.get<double>();
}

}  // namespace detail

/// Schema: {"q": int, "components": [{"weight", "mu": [q+1], "kappa", "mean"?, "sigma"?}]}.
/// q = 0 describes a normal mixture: components carry only weight, mean, sigma.
inline Model parse_model(const nlohmann::json& j) {
  if (!j.is_object()) throw FormatError("model: top level must be an object");
  if (!j.contains("q") || !j.at("q").is_number_integer()) throw FormatError("q: missing or not an integer");
  Model m;
  m.q = j.at("q").get<int>();
  if (m.q < 0 || m.q > 3) throw FormatError("q: must be 0 (linear), 1, 2 or 3");
  if (!j.contains("components") || !j.at("components").is_array() || j.at("components").empty()) {
    throw FormatError("components: missing or empty");
  }
  const auto& comps = j.at("components");
  std::vector<double> weights;
  std::vector<VmfComponent> dir;
  std::vector<NormalComponent> lin;
  int with_linear = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    const auto& c = comps[i];
    const std::string where = "components[" + std::to_string(i) + "]";
    if (!c.is_object()) throw FormatError(where + ": expected an object");
    const double w = detail::json_number(c, "weight", where);
    if (!(w >= 0.0)) throw FormatError(where + ".weight: must be >= 0");
    weights.push_back(w);
    const bool has_mean = c.contains("mean");
    const bool has_sigma = c.contains("sigma");
    if (has_mean != has_sigma) throw FormatError(where + ": 'mean' and 'sigma' must be given together");
    if (has_mean) {
      ++with_linear;
      const double mean = detail::json_number(c, "mean", where);
      const double sigma = detail::json_number(c, "sigma", where);
      if (!(sigma > 0.0)) throw FormatError(where + ".sigma: must be positive");
      lin.push_back({mean, sigma});
    }
    if (m.q == 0) continue;
    if (!c.contains("mu") || !c.at("mu").is_array()) throw FormatError(where + ".mu: missing or not an array");
    const auto& mu = c.at("mu");
    if (mu.size() != static_cast<std::size_t>(m.q + 1)) {
      throw FormatError(where + ".mu: expected " + std::to_string(m.q + 1) + " coordinates, got " + std::to_string(mu.size()));
    }
    std::vector<double> coords;
    double n2 = 0.0;
    for (const auto& v : mu) {
      if (!v.is_number()) throw FormatError(where + ".mu: non-numeric coordinate");
      coords.push_back(v.get<double>());
      n2 += coords.back() * coords.back();
    }
    if (!(n2 > 0.0)) throw FormatError(where + ".mu: zero vector");
    if (std::fabs(std::sqrt(n2) - 1.0) > 1e-6) m.warnings.push_back(where + ".mu: not unit norm, renormalized");
    const double kappa = detail::json_number(c, "kappa", where);
    if (!(kappa >= 0.0)) throw FormatError(where + ".kappa: must be >= 0");
    dir.push_back({UnitVector(std::move(coords)), kappa});
  }
  if (with_linear != 0 && with_linear != static_cast<int>(comps.size())) {
    throw FormatError("components: linear fields must be present in all components or in none");
  }
  double total = 0.0;
  for (double w : weights) total += w;
  if (std::fabs(total - 1.0) > 1e-9) throw FormatError("components[].weight: weights sum to " + std::to_string(total) + ", not 1");
  // absorb the allowed 1e-9 slack so the mixtures validate at 1e-12
  for (double& w : weights) w /= total;
  if (m.q == 0) {
    if (with_linear == 0) throw FormatError("components: a q = 0 model needs 'mean' and 'sigma'");
    m.kind = ModelKind::Linear;
    m.lin = {weights, lin};
    m.lin.validate();
  } else if (with_linear > 0) {
    m.kind = ModelKind::DirectionalLinear;
    m.dirlin = {weights, dir, lin};
    m.dirlin.validate();
  } else {
    m.kind = ModelKind::Directional;
    m.dir = {weights, dir};
    m.dir.validate();
  }
  return m;
}

inline Model load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open model file " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError("model file " + path + ": " + e.what());
  }
  return parse_model(j);
}

// ------------------------------------------------------------------ CSV

/// Shortest decimal that round-trips.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& out) : out_(out) {}

  void comment(const std::string& text) { out_ << "# " << text << '\n'; }

  void header(const std::vector<std::string>& cols) { row_strings(cols); }

  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << format_double(values[i]);
    }
    out_ << '\n';
  }

  void row_strings(const std::vector<std::string>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i) out_ << ',';
      out_ << values[i];
    }
    out_ << '\n';
  }

 private:
  std::ostream& out_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

namespace detail {

inline std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = line.find(',', start);
    out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& s : out) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  }
  return out;
}

}  // namespace detail

/// Numeric CSV with a mandatory header row; lines starting with '#' are skipped.
inline CsvTable read_csv(std::istream& in, const std::string& name = "csv") {
  CsvTable t;
  std::string line;
  std::size_t lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#' || line == "\r") continue;
    const auto fields = detail::split_commas(line);
    if (!have_header) {
      for (auto f : fields) t.columns.emplace_back(f);
      have_header = true;
      continue;
    }
    if (fields.size() != t.columns.size()) {
      throw FormatError(name + ":" + std::to_string(lineno) + ": expected " + std::to_string(t.columns.size()) + " fields");
    }
    std::vector<double> row;
    for (auto f : fields) {
      double v = 0.0;
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size()) {
        throw FormatError(name + ":" + std::to_string(lineno) + ": not a number: '" + std::string(f) + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  if (!have_header) throw FormatError(name + ": missing header row");
  return t;
}

inline CsvTable read_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open data file " + path);
  return read_csv(in, path);
}

/// Directions in columns x1..x{q+1}, optional linear column z. A lone z
/// column is linear data (q = 0).
struct DataSet {
  int q = 0;
  bool has_z = false;
  DirSample dir;
  DirLinSample dirlin;
  std::vector<double> lin;

  ModelKind kind() const {
    if (q == 0) return ModelKind::Linear;
    return has_z ? ModelKind::DirectionalLinear : ModelKind::Directional;
  }
  std::size_t size() const { return q == 0 ? lin.size() : dir.points.size(); }
};

inline DataSet data_from_table(const CsvTable& t) {
  DataSet d;
  int nx = 0;
  for (const auto& c : t.columns) {
    if (c == "x" + std::to_string(nx + 1)) {
      ++nx;
    } else if (c == "z" && !d.has_z && &c == &t.columns.back()) {
      d.has_z = true;
    } else {
      throw FormatError("data: unexpected column '" + c + "' (expected x1..x{q+1}[,z])");
    }
  }
  if (t.rows.empty()) throw FormatError("data: no rows");
  if (nx == 0 && d.has_z) {
    d.q = 0;
    for (const auto& r : t.rows) d.lin.push_back(r[0]);
    return d;
  }
  if (nx < 2) throw FormatError("data: need columns x1..x{q+1} (q >= 1) or a single z column");
  if (nx > 4) throw FormatError("data: q = " + std::to_string(nx - 1) + " not supported (q <= 3)");
  d.q = nx - 1;
  for (const auto& r : t.rows) {
    std::vector<double> x(r.begin(), r.begin() + nx);
    UnitVector u(std::move(x));
    d.dir.points.push_back(u);
    if (d.has_z) {
      d.dirlin.points.push_back(u);
      d.dirlin.z.push_back(r[nx]);
    }
  }
  return d;
}

}  // namespace dirkde
