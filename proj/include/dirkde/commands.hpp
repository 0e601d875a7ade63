#pragma once

// Command implementations behind the dirkde executable. Each command writes
// to caller-supplied streams so it can be driven from tests as well.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "dirkde/dirkde.hpp"
#include "dirkde/io.hpp"

namespace dirkde {

/// Bad flags or flag combinations (exit code 1).
class UsageError : public DomainError {
 public:
  using DomainError::DomainError;
};

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitNumeric = 2, kExitVerify = 3 };

/// lo:hi:count, evenly spaced.
struct SweepSpec {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;

  std::vector<double> values() const {
    std::vector<double> v(count);
    for (int i = 0; i < count; ++i) v[i] = i + 1 == count ? hi : lo + (hi - lo) * i / (count - 1);
    return v;
  }
  std::string str() const { return format_double(lo) + ":" + format_double(hi) + ":" + std::to_string(count); }
};

namespace detail {

inline double parse_real(const std::string& s, const std::string& what) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc() || res.ptr != s.data() + s.size()) throw UsageError(what + ": not a number: '" + s + "'");
  return v;
}

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(cur);
  if (!s.empty() && s.back() == sep) out.emplace_back();
  return out;
}

}  // namespace detail

inline SweepSpec parse_sweep(const std::string& text, const std::string& flag) {
  const auto parts = detail::split(text, ':');
  if (parts.size() != 3) throw UsageError(flag + ": expected LO:HI:COUNT, got '" + text + "'");
  SweepSpec s;
  s.lo = detail::parse_real(parts[0], flag);
  s.hi = detail::parse_real(parts[1], flag);
  const double c = detail::parse_real(parts[2], flag);
  if (c != std::floor(c) || c < 2 || c > 100000) throw UsageError(flag + ": COUNT must be an integer >= 2");
  s.count = static_cast<int>(c);
  if (!(s.lo > 0.0)) throw UsageError(flag + ": LO must be > 0");
  if (!(s.hi > s.lo)) throw UsageError(flag + ": HI must exceed LO");
  return s;
}

inline std::vector<std::size_t> parse_n_list(const std::string& text) {
  std::vector<std::size_t> out;
  for (const auto& p : detail::split(text, ',')) {
    const double v = detail::parse_real(p, "--n");
    if (v != std::floor(v) || v < 1 || v > 1e12) throw UsageError("--n: sample sizes must be positive integers");
    out.push_back(static_cast<std::size_t>(v));
  }
  if (out.empty()) throw UsageError("--n: empty list");
  return out;
}

inline std::vector<std::string> parse_methods(const std::string& text) {
  std::vector<std::string> out;
  for (const auto& p : detail::split(text, ',')) {
    if (p != "exact" && p != "amise" && p != "boot" && p != "mc") throw UsageError("--method: unknown method '" + p + "' (exact, amise, boot, mc)");
    if (std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
  }
  if (out.empty()) throw UsageError("--method: empty list");
  return out;
}

inline int default_grid_resolution(int q) {
  switch (q) {
    case 1: return 128;
    case 2: return 64;
    default: return 32;
  }
}

/// "# dirkde <version> <command> key=value ..." first line of every output.
inline std::string header_line(const std::string& command, const std::vector<std::pair<std::string, std::string>>& params) {
  std::string s = "dirkde " + std::string(kVersion) + " " + command;
  for (const auto& [k, v] : params) s += " " + k + "=" + v;
  return s;
}

// ---------------------------------------------------------------- sample

struct SampleOptions {
  std::string model;
  std::size_t n = 0;
  std::uint64_t seed = 1;
};

inline void cmd_sample(const SampleOptions& opt, std::ostream& out, std::ostream& diag) {
  const Model m = load_model(opt.model);
  for (const auto& w : m.warnings) diag << "warning: " << w << '\n';
  if (opt.n < 1) throw UsageError("sample: --n must be >= 1");
  CsvWriter csv(out);
  csv.comment(header_line("sample", {{"model", opt.model}, {"n", std::to_string(opt.n)}, {"seed", std::to_string(opt.seed)}}));
  std::vector<std::string> cols;
  for (int i = 1; i <= m.q + 1 && m.q > 0; ++i) cols.push_back("x" + std::to_string(i));
  if (m.kind != ModelKind::Directional) cols.push_back("z");
  csv.header(cols);
  switch (m.kind) {
    case ModelKind::Directional: {
      const auto s = sample(m.dir, opt.n, opt.seed);
      for (const auto& p : s.points) csv.row(std::vector<double>(p.coords().begin(), p.coords().end()));
      break;
    }
    case ModelKind::DirectionalLinear: {
      const auto s = sample(m.dirlin, opt.n, opt.seed);
      for (std::size_t i = 0; i < s.size(); ++i) {
        const auto c = s.points[i].coords();
        std::vector<double> row(c.begin(), c.end());
        row.push_back(s.z[i]);
        csv.row(row);
      }
      break;
    }
    case ModelKind::Linear: {
      for (double z : sample(m.lin, opt.n, opt.seed)) csv.row({z});
      break;
    }
  }
}

// ---------------------------------------------------------------- kde

struct KdeOptions {
  std::string data;
  std::optional<double> h;
  std::optional<double> g;
  std::optional<int> grid_res;
};

namespace detail {

// Window covering the data plus 8 bandwidths on each side; node spacing at most g / 3.
inline LineGrid data_line_grid(std::span<const double> z, double g, int min_resolution) {
  const auto [lo, hi] = std::minmax_element(z.begin(), z.end());
  const double center = 0.5 * (*lo + *hi);
  const double half = 0.5 * (*hi - *lo) + 8.0 * g;
  const int res = std::max({16, min_resolution, static_cast<int>(std::ceil(6.0 * half / g))});
  return build_line_grid(center, half, res);
}

inline std::vector<double> with_value(std::vector<double> v, double x) {
  v.push_back(x);
  return v;
}

}  // namespace detail

/// Returns the integral of the estimate over the grid (normalization diagnostic).
inline double cmd_kde(const KdeOptions& opt, std::ostream& out, std::ostream& diag) {
  const DataSet d = data_from_table(read_csv_file(opt.data));
  const bool need_h = d.q > 0;
  const bool need_g = d.has_z;
  if (need_h && !opt.h) throw UsageError("kde: --h is required for directional data");
  if (need_g && !opt.g) throw UsageError("kde: --g is required for data with a z column");
  if (!need_h && opt.h) throw UsageError("kde: --h given but the data has no directional columns");
  if (!need_g && opt.g) throw UsageError("kde: --g given but the data has no z column");
  if (opt.h && !(*opt.h > 0.0)) throw DomainError("kde: h must be positive");
  if (opt.g && !(*opt.g > 0.0)) throw DomainError("kde: g must be positive");
  const int res = opt.grid_res.value_or(default_grid_resolution(std::max(d.q, 1)));
  const auto L = DirectionalKernel::von_mises();
  const auto K = LinearKernel::gaussian();

  CsvWriter csv(out);
  std::vector<std::pair<std::string, std::string>> params{{"data", opt.data}, {"grid_res", std::to_string(res)}};
  if (opt.h) params.emplace_back("h", format_double(*opt.h));
  if (opt.g) params.emplace_back("g", format_double(*opt.g));
  csv.comment(header_line("kde", params));

  std::vector<std::string> cols;
  for (int i = 1; i <= d.q; ++i) cols.push_back("x" + std::to_string(i));
  if (d.q > 0) cols.push_back("x" + std::to_string(d.q + 1));
  if (d.has_z) cols.push_back("z");
  cols.push_back("density");
  csv.header(cols);

  double integral = 0.0;
  switch (d.kind()) {
    case ModelKind::Directional: {
      const SphereGrid grid = build_sphere_grid(d.q, res);
      const auto est = eval_grid(d.dir, *opt.h, L, grid);
      for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto node = grid.node(k);
        csv.row(detail::with_value({node.begin(), node.end()}, est[k]));
        integral += grid.weights[k] * est[k];
      }
      break;
    }
    case ModelKind::DirectionalLinear: {
      const SphereGrid sgrid = build_sphere_grid(d.q, res);
      const LineGrid lgrid = detail::data_line_grid(d.dirlin.z, *opt.g, res);
      const auto est = eval_grid(d.dirlin, Bandwidths{*opt.h, *opt.g}, L, K, sgrid, lgrid);
      const std::size_t nl = lgrid.size();
      for (std::size_t k = 0; k < sgrid.size(); ++k) {
        const auto node = sgrid.node(k);
        for (std::size_t l = 0; l < nl; ++l) {
          auto row = std::vector<double>(node.begin(), node.end());
          row.push_back(lgrid.nodes[l]);
          row.push_back(est[k * nl + l]);
          csv.row(row);
          integral += sgrid.weights[k] * lgrid.weights[l] * est[k * nl + l];
        }
      }
      break;
    }
    case ModelKind::Linear: {
      const LineGrid lgrid = detail::data_line_grid(d.lin, *opt.g, res);
      const auto est = eval_grid(d.lin, *opt.g, K, lgrid);
      for (std::size_t l = 0; l < lgrid.size(); ++l) {
        csv.row({lgrid.nodes[l], est[l]});
        integral += lgrid.weights[l] * est[l];
      }
      break;
    }
  }
  diag << "kde: n = " << d.size() << ", integral of the estimate over the grid = " << format_double(integral) << '\n';
  if (std::fabs(integral - 1.0) > 1e-4) diag << "warning: integral deviates from 1 by more than 1e-4; refine --grid-res\n";
  return integral;
}

// ---------------------------------------------------------------- risk

struct RiskOptions {
  std::string model;
  std::string data;
  std::optional<std::string> h;
  std::optional<std::string> g;
  std::string n = "100";
  std::string methods = "exact,amise";
  std::size_t replicates = 500;
  std::uint64_t seed = 1;
  std::optional<double> hp;
  std::optional<double> gp;
  std::optional<int> grid_res;
};

struct RiskRow {
  double h = std::numeric_limits<double>::quiet_NaN();  // directional bandwidth (NaN for linear)
  double g = std::numeric_limits<double>::quiet_NaN();  // linear bandwidth (NaN for directional)
  std::size_t n = 0;
  std::string method;  // "exact", ..., or "argmin_exact", ...
  double value = 0.0;
  double se = std::numeric_limits<double>::quiet_NaN();
};

namespace detail {

// Grid argmin, refined by golden section on the neighbouring cells for
// smooth deterministic curves. Returns {x, value}.
template <class F>
std::pair<double, double> refine_argmin_1d(const std::vector<double>& xs, const std::vector<double>& vals, F&& f, bool refine) {
  const auto it = std::min_element(vals.begin(), vals.end());
  const std::size_t k = static_cast<std::size_t>(it - vals.begin());
  if (!refine) return {xs[k], *it};
  const double lo = xs[k == 0 ? 0 : k - 1];
  const double hi = xs[std::min(k + 1, xs.size() - 1)];
  const ScalarMinimum m = minimize_scalar(f, lo, hi, 1e-10 * hi);
  if (m.fx <= *it) return {m.x, m.fx};
  return {xs[k], *it};
}

template <class F>
std::pair<std::array<double, 2>, double> refine_argmin_2d(const std::vector<double>& hs, const std::vector<double>& gs,
                                                           const std::vector<double>& vals, F&& f, bool refine) {
  const auto it = std::min_element(vals.begin(), vals.end());
  const std::size_t k = static_cast<std::size_t>(it - vals.begin());
  const std::array<double, 2> best{hs[k / gs.size()], gs[k % gs.size()]};
  if (!refine) return {best, *it};
  auto lf = [&](const std::array<double, 2>& p) { return f(std::exp(p[0]), std::exp(p[1])); };
  const Minimum2d m = minimize_2d(lf, {std::log(best[0]), std::log(best[1])}, 1e-10, 500, 0.05);
  if (m.fx <= *it) return {{std::exp(m.x[0]), std::exp(m.x[1])}, m.fx};
  return {best, *it};
}

}  // namespace detail

/// Evaluates the requested risk curves (surfaces for directional-linear models).
inline std::vector<RiskRow> compute_risk(const RiskOptions& opt, std::ostream& diag) {
  const auto methods = parse_methods(opt.methods);
  const bool want_boot = std::find(methods.begin(), methods.end(), "boot") != methods.end();
  const bool only_boot = want_boot && methods.size() == 1;
  if (opt.model.empty() && !only_boot) throw UsageError("risk: --model is required for methods other than boot");
  if (want_boot && opt.data.empty()) throw UsageError("risk: method boot requires --data");
  if (want_boot && !opt.hp) throw UsageError("risk: method boot requires --hp (and --gp for data with z)");
  if (!want_boot && (opt.hp || opt.gp || !opt.data.empty())) throw UsageError("risk: --data/--hp/--gp are only used by method boot");

  std::optional<Model> model;
  if (!opt.model.empty()) {
    model = load_model(opt.model);
    for (const auto& w : model->warnings) diag << "warning: " << w << '\n';
  }
  std::optional<DataSet> data;
  if (want_boot) data = data_from_table(read_csv_file(opt.data));

  const ModelKind kind = model ? model->kind : data->kind();
  const int q = model ? model->q : data->q;
  if (data && model && (data->kind() != kind || data->q != q)) throw UsageError("risk: --data does not match the model's dimension/type");
  if (want_boot && kind == ModelKind::DirectionalLinear && !opt.gp) throw UsageError("risk: method boot on directional-linear data requires --gp");
  if (want_boot && kind == ModelKind::Linear && !opt.gp) throw UsageError("risk: method boot on linear data requires --gp");
  if (kind == ModelKind::Linear && opt.hp) throw UsageError("risk: --hp has no meaning for linear data");

  const bool need_h = kind != ModelKind::Linear;
  const bool need_g = kind != ModelKind::Directional;
  if (need_h && !opt.h) throw UsageError("risk: --h LO:HI:COUNT is required");
  if (need_g && !opt.g) throw UsageError("risk: --g LO:HI:COUNT is required");
  if (!need_h && opt.h) throw UsageError("risk: --h is not used by linear models (use --g)");
  if (!need_g && opt.g) throw UsageError("risk: --g is not used by directional models");
  const std::vector<double> hs = need_h ? parse_sweep(*opt.h, "--h").values() : std::vector<double>{};
  const std::vector<double> gs = need_g ? parse_sweep(*opt.g, "--g").values() : std::vector<double>{};
  const auto ns = parse_n_list(opt.n);
  if (std::find(methods.begin(), methods.end(), "mc") != methods.end() && opt.replicates < 2) throw UsageError("risk: --replicates must be >= 2");

  const int res = opt.grid_res.value_or(default_grid_resolution(std::max(q, 1)));
  if (need_h) build_sphere_grid(q, res);  // validates q and resolution
  const SphereGrid grid = need_h ? build_sphere_grid(q, res) : SphereGrid{};
  const auto L = DirectionalKernel::von_mises();
  const auto K = LinearKernel::gaussian();
  const KernelConstants kc = kernel_constants(L, K, std::max(q, 1));

  std::vector<RiskRow> rows;
  for (const auto& method : methods) {
    // boot has its own n: the data size
    const std::vector<std::size_t> method_ns = method == "boot" ? std::vector<std::size_t>{data->size()} : ns;
    for (std::size_t n : method_ns) {
      const double nd = static_cast<double>(n);
      const bool smooth = method != "mc";
      if (kind == ModelKind::Directional) {
        std::function<double(double)> f;
        std::optional<double> R_psi;
        if (method == "exact") f = [&](double h) { return exact_mise_dir(model->dir, h, nd, grid); };
        if (method == "amise") {
          R_psi = curvature_functionals(model->dir, grid).R_psi;
          f = [&, R = *R_psi](double h) { return amise_dir(kc, R, h, nd); };
        }
        if (method == "boot") f = [&](double h) { return bootstrap_mise_dir(data->dir, h, *opt.hp, grid); };
        std::vector<double> vals;
        for (double h : hs) {
          RiskRow r{h, std::numeric_limits<double>::quiet_NaN(), n, method};
          if (method == "mc") {
            const McResult mc = mc_ise(model->dir, h, n, opt.replicates, opt.seed, grid, L);
            r.value = mc.mean;
            r.se = mc.se;
          } else {
            r.value = f(h);
          }
          vals.push_back(r.value);
          rows.push_back(r);
        }
        const auto [x, v] = detail::refine_argmin_1d(hs, vals, f, smooth);
        rows.push_back({x, std::numeric_limits<double>::quiet_NaN(), n, "argmin_" + method, v});
      } else if (kind == ModelKind::DirectionalLinear) {
        std::function<double(double, double)> f;
        std::optional<DirLinCurvature> cv;
        if (method == "exact") f = [&](double h, double g) { return exact_mise_dirlin(model->dirlin, h, g, nd, grid); };
        if (method == "amise") {
          cv = curvature_functionals(model->dirlin, grid);
          f = [&](double h, double g) { return amise_dirlin(kc, *cv, h, g, nd); };
        }
        if (method == "boot") f = [&](double h, double g) { return bootstrap_mise_dirlin(data->dirlin, h, g, *opt.hp, *opt.gp, grid); };
        std::vector<double> vals;
        for (double h : hs) {
          for (double g : gs) {
            RiskRow r{h, g, n, method};
            if (method == "mc") {
              const int lres = line_resolution_for(model->dirlin.lin, g);
              const LineGrid lgrid = line_grid_for(model->dirlin.lin, g, lres);
              const McResult mc = mc_ise(model->dirlin, Bandwidths{h, g}, n, opt.replicates, opt.seed, grid, lgrid, L, K);
              r.value = mc.mean;
              r.se = mc.se;
            } else {
              r.value = f(h, g);
            }
            vals.push_back(r.value);
            rows.push_back(r);
          }
        }
        const auto [x, v] = detail::refine_argmin_2d(hs, gs, vals, f, smooth);
        rows.push_back({x[0], x[1], n, "argmin_" + method, v});
      } else {
        std::function<double(double)> f;
        if (method == "exact") f = [&](double g) { return exact_mise_linear(model->lin, g, nd); };
        if (method == "amise") f = [&, R = curvature_linear(model->lin)](double g) { return amise_linear(kc, R, g, nd); };
        if (method == "boot") f = [&](double g) { return bootstrap_mise_linear(data->lin, g, *opt.gp); };
        std::vector<double> vals;
        for (double g : gs) {
          RiskRow r{std::numeric_limits<double>::quiet_NaN(), g, n, method};
          if (method == "mc") {
            const LineGrid lgrid = line_grid_for(model->lin.components, g, line_resolution_for(model->lin.components, g));
            const McResult mc = mc_ise(model->lin, g, n, opt.replicates, opt.seed, lgrid, K);
            r.value = mc.mean;
            r.se = mc.se;
          } else {
            r.value = f(g);
          }
          vals.push_back(r.value);
          rows.push_back(r);
        }
        const auto [x, v] = detail::refine_argmin_1d(gs, vals, f, smooth);
        rows.push_back({std::numeric_limits<double>::quiet_NaN(), x, n, "argmin_" + method, v});
      }
    }
  }
  return rows;
}

inline void cmd_risk(const RiskOptions& opt, std::ostream& out, std::ostream& diag) {
  const auto rows = compute_risk(opt, diag);
  std::vector<std::pair<std::string, std::string>> params;
  if (!opt.model.empty()) params.emplace_back("model", opt.model);
  if (!opt.data.empty()) params.emplace_back("data", opt.data);
  if (opt.h) params.emplace_back("h", parse_sweep(*opt.h, "--h").str());
  if (opt.g) params.emplace_back("g", parse_sweep(*opt.g, "--g").str());
  params.emplace_back("n", opt.n);
  params.emplace_back("method", opt.methods);
  params.emplace_back("replicates", std::to_string(opt.replicates));
  params.emplace_back("seed", std::to_string(opt.seed));
  if (opt.hp) params.emplace_back("hp", format_double(*opt.hp));
  if (opt.gp) params.emplace_back("gp", format_double(*opt.gp));
  if (opt.grid_res) params.emplace_back("grid_res", std::to_string(*opt.grid_res));
  CsvWriter csv(out);
  csv.comment(header_line("risk", params));
  const bool has_h = !rows.empty() && !std::isnan(rows.front().h);
  const bool has_g = !rows.empty() && !std::isnan(rows.front().g);
  std::vector<std::string> cols;
  if (has_h) cols.push_back("h");
  if (has_g) cols.push_back("g");
  for (const char* c : {"n", "method", "value", "se"}) cols.emplace_back(c);
  csv.header(cols);
  for (const auto& r : rows) {
    std::vector<std::string> v;
    if (has_h) v.push_back(format_double(r.h));
    if (has_g) v.push_back(format_double(r.g));
    v.push_back(std::to_string(r.n));
    v.push_back(r.method);
    v.push_back(format_double(r.value));
    v.push_back(std::isnan(r.se) ? "" : format_double(r.se));
    csv.row_strings(v);
  }
}

// ---------------------------------------------------------------- bandwidth

struct BandwidthOptions {
  std::string model;
  std::string data;
  std::string criterion = "amise";
  std::optional<std::size_t> n;
  std::optional<double> hp;
  std::optional<double> gp;
  std::optional<int> grid_res;
};

namespace detail {

// Log-spaced scan of [lo, hi] followed by golden section around the best cell.
template <class F>
ScalarMinimum scan_and_refine(F&& f, double lo, double hi, int points) {
  std::vector<double> xs(points);
  std::vector<double> vals(points);
  for (int i = 0; i < points; ++i) {
    xs[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    vals[i] = f(xs[i]);
  }
  const std::size_t k = static_cast<std::size_t>(std::min_element(vals.begin(), vals.end()) - vals.begin());
  if (k == 0 || k + 1 == xs.size()) {
    throw NumericError("bandwidth: minimizer at the edge of the search range [" + format_double(lo) + ", " + format_double(hi) + "]");
  }
  ScalarMinimum m = minimize_scalar(f, xs[k - 1], xs[k + 1], 1e-10 * xs[k + 1]);
  m.iterations += points;
  return m;
}

}  // namespace detail

inline nlohmann::ordered_json compute_bandwidth(const BandwidthOptions& opt, std::ostream& diag) {
  const std::string& c = opt.criterion;
  if (c != "amise" && c != "exact" && c != "boot") throw UsageError("bandwidth: --criterion must be amise, exact or boot");
  const bool boot = c == "boot";
  if (boot) {
    if (opt.data.empty()) throw UsageError("bandwidth: criterion boot requires --data");
    if (!opt.hp && !opt.gp) throw UsageError("bandwidth: criterion boot requires pilot bandwidths --hp/--gp");
    if (!opt.model.empty()) throw UsageError("bandwidth: criterion boot uses --data, not --model");
    if (opt.n) throw UsageError("bandwidth: criterion boot takes n from the data");
  } else {
    if (opt.model.empty()) throw UsageError("bandwidth: criterion " + c + " requires --model");
    if (!opt.data.empty() || opt.hp || opt.gp) throw UsageError("bandwidth: --data/--hp/--gp are only used by criterion boot");
    if (!opt.n) throw UsageError("bandwidth: --n is required");
  }

  std::optional<Model> model;
  std::optional<DataSet> data;
  if (boot) {
    data = data_from_table(read_csv_file(opt.data));
  } else {
    model = load_model(opt.model);
    for (const auto& w : model->warnings) diag << "warning: " << w << '\n';
  }
  const ModelKind kind = model ? model->kind : data->kind();
  const int q = model ? model->q : data->q;
  const std::size_t n = boot ? data->size() : *opt.n;
  const double nd = static_cast<double>(n);
  if (n < 1) throw UsageError("bandwidth: n must be >= 1");
  if (boot && kind != ModelKind::Linear && !opt.hp) throw UsageError("bandwidth: --hp is required for directional data");
  if (boot && kind != ModelKind::Directional && !opt.gp) throw UsageError("bandwidth: --gp is required for data with a linear part");

  const int res = opt.grid_res.value_or(default_grid_resolution(std::max(q, 1)));
  const SphereGrid grid = kind != ModelKind::Linear ? build_sphere_grid(q, res) : SphereGrid{};
  const auto L = DirectionalKernel::von_mises();
  const auto K = LinearKernel::gaussian();
  const KernelConstants kc = kernel_constants(L, K, std::max(q, 1));

  nlohmann::ordered_json j;
  int iterations = 0;
  bool converged = true;
  constexpr double lo = 1e-3;
  constexpr double hi = 5.0;
  constexpr int scan = 80;
  if (kind == ModelKind::Directional) {
    if (c == "amise") {
      j["h"] = h_amise_dir(kc, curvature_functionals(model->dir, grid).R_psi, nd);
    } else {
      auto f = [&](double h) { return boot ? bootstrap_mise_dir(data->dir, h, *opt.hp, grid) : exact_mise_dir(model->dir, h, nd, grid); };
      const auto m = detail::scan_and_refine(f, lo, hi, scan);
      j["h"] = m.x;
      j["value"] = m.fx;
      iterations = m.iterations;
      converged = m.converged;
    }
  } else if (kind == ModelKind::DirectionalLinear) {
    if (c == "amise") {
      const BandwidthPair p = hg_amise_dirlin(kc, curvature_functionals(model->dirlin, grid), nd);
      j["h"] = p.h;
      j["g"] = p.g;
      iterations = p.iterations;
      converged = p.converged;
    } else {
      auto f = [&](double h, double g) {
        return boot ? bootstrap_mise_dirlin(data->dirlin, h, g, *opt.hp, *opt.gp, grid) : exact_mise_dirlin(model->dirlin, h, g, nd, grid);
      };
      // coarse log grid for the start, then Nelder-Mead on (ln h, ln g)
      constexpr int coarse = 16;
      double best = std::numeric_limits<double>::infinity();
      std::array<double, 2> start{};
      for (int a = 0; a < coarse; ++a) {
        for (int b = 0; b < coarse; ++b) {
          const double h = 0.01 * std::pow(300.0, a / (coarse - 1.0));
          const double g = 0.01 * std::pow(300.0, b / (coarse - 1.0));
          const double v = f(h, g);
          if (v < best) {
            best = v;
            start = {std::log(h), std::log(g)};
          }
        }
      }
      const Minimum2d m = minimize_2d([&](const std::array<double, 2>& p) { return f(std::exp(p[0]), std::exp(p[1])); }, start, 1e-10, 500, 0.1);
      if (!m.converged) throw NumericError("bandwidth: Nelder-Mead did not converge (best h = " + format_double(std::exp(m.x[0])) + ", g = " + format_double(std::exp(m.x[1])) + ")");
      j["h"] = std::exp(m.x[0]);
      j["g"] = std::exp(m.x[1]);
      j["value"] = m.fx;
      iterations = m.iterations + coarse * coarse;
    }
  } else {
    if (c == "amise") {
      j["g"] = g_amise_linear(kc, curvature_linear(model->lin), nd);
    } else {
      auto f = [&](double g) { return boot ? bootstrap_mise_linear(data->lin, g, *opt.gp) : exact_mise_linear(model->lin, g, nd); };
      const auto m = detail::scan_and_refine(f, lo, hi, scan);
      j["g"] = m.x;
      j["value"] = m.fx;
      iterations = m.iterations;
      converged = m.converged;
    }
  }
  j["criterion"] = c;
  j["n"] = n;
  j["diagnostics"] = {{"iterations", iterations}, {"converged", converged}};
  nlohmann::ordered_json gen;
  gen["version"] = kVersion;
  if (model) gen["model"] = opt.model;
  if (data) gen["data"] = opt.data;
  if (opt.hp) gen["hp"] = *opt.hp;
  if (opt.gp) gen["gp"] = *opt.gp;
  gen["grid_res"] = res;
  j["generator"] = gen;
  return j;
}

inline void cmd_bandwidth(const BandwidthOptions& opt, std::ostream& out, std::ostream& diag) {
  out << compute_bandwidth(opt, diag).dump(2) << '\n';
}

// ---------------------------------------------------------------- verify

/// Prints one line per check; returns kExitOk or kExitVerify.
inline int cmd_verify(const VerifyOptions& opt, std::ostream& out) {
  out << "# " << header_line("verify", {{"inject_dq_typo", opt.inject_dq_typo ? "1" : "0"}}) << '\n';
  const auto checks = run_verification(opt);
  int failed = 0;
  for (const auto& c : checks) {
    out << (c.passed ? "PASS" : "FAIL") << "  " << c.name << "  value=" << format_double(c.value) << " expected=" << format_double(c.expected)
        << " error=" << format_double(c.error) << " tol=" << format_double(c.tolerance) << '\n';
    if (!c.passed) ++failed;
  }
  out << checks.size() - failed << "/" << checks.size() << " checks passed\n";
  return failed == 0 ? kExitOk : kExitVerify;
}

}  // namespace dirkde
