// dirkde: sampling, density estimation, risk curves, bandwidth selection and
// a self-verification suite for directional / directional-linear KDE.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"

#include "dirkde/commands.hpp"

namespace {

// Opens --out (or stdout) only after the command has fully computed its output,
// so a failing command never leaves a truncated file behind.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw dirkde::UsageError("cannot open output file " + path);
  out << text;
  if (!out) throw dirkde::NumericError("write to " + path + " failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kernel density estimation for directional and directional-linear data"};
  app.set_version_flag("--version", std::string(dirkde::kVersion));
  app.set_help_flag("--help", "Print this help message and exit");  // -h would clash with --h
  app.require_subcommand(1);

  std::string out_path;
  std::uint64_t seed = 1;
  std::optional<int> grid_res;

  auto add_common = [&](CLI::App* sub, bool with_seed) {
    sub->add_option("--out", out_path, "Output file (default: stdout)");
    sub->add_option("--grid-res", grid_res, "Quadrature resolution (default 128 for q=1, 64 for q=2, 32 for q=3)")->check(CLI::Range(8, 100000));
    if (with_seed) sub->add_option("--seed", seed, "Random seed")->capture_default_str();
  };

  dirkde::SampleOptions sample_opt;
  std::size_t sample_n = 0;
  auto* sample = app.add_subcommand("sample", "Draw a sample from a mixture model; CSV x1..x{q+1}[,z]");
  sample->add_option("--model", sample_opt.model, "Model JSON file")->required();
  sample->add_option("--n", sample_n, "Sample size")->required()->check(CLI::PositiveNumber);
  add_common(sample, true);

  dirkde::KdeOptions kde_opt;
  auto* kde = app.add_subcommand("kde", "Evaluate the kernel density estimate on a quadrature grid");
  kde->add_option("--data", kde_opt.data, "Sample CSV (columns x1..x{q+1}[,z])")->required();
  kde->add_option("--h", kde_opt.h, "Directional bandwidth");
  kde->add_option("--g", kde_opt.g, "Linear bandwidth");
  add_common(kde, false);

  dirkde::RiskOptions risk_opt;
  auto* risk = app.add_subcommand("risk", "MISE curves/surfaces over a bandwidth sweep; CSV h[,g],n,method,value,se");
  risk->add_option("--model", risk_opt.model, "Model JSON file");
  risk->add_option("--data", risk_opt.data, "Sample CSV for method boot");
  risk->add_option("--h", risk_opt.h, "Directional bandwidth sweep LO:HI:COUNT");
  risk->add_option("--g", risk_opt.g, "Linear bandwidth sweep LO:HI:COUNT");
  risk->add_option("--n", risk_opt.n, "Sample sizes, comma separated")->capture_default_str();
  risk->add_option("--method", risk_opt.methods, "Subset of exact,amise,boot,mc")->capture_default_str();
  risk->add_option("--replicates", risk_opt.replicates, "Monte Carlo replicates for method mc")->capture_default_str();
  risk->add_option("--hp", risk_opt.hp, "Pilot directional bandwidth (boot)");
  risk->add_option("--gp", risk_opt.gp, "Pilot linear bandwidth (boot)");
  add_common(risk, true);

  dirkde::BandwidthOptions bw_opt;
  auto* bandwidth = app.add_subcommand("bandwidth", "Select a bandwidth; JSON {h, g?, criterion, n, diagnostics}");
  bandwidth->add_option("--model", bw_opt.model, "Model JSON file (criteria amise, exact)");
  bandwidth->add_option("--data", bw_opt.data, "Sample CSV (criterion boot)");
  bandwidth->add_option("--criterion", bw_opt.criterion, "amise, exact or boot")->capture_default_str();
  bandwidth->add_option("--n", bw_opt.n, "Sample size (criteria amise, exact)");
  bandwidth->add_option("--hp", bw_opt.hp, "Pilot directional bandwidth (boot)");
  bandwidth->add_option("--gp", bw_opt.gp, "Pilot linear bandwidth (boot)");
  add_common(bandwidth, false);

  dirkde::VerifyOptions verify_opt;
  auto* verify = app.add_subcommand("verify", "Check kernel constants, normalizing constants and sphere quadrature");
  verify->add_flag("--inject-dq-typo", verify_opt.inject_dq_typo, "Use d_q = 2^{-q/2+1}; the suite must then fail");
  verify->add_option("--out", out_path, "Report file (default: stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? dirkde::kExitOk : dirkde::kExitUsage;
  }

  try {
    std::ostringstream buf;
    int rc = dirkde::kExitOk;
    if (*sample) {
      sample_opt.n = sample_n;
      sample_opt.seed = seed;
      dirkde::cmd_sample(sample_opt, buf, std::cerr);
    } else if (*kde) {
      kde_opt.grid_res = grid_res;
      dirkde::cmd_kde(kde_opt, buf, std::cerr);
    } else if (*risk) {
      risk_opt.seed = seed;
      risk_opt.grid_res = grid_res;
      dirkde::cmd_risk(risk_opt, buf, std::cerr);
    } else if (*bandwidth) {
      bw_opt.grid_res = grid_res;
      dirkde::cmd_bandwidth(bw_opt, buf, std::cerr);
    } else if (*verify) {
      rc = dirkde::cmd_verify(verify_opt, buf);
    }
    emit(out_path, buf.str());
    return rc;
  } catch (const dirkde::NumericError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dirkde::kExitNumeric;
  } catch (const dirkde::DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dirkde::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return dirkde::kExitNumeric;
  }
}
