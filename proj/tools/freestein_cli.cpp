// freestein: command-line front-end for the derive, stein, poincare, clt and mc pipelines.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "freestein/cltlab.hpp"
#include "freestein/ensemble.hpp"
#include "freestein/errors.hpp"
#include "freestein/io.hpp"
#include "freestein/ncalg.hpp"
#include "freestein/poincare.hpp"
#include "freestein/states.hpp"
#include "freestein/stein.hpp"

namespace {

using namespace freestein;
using json = nlohmann::json;

struct Options {
  std::string what;
  std::size_t index = 1;
  std::string state;
  std::string cumulants;
  std::string ensemble;
  std::string potential = "quadratic";
  std::string tuple;
  std::size_t nvars = 1;
  std::size_t max_order = 0;
  std::size_t degree = 3;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
  std::vector<std::size_t> ks{1, 2, 4, 8, 16, 32, 64};
  std::optional<double> poincare_constant;
  std::size_t norm_order = 0;
  Tolerances tol;
};

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(opt.out, std::ios::binary);
  if (!file) throw Error(ErrorCode::kOther, "cannot write " + opt.out, "--out");
  file << text;
}

void emit_json(const Options& opt, const json& j) { emit(opt, j.dump(2) + "\n"); }

NcPoly load_potential(const Options& opt, std::size_t nvars) {
  if (opt.potential == "quadratic") return NcPoly::quadratic_potential(nvars);
  NcPoly v = io::poly_from_json(io::read_json_file(opt.potential));
  if (v.nvars() != nvars) throw Error(ErrorCode::kOther, "potential nvars differs from the state's", "--potential");
  return v;
}

std::size_t default_order(const Options& opt, std::size_t fallback) { return opt.max_order ? opt.max_order : fallback; }

std::shared_ptr<const MomentFunctional> load_state(const Options& opt, std::size_t needed_order) {
  const int sources = !opt.state.empty() + !opt.cumulants.empty() + !opt.ensemble.empty();
  if (sources != 1) {
    throw Error(ErrorCode::kOther, "exactly one of --state, --cumulants, --ensemble is required", "--state");
  }
  std::shared_ptr<const MomentFunctional> phi;
  if (!opt.state.empty()) {
    phi = io::table_from_json(io::read_json_file(opt.state));
  } else if (!opt.cumulants.empty()) {
    const std::size_t order = default_order(opt, std::max<std::size_t>(needed_order, 2));
    if (opt.cumulants == "semicircular") {
      phi = std::make_shared<CumulantState>(CumulantSpec::semicircular(opt.nvars, order));
    } else if (opt.cumulants == "free-poisson") {
      phi = std::make_shared<CumulantState>(CumulantSpec::centered_free_poisson(opt.nvars, order));
    } else {
      CumulantSpec spec = io::cumulants_from_json(io::read_json_file(opt.cumulants));
      phi = std::make_shared<CumulantState>(std::move(spec), std::max(order, std::size_t{1}));
    }
  } else {
    MatrixEnsembleConfig cfg = io::ensemble_from_json(io::read_json_file(opt.ensemble));
    if (opt.seed) cfg.seed = *opt.seed;
    if (opt.threads) cfg.threads = *opt.threads;
    phi = mc_moment_table(cfg, default_order(opt, needed_order));
  }
  require_valid_state(*phi, opt.tol.psd);
  return phi;
}

std::size_t largest_even(std::size_t m) { return m - m % 2; }

int cmd_derive(const Options& opt) {
  const std::size_t i = opt.index - 1;
  if (opt.what == "jacobian") {
    PolyTuple p = opt.tuple.empty() || opt.tuple == "coordinates" ? PolyTuple::coordinates(opt.nvars)
                                                                  : io::tuple_from_json(io::read_json_file(opt.tuple));
    emit_json(opt, io::to_json(jacobian(p)));
    return 0;
  }
  const NcPoly p = opt.potential == "quadratic" ? NcPoly::quadratic_potential(opt.nvars)
                                                : io::poly_from_json(io::read_json_file(opt.potential));
  if (opt.index == 0 || opt.index > p.nvars()) {
    throw Error(ErrorCode::kOther, "index must lie in 1..nvars", "--index");
  }
  if (opt.what == "partial") {
    emit_json(opt, io::to_json(partial(i, p)));
  } else if (opt.what == "delta") {
    emit_json(opt, io::to_json(delta(p)));
  } else if (opt.what == "cyclic-derivative") {
    emit_json(opt, io::to_json(cyclic_derivative(i, p)));
  } else if (opt.what == "cyclic-gradient") {
    emit_json(opt, io::to_json(cyclic_gradient(p)));
  } else if (opt.what == "explicit-kernel") {
    emit_json(opt, io::to_json(explicit_kernel(p)));
  } else {
    throw Error(ErrorCode::kOther, "unknown derivation " + opt.what, "--what");
  }
  return 0;
}

int cmd_stein(const Options& opt) {
  const auto phi = load_state(opt, 2 * opt.degree + 2);
  SteinProblem prob(phi, load_potential(opt, phi->nvars()));
  prob.require_admissible(opt.tol.admissibility);

  bool certified = true;
  double c = 0.0;
  if (opt.poincare_constant) {
    c = *opt.poincare_constant;
  } else {
    const VoiculescuReport v = voiculescu_bound(*phi, opt.norm_order ? opt.norm_order : largest_even(phi->max_order()));
    certified = v.from_upper.has_value();
    c = certified ? v.from_upper->applicable() : v.from_lower.applicable();
  }
  const BoundReport bounds = discrepancy_bounds(prob, opt.degree, c, opt.tol);
  json report = io::stein_report(prob, bounds, explicit_kernel_distance_sq(prob));
  report["poincare_constant_certified"] = certified || opt.poincare_constant.has_value();
  report["backend"] = phi->backend();
  emit_json(opt, report);
  return 0;
}

int cmd_poincare(const Options& opt) {
  const auto phi = load_state(opt, std::max<std::size_t>(2 * opt.degree, 2));
  const std::size_t order = opt.norm_order ? opt.norm_order : largest_even(phi->max_order());
  emit_json(opt, io::poincare_report(poincare_lower_bound(*phi, opt.degree, opt.tol), voiculescu_bound(*phi, order)));
  return 0;
}

int cmd_clt(const Options& opt) {
  if (!opt.state.empty() || !opt.ensemble.empty()) {
    throw Error(ErrorCode::kOther, "clt runs in cumulant space; pass --cumulants", "--cumulants");
  }
  const std::size_t order = default_order(opt, std::max<std::size_t>(2 * opt.degree + 2, 4));
  CumulantSpec base = CumulantSpec::centered_free_poisson(opt.nvars, order);
  if (opt.cumulants == "semicircular") {
    base = CumulantSpec::semicircular(opt.nvars, order);
  } else if (!opt.cumulants.empty() && opt.cumulants != "free-poisson") {
    base = io::cumulants_from_json(io::read_json_file(opt.cumulants));
  }
  require_valid_state(CumulantState(base), opt.tol.psd);
  CltExperiment exp{base, opt.ks, opt.degree};
  std::ostringstream csv;
  write_clt_csv(csv, clt_rate_table(exp, opt.tol));
  emit(opt, csv.str());
  return 0;
}

int cmd_mc(const Options& opt) {
  if (opt.ensemble.empty()) throw Error(ErrorCode::kOther, "mc needs --ensemble", "--ensemble");
  MatrixEnsembleConfig cfg = io::ensemble_from_json(io::read_json_file(opt.ensemble));
  if (opt.seed) cfg.seed = *opt.seed;
  if (opt.threads) cfg.threads = *opt.threads;
  const auto table = mc_moment_table(cfg, default_order(opt, 6));
  require_valid_state(*table, opt.tol.psd);
  emit_json(opt, io::to_json(*table));
  return 0;
}

int fail(ErrorCode code, const std::string& message, const std::string& field) {
  const json err = {{"error", {{"code", to_string(code)}, {"exit_code", static_cast<int>(code)},
                               {"message", message}, {"field", field}}}};
  std::cerr << err.dump() << "\n";
  return static_cast<int>(code);
}

void add_tolerances(CLI::App* cmd, Options& opt) {
  auto positive = CLI::PositiveNumber;
  cmd->add_option("--tol-identity", opt.tol.identity, "Stein identity residual tolerance")->check(positive);
  cmd->add_option("--tol-psd", opt.tol.psd, "negative-eigenvalue slack")->check(positive);
  cmd->add_option("--tol-pinv", opt.tol.pinv, "pseudo-inverse cutoff")->check(positive);
  cmd->add_option("--tol-admissibility", opt.tol.admissibility, "allowed centering defect")->check(positive);
}

void add_state_flags(CLI::App* cmd, Options& opt) {
  cmd->add_option("--state", opt.state, "moment table JSON");
  cmd->add_option("--cumulants", opt.cumulants, "cumulant JSON, or semicircular / free-poisson");
  cmd->add_option("--ensemble", opt.ensemble, "matrix ensemble JSON");
  cmd->add_option("--nvars", opt.nvars, "number of variables for builtin states")->check(CLI::Range(1, 255));
  cmd->add_option("--max-order", opt.max_order, "moment order to materialize");
  cmd->add_option("--seed", opt.seed, "overrides the ensemble seed");
  cmd->add_option("--threads", opt.threads, "sampling threads (0: all cores)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Free Stein kernels, discrepancies and Poincare constants"};
  app.require_subcommand(1);
  Options opt;

  auto* derive = app.add_subcommand("derive", "apply a derivation to a polynomial");
  derive->add_option("--what", opt.what, "partial | delta | cyclic-derivative | cyclic-gradient | jacobian | explicit-kernel")
      ->required()
      ->check(CLI::IsMember({"partial", "delta", "cyclic-derivative", "cyclic-gradient", "jacobian", "explicit-kernel"}));
  derive->add_option("--potential", opt.potential, "polynomial JSON, or quadratic");
  derive->add_option("--tuple", opt.tuple, "polynomial tuple JSON for jacobian, or coordinates");
  derive->add_option("--index", opt.index, "1-based variable index");
  derive->add_option("--nvars", opt.nvars, "variables for builtin inputs")->check(CLI::Range(1, 255));
  derive->add_option("--out", opt.out, "output path");

  auto* stein = app.add_subcommand("stein", "discrepancy bounds for a state and potential");
  add_state_flags(stein, opt);
  stein->add_option("--potential", opt.potential, "polynomial JSON, or quadratic");
  stein->add_option("--degree", opt.degree, "truncation degree");
  stein->add_option("--poincare-constant", opt.poincare_constant, "Poincare constant for the upper bound")
      ->check(CLI::PositiveNumber);
  stein->add_option("--norm-order", opt.norm_order, "even moment order for norm estimates");
  stein->add_option("--out", opt.out, "output path");
  add_tolerances(stein, opt);

  auto* poincare = app.add_subcommand("poincare", "Poincare constant bounds");
  add_state_flags(poincare, opt);
  poincare->add_option("--degree", opt.degree, "truncation degree");
  poincare->add_option("--norm-order", opt.norm_order, "even moment order for norm estimates");
  poincare->add_option("--out", opt.out, "output path");
  add_tolerances(poincare, opt);

  auto* clt = app.add_subcommand("clt", "free CLT rate table as CSV");
  clt->add_option("--cumulants", opt.cumulants, "base cumulant JSON, or semicircular / free-poisson (default)");
  clt->add_option("--nvars", opt.nvars, "variables for builtin bases")->check(CLI::Range(1, 255));
  clt->add_option("--max-order", opt.max_order, "cumulant order for builtin bases");
  clt->add_option("--ks", opt.ks, "k grid")->delimiter(',');
  clt->add_option("--degree", opt.degree, "truncation degree");
  clt->add_option("--out", opt.out, "output path");
  add_tolerances(clt, opt);

  auto* mc = app.add_subcommand("mc", "Monte Carlo moment table");
  mc->add_option("--ensemble", opt.ensemble, "matrix ensemble JSON")->required();
  mc->add_option("--max-order", opt.max_order, "largest word length (default 6)");
  mc->add_option("--seed", opt.seed, "overrides the ensemble seed");
  mc->add_option("--threads", opt.threads, "sampling threads (0: all cores)");
  mc->add_option("--out", opt.out, "output path");
  add_tolerances(mc, opt);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return fail(ErrorCode::kOther, e.what(), "argv");
  }

  try {
    if (*derive) return cmd_derive(opt);
    if (*stein) return cmd_stein(opt);
    if (*poincare) return cmd_poincare(opt);
    if (*clt) return cmd_clt(opt);
    if (*mc) return cmd_mc(opt);
  } catch (const Error& e) {
    return fail(e.code(), e.what(), e.field());
  } catch (const json::exception& e) {
    return fail(ErrorCode::kOther, e.what(), "json");
  } catch (const std::exception& e) {
    return fail(ErrorCode::kOther, e.what(), "");
  }
  return 1;
}
