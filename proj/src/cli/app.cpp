#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>

#include "slowvary/cli/cli.hpp"
#include "slowvary/error.hpp"
#include "slowvary/linreduce/linreduce.hpp"
#include "slowvary/nlreduce/nlreduce.hpp"
#include "slowvary/normform/normform.hpp"
#include "slowvary/verify/experiments.hpp"

namespace slowvary::cli {

namespace {

using problems::ProblemSpec;

// Thrown for anything that should exit with status 2.
struct UsageError : Error {
  using Error::Error;
};

struct Common {
  std::string problem;
  std::optional<int> order;
  std::vector<std::string> params;
};

std::optional<double> as_double(const std::string& s) {
  char* end = nullptr;
  double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size()) return std::nullopt;
  return v;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

struct Loaded {
  ProblemSpec spec;
  int order = 2;
  std::map<std::string, double> numeric;  // parameter values for the numerics
};

/// Resolves the problem and applies --param k=v. Symbolic values rewrite the
/// operator stack; numeric ones are kept aside when `numeric_params` is set
/// (verify runs), so exact constructions stay symbolic.
Loaded load(const Common& c, bool numeric_params) {
  const auto names = problems::builtin_names();
  if (std::find(names.begin(), names.end(), c.problem) == names.end() && !std::filesystem::exists(c.problem))
    throw UsageError("unknown problem '" + c.problem + "' (see 'slowvary list')");
  auto lp = problems::resolve_problem(c.problem);
  Loaded out{std::move(lp.spec), 2, {}};
  out.order = c.order.value_or(lp.order.value_or(out.spec.default_order));
  if (out.order < 0) throw UsageError("--order must be non-negative");
  for (const auto& kv : c.params) {
    auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == kv.size())
      throw UsageError("--param expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq), value = kv.substr(eq + 1);
    auto num = as_double(value);
    if (numeric_params && num) {
      auto it = std::find_if(out.spec.params.begin(), out.spec.params.end(),
                             [&](const problems::Parameter& p) { return lower(p.name) == lower(key); });
      if (it == out.spec.params.end()) throw UsageError("problem has no parameter '" + key + "'");
      out.numeric[it->name] = *num;
      continue;
    }
    try {
      out.spec.set_param(key, value);
    } catch (const ParseError& e) {
      throw UsageError(std::string("--param ") + kv + ": " + e.what());
    }
  }
  return out;
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw UsageError("cannot write '" + path + "'");
  f << text;
}

struct ReduceArgs {
  Common common;
  bool nonlinear = false;
  bool direct = false;
  bool normal_form = false;
  std::string out;
};

int cmd_reduce(const ReduceArgs& a, std::ostream& out) {
  Loaded L = load(a.common, false);
  if (a.nonlinear && L.spec.is_linear()) throw UsageError("'" + L.spec.name + "' has no nonlinearity");
  if (a.normal_form && a.nonlinear) throw UsageError("--normal-form applies to linear reductions only");
  problems::validate_spec(L.spec, L.order);

  ModelReport rep;
  if (a.nonlinear) {
    auto sm = a.direct ? nlreduce::reduce_nonlinear_direct(L.spec, L.order) : nlreduce::reduce_nonlinear(L.spec, L.order);
    rep = nlreduce::emit_model(sm, L.spec);
  } else if (a.normal_form) {
    auto nf = normform::separate(L.spec, L.order);
    if (!normform::check_exact(nf, L.spec)) throw ConstructionError("normal-form transform leaves a nonzero residual");
    rep = normform::slow_pde_with_error(nf, L.spec);
  } else {
    rep = linreduce::emit_slow_pde(linreduce::reduce_linear(L.spec, L.order), L.spec);
  }

  const std::string text = report_text(rep);
  out << text;
  if (!a.out.empty()) {
    write_file(a.out + ".txt", text);
    write_file(a.out + ".json", report_tree(rep));
  }
  return kOk;
}

struct VerifyArgs {
  Common common;
  std::string kind;
  double kmin = 0.02, kmax = 0.1;
  int samples = 8;
  bool linear_spacing = false;
  int grid = 256;
  std::optional<double> length;
  double dt = 1e-2;
  double tmax = 5;
  std::uint64_t seed = 1;
  double t0 = 1, t1 = 5;
  double tol = 1e-12;
  std::optional<double> expect_slope;
  double slope_band = 0.3;
  double rate_lo = 0.8, rate_hi = 1.1;
  std::string csv;
};

std::uint64_t effective_seed(std::uint64_t flag) {
  const char* env = std::getenv("SLOWVARY_SEED");
  if (!env || !*env) return flag;
  std::uint64_t v = 0;
  const char* end = env + std::char_traits<char>::length(env);
  auto [p, ec] = std::from_chars(env, end, v);
  if (ec != std::errc() || p != end) throw UsageError(std::string("SLOWVARY_SEED is not an unsigned integer: ") + env);
  return v;
}

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  Loaded L = load(a.common, true);
  std::string csv;
  bool pass = false;
  std::ostringstream summary;
  summary.precision(6);

  if (a.kind == "dispersion") {
    auto tab = verify::dispersion_experiment(L.spec, L.order, a.kmin, a.kmax, a.samples,
                                             a.linear_spacing ? verify::Spacing::Linear : verify::Spacing::Log, L.numeric);
    csv = tab.csv();
    pass = tab.max_err < a.tol;
    summary << "max_abs_err = " << tab.max_err << " (band < " << a.tol << ")";
  } else if (a.kind == "error-scaling") {
    auto s = verify::error_scaling_experiment(L.spec, L.order, a.kmin, a.kmax, a.samples, L.numeric);
    csv = s.table.csv();
    // Default expectation: the first neglected even power of k.
    const double expect = a.expect_slope.value_or(L.order % 2 == 0 ? L.order + 2 : L.order + 1);
    if (s.exact) {
      pass = true;
      summary << "model symbol exact (max_abs_err = " << s.table.max_err << "), slope undefined";
    } else {
      pass = std::abs(s.slope - expect) <= a.slope_band;
      summary << "slope = " << s.slope << " r2 = " << s.r2 << " (band " << expect << " +- " << a.slope_band << ")";
    }
  } else {
    auto cfg = verify::emergence_config(a.grid, a.tmax, effective_seed(a.seed));
    if (a.length) cfg.length = *a.length;
    cfg.dt = a.dt;
    cfg.params = L.numeric;
    auto e = verify::emergence_experiment(L.spec, L.order, cfg, a.t0, a.t1);
    csv = e.csv();
    pass = e.fit_ok && e.rate >= a.rate_lo && e.rate <= a.rate_hi;
    summary << "rate = " << e.rate << " r2 = " << e.r2 << " over [" << a.t0 << ", " << a.t1 << "] (band ["
            << a.rate_lo << ", " << a.rate_hi << "], r2 >= 0.99)";
  }

  if (a.csv.empty())
    out << csv;
  else
    write_file(a.csv, csv);
  out << a.kind << " " << L.spec.name << " N=" << L.order << ": " << summary.str() << " -> "
      << (pass ? "PASS" : "FAIL") << "\n";
  return pass ? kOk : kAcceptance;
}

int cmd_list(bool verbose, const std::string& only, std::ostream& out) {
  auto names = problems::builtin_names();
  if (!only.empty()) {
    if (std::find(names.begin(), names.end(), only) == names.end()) throw UsageError("unknown problem '" + only + "'");
    names = {only};
  }
  for (const auto& n : names) {
    auto spec = problems::builtin(n);
    out << n << "  " << spec.description << "\n";
    if (!verbose) continue;
    out << "  cross-section: " << spec.space.str() << "\n";
    out << "  amplitudes:";
    for (const auto& a : spec.amplitudes) out << " " << a;
    out << "\n  default order: " << spec.default_order << "\n";
    for (const auto& p : spec.params) out << "  parameter: " << p.name << " (weight " << p.weight << ")\n";
    for (int l = 0; l < spec.stack_size(); ++l) out << "  L" << l << " = " << spec.L(l).str() << "\n";
    if (!spec.is_linear()) out << "  nonlinear: yes (error offset " << spec.error_offset << ")\n";
  }
  return kOk;
}

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--problem", c.problem, "builtin name or problem file")->required();
  sub->add_option("--order", c.order, "truncation order N");
  sub->add_option("--param", c.params, "parameter override key=value (repeatable)");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"slowvary: slowly varying models of PDEs on long thin domains"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("slowvary ") + kToolVersion);

  ReduceArgs ra;
  auto* reduce = app.add_subcommand("reduce", "construct a slowly varying model");
  add_common(reduce, ra.common);
  reduce->add_flag("--nonlinear", ra.nonlinear, "generating-polynomial nonlinear construction");
  reduce->add_flag("--direct", ra.direct, "with --nonlinear: per-coefficient construction instead");
  reduce->add_flag("--normal-form", ra.normal_form, "linear: exact coordinate transform with history error terms");
  reduce->add_option("--out", ra.out, "write <out>.txt and <out>.json");

  VerifyArgs va;
  auto* ver = app.add_subcommand("verify", "numerical checks of a model against the full problem");
  ver->add_option("experiment", va.kind, "dispersion | emergence | error-scaling")
      ->required()
      ->check(CLI::IsMember({"dispersion", "emergence", "error-scaling"}));
  add_common(ver, va.common);
  ver->add_option("--kmin", va.kmin);
  ver->add_option("--kmax", va.kmax);
  ver->add_option("--samples", va.samples);
  ver->add_flag("--linear-spacing", va.linear_spacing, "dispersion: linearly spaced k (default log)");
  ver->add_option("--grid", va.grid);
  ver->add_option("--length", va.length);
  ver->add_option("--dt", va.dt);
  ver->add_option("--tmax", va.tmax);
  ver->add_option("--seed", va.seed, "overridden by SLOWVARY_SEED");
  ver->add_option("--t0", va.t0, "emergence fit window start");
  ver->add_option("--t1", va.t1, "emergence fit window end");
  ver->add_option("--tol", va.tol, "dispersion acceptance tolerance");
  ver->add_option("--expect-slope", va.expect_slope);
  ver->add_option("--slope-band", va.slope_band);
  ver->add_option("--rate-min", va.rate_lo);
  ver->add_option("--rate-max", va.rate_hi);
  ver->add_option("--csv", va.csv, "write the CSV here instead of stdout");

  bool verbose = false;
  std::string only;
  auto* list = app.add_subcommand("list", "show the builtin problems");
  list->add_flag("--verbose", verbose, "include operator stacks");
  list->add_option("--problem", only);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kBadArguments;
  }

  try {
    if (*reduce) return cmd_reduce(ra, out);
    if (*ver) return cmd_verify(va, out);
    return cmd_list(verbose, only, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kBadArguments;
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kBadArguments;
  } catch (const ValidationError& e) {
    err << "validation failed: " << e.what() << "\n";
    return kValidation;
  } catch (const Error& e) {
    err << "construction failed: " << e.what() << "\n";
    return kConstruction;
  }
}

}  // namespace slowvary::cli
