#pragma once

#include <optional>
#include <string>
#include <vector>

#include "slowvary/problems/problem.hpp"
#include "slowvary/report.hpp"

namespace slowvary::nlreduce {

using algebra::Expr;
using crosssec::CrossField;
using problems::ProblemSpec;

/// Coupling to neighbouring stations inside the generating-polynomial
/// equation: sum over l >= 1 and n in [max(N-l+1,0), N] of
/// xi^n/n! small^(N+1-n) binom(n+l, N) L_l u_N^{(n+l-N)}.
struct CouplingTerm {
  CrossField field;
  int terms = 0;  // number of (l, n) pairs contributing
};
CouplingTerm assemble_coupling(const ProblemSpec& spec, int order);

struct NonlinearOptions {
  std::optional<int> bound;  // combined small/xi truncation; default N + error_offset
  bool coupling = true;      // false drops the coupling term altogether
};

/// Slow manifold and evolution on it.
///
/// The generating form stores the field u(xi) in absolute size (amplitudes
/// enter as small*amp) and one evolution expression per amplitude, with jets
/// amp_x, amp_xx, ... standing for xi-derivatives. The direct form stores
/// per-Taylor-coefficient arrays instead.
struct SlowManifold {
  std::string problem;
  std::string form;  // "generating" or "direct"
  int order = 0;
  int bound = 0;
  CrossField field;
  std::vector<Expr> evolution;
  std::vector<std::vector<Expr>> coef_manifold;   // [component][n], stable components
  std::vector<std::vector<Expr>> coef_evolution;  // [component][n], slow components
  int iterations = 0;
  std::vector<std::string> log;
};

SlowManifold reduce_nonlinear(const ProblemSpec& spec, int order, const NonlinearOptions& opt = {});

// Residual of the generating-polynomial equation for a given field and evolution.
CrossField generating_residual(const ProblemSpec& spec, const SlowManifold& sm, bool coupling = true);

SlowManifold reduce_nonlinear_direct(const ProblemSpec& spec, int order);

struct CompareReport {
  std::vector<std::string> diffs;
  bool empty() const { return diffs.empty(); }
};

/// Unpacks the generating polynomials into Taylor coefficients (n! times the
/// xi^n coefficient, times the order weight small^(n+1)) and diffs them
/// termwise against the direct construction.
CompareReport extract_taylor_compare(const ProblemSpec& spec, const SlowManifold& generating,
                                     const SlowManifold& direct);

ModelReport emit_model(const SlowManifold& sm, const ProblemSpec& spec);

// Sets small = 1 (display form).
Expr unit_small(const ProblemSpec& spec, const Expr& e);
// Value of the field at xi = 0 with small = 1, per cross-space entry.
CrossField at_station(const ProblemSpec& spec, const CrossField& f);

}  // namespace slowvary::nlreduce
