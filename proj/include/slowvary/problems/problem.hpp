#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slowvary/crosssec/spectral.hpp"
#include "slowvary/problems/multinomial.hpp"

namespace slowvary::problems {

using algebra::Expr;
using algebra::RegistryPtr;

struct Parameter {
  std::string name;  // registry symbol
  int weight = 0;    // order of the parameter in the amplitude grading
};

// Linear perturbation small^weight * param * u, kept out of the operator stack.
struct Perturbation {
  std::string param;
  int weight = 2;
};

/// A PDE  du/dt = sum_l L_l d^l u/dx^l + f(u, u_x, ...)  on a cylindrical domain.
///
/// FiniteDim problems carry one nonlinearity per component, written in the
/// component names; function-space problems have one field acting pointwise.
struct ProblemSpec {
  std::string name;
  std::string description;
  RegistryPtr reg;
  crosssec::CrossSpace space;
  crosssec::OperatorStack ops;  // L0 .. Lp
  std::vector<std::string> fields;
  std::vector<Multinomial> nonlinearity;  // empty for linear problems
  std::vector<Parameter> params;
  std::optional<Perturbation> perturbation;
  crosssec::SpectralData spectral;
  std::vector<std::string> amplitudes;  // one name per slow mode
  int default_order = 2;
  int coupling_modes = 0;  // largest coupling harmonic for Fourier problems
  int error_offset = 3;    // nonlinear truncation is small^(N + error_offset)

  bool is_linear() const;
  const crosssec::Operator& L(int l) const { return ops.at(l); }
  int stack_size() const { return static_cast<int>(ops.size()); }

  Expr small() const;
  Expr xi() const;

  /// Replaces parameter `key` (case-insensitive) by the expression `value`
  /// throughout the operator stack. A bare name renames the symbol.
  void set_param(const std::string& key, const std::string& value);
};

// Names of the shipped problems.
std::vector<std::string> builtin_names();
ProblemSpec builtin(const std::string& name);

struct ValidationReport {
  std::vector<std::string> lines;
};

// Runs spectral_check at order N and checks the nonlinearity (degree, symbols).
ValidationReport validate_spec(const ProblemSpec& spec, int order);

struct LoadedProblem {
  ProblemSpec spec;
  std::optional<int> order;
};

/// INI problem file: [problem] name/order, [params] key = value,
/// [nonlinearity] expr (or one key per component), [coupling] modes.
LoadedProblem load_problem_file(const std::string& path);
LoadedProblem load_problem_text(const std::string& text);

// Builtin name or path to a problem file.
LoadedProblem resolve_problem(const std::string& name_or_path);

// Registry name of the k-th x-derivative of the order-N coupling coefficient:
// component index for FiniteDim (c4x), harmonic for Fourier (u2_p1_xx).
std::string coupling_name(const ProblemSpec& spec, int order, int index, int k);

/// The field u_N^{(k)} built from coupling symbols; Fourier harmonics are
/// limited to |h| <= coupling_modes. NeumannChannel has no finite form.
crosssec::CrossField coupling_field(const ProblemSpec& spec, int order, int k);

}  // namespace slowvary::problems
