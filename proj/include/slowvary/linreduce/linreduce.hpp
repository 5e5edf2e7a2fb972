#pragma once

#include <string>
#include <vector>

#include "slowvary/problems/problem.hpp"
#include "slowvary/report.hpp"

namespace slowvary::linreduce {

using algebra::Expr;
using algebra::Scalar;
using crosssec::CrossField;
using crosssec::ExprMatrix;
using problems::ProblemSpec;

using FieldRow = std::vector<CrossField>;

// coef * L_ell applied to u_N^{(k)}.
struct RemainderPiece {
  Scalar coef;
  int ell = 0;
  int k = 0;
};

struct Remainder {
  int n = 0;
  std::vector<RemainderPiece> pieces;
  // Realised cross-field when the space admits one (not for NeumannChannel).
  std::optional<CrossField> field;
  std::string str(const std::string& field_name, int order) const;
};

/// A_0..A_N, generalised eigenvectors V_0..V_N and remainders r_0..r_N of
/// the slowly varying expansion du/dt ~ sum_n V_n A_n-style recursion.
struct LinearReduction {
  std::string problem;
  int order = 0;
  std::vector<ExprMatrix> A;
  std::vector<FieldRow> V;
  std::vector<Remainder> remainders;
  std::vector<std::string> log;
};

LinearReduction reduce_linear(const ProblemSpec& spec, int order);

/// Block upper-triangular Toeplitz forms: cV[i][j] = V_{j-i}, cA[i][j] = A_{j-i}
/// (as a flat (N+1)m square matrix). The identity L cV = cV cA is verified.
struct Toeplitz {
  std::vector<std::vector<FieldRow>> cV;
  ExprMatrix cA;
};
Toeplitz assemble_toeplitz(const LinearReduction& red, const ProblemSpec& spec);

std::vector<Remainder> remainder_terms(const ProblemSpec& spec, int order);

ModelReport emit_slow_pde(const LinearReduction& red, const ProblemSpec& spec);

// "coef*name" pieces summed with canonical signs; multi-term coefficients are bracketed.
std::string format_sum(const std::vector<std::pair<Expr, std::string>>& terms);
std::string derivative_name(const std::string& amp, int n);

// Smallest n with V_n nonzero in each cross-space component (FiniteDim only;
// 0 otherwise). Component i then scales like the n-th x-derivative of the amplitude.
std::vector<int> component_orders(const LinearReduction& red, const ProblemSpec& spec);

}  // namespace slowvary::linreduce
