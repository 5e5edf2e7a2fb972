#pragma once

#include <vector>

#include "slowvary/problems/problem.hpp"

namespace slowvary::normform {

using algebra::Expr;
using algebra::SymbolId;
using problems::ProblemSpec;

/// Exact local ODEs of a FiniteDim problem about a station X.
///
/// Each field is replaced by its Taylor polynomial of degree N whose last
/// coefficient varies along x; the x-derivatives of that coefficient are the
/// coupling symbols (c4x, c4xx, ...). rhs[i][n] is the n-th x-derivative at X
/// of the PDE right-hand side, so that d/dt u_{i,n} = rhs[i][n] exactly.
struct LocalOdes {
  int order = 0;
  std::vector<std::vector<SymbolId>> coef;      // [component][n], named c0, d3, ...
  std::vector<std::vector<SymbolId>> coupling;  // [component][k-1]
  std::vector<std::vector<Expr>> rhs;           // [component][n]
};

LocalOdes local_odes(const ProblemSpec& spec, int order, bool with_nonlinearity = true);

}  // namespace slowvary::normform
