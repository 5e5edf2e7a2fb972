#pragma once

#include <string>
#include <vector>

#include "slowvary/normform/local_odes.hpp"
#include "slowvary/report.hpp"

namespace slowvary::normform {

/// Exact time-dependent coordinate transform u_{i,n} = map[i][n](C, D, history)
/// separating slow variables C (from the slow components) and stable
/// variables D. rate[i][n] is d/dt of the new variable var[i][n].
struct NormalForm {
  std::string problem;
  int order = 0;
  std::vector<bool> slow;  // per component
  std::vector<std::vector<SymbolId>> var;
  std::vector<std::vector<Expr>> map;
  std::vector<std::vector<Expr>> rate;
  int iterations = 0;
  std::vector<std::string> log;
};

// Iterates the separation until every local ODE residual vanishes (cap 99 passes).
NormalForm separate(const ProblemSpec& spec, int order);

// Residuals of the local ODEs under the transform; all zero for an exact transform.
std::vector<std::vector<Expr>> transform_residuals(const NormalForm& nf, const ProblemSpec& spec);
bool check_exact(const NormalForm& nf, const ProblemSpec& spec);

ModelReport slow_pde_with_error(const NormalForm& nf, const ProblemSpec& spec);

}  // namespace slowvary::normform
