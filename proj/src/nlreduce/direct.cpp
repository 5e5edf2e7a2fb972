#include "slowvary/error.hpp"
#include "slowvary/nlreduce/nlreduce.hpp"
#include "slowvary/normform/local_odes.hpp"

namespace slowvary::nlreduce {

using algebra::DependencyTable;
using algebra::Scalar;
using algebra::SymbolId;

namespace {

constexpr int kMaxIterations = 99;

Expr divide_small_power(const Expr& e, SymbolId small, int p) {
  Expr out(e.registry(), 0);
  for (const auto& [m, c] : e.terms()) {
    if (m.exponent(small) < p)
      throw ConstructionError("residual term " + Expr::monomial(e.registry(), m, c).str() + " is below order " +
                              std::to_string(p));
    out.add_term(m.shifted(small, -p), c);
  }
  return out;
}

}  // namespace

SlowManifold reduce_nonlinear_direct(const ProblemSpec& spec, int order) {
  problems::validate_spec(spec, order);
  auto dm = crosssec::diagonal_modes(spec.L(0), spec.spectral);
  if (spec.space.kind != crosssec::SpaceKind::FiniteDim || !dm)
    throw ConstructionError("the per-coefficient construction needs a finite-dimensional cross-section with diagonal L0");
  const auto& reg = spec.reg;
  const int m = spec.space.cap;
  const auto small_id = reg->find("small");
  if (!small_id) throw ConstructionError("registry lacks the 'small' symbol");
  const Expr small = spec.small();

  auto lo = normform::local_odes(spec, order, true);
  std::vector<bool> slow(m, false);
  for (int k : dm->slow) slow[k] = true;

  // Amplitude counting: c_n = O(small^(n+1)), coupling O(small^(N+1)).
  std::map<SymbolId, Expr> weighting;
  for (int i = 0; i < m; ++i) {
    if (slow[i])
      for (int n = 0; n <= order; ++n) weighting[lo.coef[i][n]] = small.pow(n + 1) * Expr::var(reg, lo.coef[i][n]);
    for (SymbolId w : lo.coupling[i]) weighting[w] = small.pow(order + 1) * Expr::var(reg, w);
  }
  std::vector<std::vector<Expr>> odes(m, std::vector<Expr>(order + 1));
  for (int i = 0; i < m; ++i)
    for (int n = 0; n <= order; ++n) odes[i][n] = algebra::subs(lo.rhs[i][n], weighting);

  SlowManifold sm;
  sm.problem = spec.name;
  sm.form = "direct";
  sm.order = order;
  sm.bound = order + spec.error_offset;
  sm.coef_manifold.assign(m, std::vector<Expr>(order + 1, Expr(reg, 0)));
  sm.coef_evolution.assign(m, std::vector<Expr>(order + 1, Expr(reg, 0)));

  algebra::TruncationScope scope(*reg, sm.bound);
  for (auto& row : odes)
    for (auto& e : row) e = e.truncated();

  auto current = [&](int i, int n) {
    std::map<SymbolId, Expr> sub;
    for (int k = 0; k < m; ++k)
      if (!slow[k])
        for (int q = 0; q <= order; ++q) sub[lo.coef[k][q]] = sm.coef_manifold[k][q];
    DependencyTable deps;
    for (int k = 0; k < m; ++k)
      if (slow[k])
        for (int q = 0; q <= order; ++q) deps.rate[lo.coef[k][q]] = sm.coef_evolution[k][q];
    Expr rhs = algebra::subs(odes[i][n], sub);
    if (slow[i]) return (rhs - small.pow(n + 1) * sm.coef_evolution[i][n]).truncated();
    return (rhs - algebra::ddt(sm.coef_manifold[i][n], deps)).truncated();
  };

  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    bool ok = true;
    std::size_t terms = 0;
    for (int n = 0; n <= order; ++n) {
      for (int i = 0; i < m; ++i) {
        if (slow[i]) continue;
        Expr res = current(i, n);
        ok = ok && res.is_zero();
        terms += res.size();
        sm.coef_manifold[i][n] += algebra::conv(res, dm->lambda.at(i).re());
      }
      for (int i = 0; i < m; ++i) {
        if (!slow[i]) continue;
        Expr res = current(i, n);
        ok = ok && res.is_zero();
        terms += res.size();
        sm.coef_evolution[i][n] += divide_small_power(res, *small_id, n + 1);
      }
    }
    sm.log.push_back("iteration " + std::to_string(iter) + ": residual terms " + std::to_string(terms));
    if (ok) {
      sm.iterations = iter;
      return sm;
    }
  }
  throw ConstructionError("per-coefficient iteration did not converge in " + std::to_string(kMaxIterations) +
                          " passes");
}

}  // namespace slowvary::nlreduce
