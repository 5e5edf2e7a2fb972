#include <set>

#include <gmpxx.h>

#include "slowvary/error.hpp"
#include "slowvary/nlreduce/nlreduce.hpp"

namespace slowvary::nlreduce {

using algebra::Monomial;
using algebra::Scalar;
using algebra::SymbolId;
using crosssec::SpaceKind;

namespace {

Scalar factorial(int n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Scalar(mpq_class(f));
}

SymbolId need(const ProblemSpec& spec, const std::string& name) {
  auto id = spec.reg->find(name);
  if (!id) throw ConstructionError("registry lacks the '" + name + "' symbol");
  return *id;
}

// Amplitude j -> component carrying its slow mode.
std::vector<int> slow_components(const ProblemSpec& spec) {
  auto dm = crosssec::diagonal_modes(spec.L(0), spec.spectral);
  if (!dm || spec.space.kind != SpaceKind::FiniteDim)
    throw ConstructionError("Taylor comparison needs a finite-dimensional cross-section with diagonal L0");
  return dm->slow;
}

std::string entry_name(const ProblemSpec& spec, int index) {
  if (spec.space.kind == SpaceKind::FiniteDim) return spec.fields.at(index);
  const std::string& u = spec.fields.empty() ? std::string("u") : spec.fields[0];
  return u + "[" + std::to_string(index) + "]";
}

}  // namespace

Expr unit_small(const ProblemSpec& spec, const Expr& e) {
  auto small = spec.reg->find("small");
  if (!small) return e;
  algebra::TruncationScope exact(*spec.reg, std::nullopt);
  return algebra::subs(e, {{*small, Expr(spec.reg, 1)}});
}

CrossField at_station(const ProblemSpec& spec, const CrossField& f) {
  std::map<SymbolId, Expr> sub;
  if (auto s = spec.reg->find("small")) sub[*s] = Expr(spec.reg, 1);
  if (auto x = spec.reg->find("xi")) sub[*x] = Expr(spec.reg, 0);
  algebra::TruncationScope exact(*spec.reg, std::nullopt);
  return f.map([&](const Expr& e) { return algebra::subs(e, sub); });
}

CompareReport extract_taylor_compare(const ProblemSpec& spec, const SlowManifold& generating,
                                     const SlowManifold& direct) {
  if (generating.form != "generating" || direct.form != "direct")
    throw ConstructionError("comparison needs a generating and a direct construction");
  if (generating.order != direct.order || generating.bound != direct.bound)
    throw ConstructionError("constructions differ in order or truncation");
  const auto& reg = spec.reg;
  const int N = generating.order;
  const int bound = generating.bound;
  const SymbolId xi = need(spec, "xi");
  const Expr small = spec.small();
  auto slow = slow_components(spec);

  // Jets of the generating amplitudes expand into the local Taylor coefficients.
  std::map<SymbolId, Expr> expand;
  {
    algebra::TruncationScope exact(*reg, std::nullopt);
    const Expr X = spec.xi();
    for (std::size_t j = 0; j < spec.amplitudes.size(); ++j) {
      SymbolId amp = need(spec, spec.amplitudes[j]);
      const std::string& field = spec.fields.at(slow.at(j));
      for (int k = 0; k <= bound; ++k) {
        Expr s(reg, 0);
        for (int n = k; n <= N; ++n) s += X.pow(n - k) * Expr::var(reg, need(spec, field + std::to_string(n))) / factorial(n - k);
        expand[reg->jet(amp, k)] = s;
      }
    }
  }

  auto taylor = [&](const Expr& gen, int n, int shift) {
    Expr full;
    {
      algebra::TruncationScope exact(*reg, std::nullopt);
      full = algebra::coeff(algebra::subs(gen, expand), xi, n) * factorial(n);
    }
    return (full * small.pow(shift)).truncated(bound);
  };

  CompareReport rep;
  std::vector<bool> is_slow(spec.space.cap, false);
  for (std::size_t j = 0; j < slow.size(); ++j) {
    int i = slow[j];
    is_slow[i] = true;
    for (int n = 0; n <= N; ++n) {
      Expr lhs = taylor(generating.evolution.at(j), n, n + 1);
      Expr rhs = (small.pow(n + 1) * direct.coef_evolution.at(i).at(n)).truncated(bound);
      Expr d = lhs - rhs;
      if (!d.is_zero()) rep.diffs.push_back("d" + spec.fields[i] + std::to_string(n) + "/dt: " + d.str());
    }
  }
  for (int i = 0; i < spec.space.cap; ++i) {
    if (is_slow[i]) continue;
    for (int n = 0; n <= N; ++n) {
      Expr lhs = taylor(generating.field.at(i), n, n);
      Expr rhs = direct.coef_manifold.at(i).at(n).truncated(bound);
      Expr d = lhs - rhs;
      if (!d.is_zero()) rep.diffs.push_back(spec.fields[i] + std::to_string(n) + ": " + d.str());
    }
  }
  return rep;
}

ModelReport emit_model(const SlowManifold& sm, const ProblemSpec& spec) {
  const auto& reg = spec.reg;
  algebra::TruncationScope exact(*reg, std::nullopt);
  ModelReport rep;
  rep.problem = spec.name;
  rep.order = sm.order;
  rep.construction = sm.form == "direct" ? "nonlinear-direct" : "nonlinear";
  std::string grading = "amplitude weight 1, d/dx weight 1, coupling weight " + std::to_string(sm.order + 1);
  for (const auto& p : spec.params)
    if (p.weight > 0) grading += ", " + p.name + " weight " + std::to_string(p.weight);
  rep.grading = grading + "; terms of total weight >= " + std::to_string(sm.bound) + " dropped";
  rep.estimates.push_back("residual = O(|u|^" + std::to_string(sm.bound) + ")");
  rep.log = sm.log;
  rep.log.push_back("converged in " + std::to_string(sm.iterations) + " iterations");

  if (sm.form == "direct") {
    for (std::size_t i = 0; i < sm.coef_manifold.size(); ++i)
      for (std::size_t n = 0; n < sm.coef_manifold[i].size(); ++n) {
        if (!sm.coef_manifold[i][n].is_zero())
          rep.manifold.emplace_back(spec.fields[i] + std::to_string(n), unit_small(spec, sm.coef_manifold[i][n]).str());
        if (!sm.coef_evolution[i][n].is_zero())
          rep.evolution.emplace_back(spec.fields[i] + std::to_string(n) + "_t",
                                     unit_small(spec, sm.coef_evolution[i][n]).str());
      }
    // The model is the evolution of the station values c_i0.
    for (std::size_t i = 0; i < sm.coef_evolution.size(); ++i) {
      if (sm.coef_evolution[i].empty() || sm.coef_evolution[i][0].is_zero()) continue;
      Expr e = unit_small(spec, sm.coef_evolution[i][0]);
      Expr coupling = algebra::select(e, [&](const Monomial& m) { return algebra::has_fast_time(*reg, m); });
      Expr autonomous = e - coupling;
      if (!rep.model.empty()) rep.model += "\n";
      rep.model += spec.fields[i] + "0_t = " + (autonomous.is_zero() ? std::string("0") : autonomous.str());
      if (!coupling.is_zero()) {
        rep.model += " + [" + coupling.str() + "]";
        rep.coupling_error.emplace_back(spec.fields[i] + "0_t", coupling.str());
      }
    }
    return rep;
  }

  std::map<SymbolId, Expr> station;
  station[need(spec, "xi")] = Expr(reg, 0);
  if (auto s = reg->find("small")) station[*s] = Expr(reg, 1);

  std::set<SymbolId> jets;
  for (const auto& a : spec.amplitudes)
    for (int k = 0; k <= sm.bound; ++k) jets.insert(reg->jet(need(spec, a), k));

  std::string model;
  for (std::size_t j = 0; j < spec.amplitudes.size(); ++j) {
    const std::string& amp = spec.amplitudes[j];
    Expr e = algebra::subs(sm.evolution.at(j), station);
    Expr coupling = algebra::select(e, [&](const Monomial& m) { return algebra::has_fast_time(*reg, m); });
    Expr autonomous = e - coupling;
    if (!model.empty()) model += "\n";
    model += amp + "_t = " + (autonomous.is_zero() ? std::string("0") : autonomous.str());
    if (!coupling.is_zero()) model += " + [" + coupling.str() + "]";
    rep.evolution.emplace_back(amp + "_t", e.str());
    rep.coupling_error.emplace_back(amp + "_t", coupling.str());

    // Linear coefficients, one per derivative order.
    for (int k = 0; k <= sm.bound; ++k) {
      SymbolId jet = reg->jet(need(spec, amp), k);
      Expr lin = algebra::select(autonomous, [&](const Monomial& m) {
        if (m.exponent(jet) != 1) return false;
        int deg = 0;
        for (const auto& f : m.factors())
          if (jets.count(f.id)) deg += f.exp;
        return deg == 1;
      });
      if (lin.is_zero()) continue;
      rep.coefficients.emplace_back(amp + ":A" + std::to_string(k), algebra::coeff(lin, jet, 1).str());
    }
  }
  rep.model = model;
  const CrossField station_field = at_station(spec, sm.field);
  for (const auto& [k, v] : station_field.entries()) rep.manifold.emplace_back(entry_name(spec, k), v.str());
  return rep;
}

}  // namespace slowvary::nlreduce
