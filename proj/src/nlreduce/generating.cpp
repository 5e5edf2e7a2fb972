#include <algorithm>

#include <gmpxx.h>

#include "slowvary/error.hpp"
#include "slowvary/nlreduce/nlreduce.hpp"

namespace slowvary::nlreduce {

using algebra::DependencyTable;
using algebra::Monomial;
using algebra::Scalar;
using algebra::SymbolId;
using crosssec::SpaceKind;

namespace {

constexpr int kMaxIterations = 99;

Scalar factorial(int n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Scalar(mpq_class(f));
}

Scalar binomial(int n, int k) {
  mpz_class b;
  mpz_bin_uiui(b.get_mpz_t(), n, k);
  return Scalar(mpq_class(b));
}

SymbolId id_of(const ProblemSpec& spec, const char* name) {
  auto id = spec.reg->find(name);
  if (!id) throw ConstructionError(std::string("registry lacks the '") + name + "' symbol");
  return *id;
}

CrossField dxi(const CrossField& f, SymbolId xi, int k) {
  return f.map([&](const Expr& e) { return algebra::diff(e, xi, k); });
}

// Function-space values multiply pointwise.
struct Pointwise {
  CrossField f;
  friend Pointwise operator*(const Pointwise& a, const Pointwise& b) { return {product(a.f, b.f)}; }
  friend Pointwise operator+(const Pointwise& a, const Pointwise& b) { return {a.f + b.f}; }
};

// g / small, exact: every term must carry a factor of small.
Expr divide_small(const Expr& g, SymbolId small) {
  Expr out(g.registry(), 0);
  for (const auto& [m, c] : g.terms()) {
    if (m.exponent(small) < 1) throw ConstructionError("slow residual term " + Expr::monomial(g.registry(), m, c).str() +
                                                       " lacks an amplitude factor");
    out.add_term(m.shifted(small, -1), c);
  }
  return out;
}

std::vector<SymbolId> amplitude_ids(const ProblemSpec& spec) {
  const auto& reg = spec.reg;
  SymbolId xi = id_of(spec, "xi");
  std::vector<SymbolId> ids;
  for (const auto& a : spec.amplitudes) {
    SymbolId id = reg->symbol(a);
    reg->set_time_varying(id);
    if (reg->info(id).jet_var != xi) reg->declare_jets(id, xi);
    ids.push_back(id);
  }
  return ids;
}

CrossField nonlinear_term(const ProblemSpec& spec, const CrossField& u, SymbolId xi, const Expr& small) {
  CrossField out(spec.space);
  if (spec.nonlinearity.empty()) return out;
  auto deriv = [&](const CrossField& f, int d) { return d == 0 ? f : dxi(f, xi, d) * small.pow(d); };
  if (spec.space.kind == SpaceKind::FiniteDim) {
    for (std::size_t i = 0; i < spec.nonlinearity.size(); ++i) {
      auto leaf = [&](const std::string& sym, int d) {
        auto it = std::find(spec.fields.begin(), spec.fields.end(), sym);
        if (it == spec.fields.end()) throw ConstructionError("nonlinearity uses unknown field '" + sym + "'");
        int j = static_cast<int>(it - spec.fields.begin());
        return d == 0 ? u.at(j) : algebra::diff(u.at(j), xi, d) * small.pow(d);
      };
      out.set(static_cast<int>(i), spec.nonlinearity[i].evaluate<Expr>(
                                       Expr(), Expr(1), leaf, [](const Expr& e, const Scalar& c) { return e * c; }));
    }
    return out;
  }
  auto leaf = [&](const std::string&, int d) { return Pointwise{deriv(u, d)}; };
  return spec.nonlinearity.at(0)
      .evaluate<Pointwise>(Pointwise{CrossField(spec.space)}, Pointwise{CrossField::basis(spec.space, 0)}, leaf,
                           [](const Pointwise& p, const Scalar& c) { return Pointwise{p.f * Expr(c)}; })
      .f;
}

CrossField residual(const ProblemSpec& spec, const CrossField& u, const std::vector<Expr>& g,
                    const CrossField& coupling, int bound) {
  const auto& reg = spec.reg;
  SymbolId xi = id_of(spec, "xi");
  const Expr small = spec.small();
  auto amps = amplitude_ids(spec);

  DependencyTable deps;
  for (std::size_t j = 0; j < amps.size(); ++j)
    for (int k = 0; k <= bound; ++k) deps.rate[reg->jet(amps[j], k)] = algebra::diff(g[j], xi, k);

  CrossField r = -u.map([&](const Expr& e) { return algebra::ddt(e, deps); });
  for (int l = 0; l < spec.stack_size(); ++l)
    if (!spec.L(l).is_zero()) r += spec.L(l).apply(dxi(u, xi, l)) * small.pow(l);
  r += nonlinear_term(spec, u, xi, small);
  if (spec.perturbation) {
    const auto& p = *spec.perturbation;
    r += u * (small.pow(p.weight) * Expr::var(reg, p.param));
  }
  r += coupling;
  return r.map([](const Expr& e) { return e.truncated(); });
}

int default_bound(const ProblemSpec& spec, int order) { return order + spec.error_offset; }

}  // namespace

CouplingTerm assemble_coupling(const ProblemSpec& spec, int order) {
  const auto& reg = spec.reg;
  algebra::TruncationScope exact(*reg, std::nullopt);
  CouplingTerm ct{CrossField(spec.space), 0};
  const Expr small = spec.small();
  const Expr xi = spec.xi();
  for (int l = 1; l < spec.stack_size(); ++l) {
    if (spec.L(l).is_zero()) continue;
    for (int n = std::max(order - l + 1, 0); n <= order; ++n) {
      Expr w = xi.pow(n) * small.pow(order + 1 - n) * (binomial(n + l, order) / factorial(n));
      ct.field += spec.L(l).apply(problems::coupling_field(spec, order, n + l - order)) * w;
      ++ct.terms;
    }
  }
  return ct;
}

SlowManifold reduce_nonlinear(const ProblemSpec& spec, int order, const NonlinearOptions& opt) {
  problems::validate_spec(spec, order);
  if (spec.amplitudes.size() != spec.spectral.m())
    throw ConstructionError("need one amplitude name per slow mode");
  const auto& reg = spec.reg;
  SlowManifold sm;
  sm.problem = spec.name;
  sm.form = "generating";
  sm.order = order;
  sm.bound = opt.bound.value_or(default_bound(spec, order));
  if (sm.bound <= 1) throw ConstructionError("truncation bound must exceed 1");

  auto amps = amplitude_ids(spec);
  CrossField coupling(spec.space);
  if (opt.coupling) coupling = assemble_coupling(spec, order).field;

  algebra::TruncationScope scope(*reg, sm.bound);
  const Expr small = spec.small();
  const SymbolId small_id = id_of(spec, "small");
  sm.field = CrossField(spec.space);
  for (std::size_t j = 0; j < amps.size(); ++j)
    sm.field += spec.spectral.V0[j] * (small * Expr::var(reg, amps[j]));
  sm.field = sm.field.map([](const Expr& e) { return e.truncated(); });
  sm.evolution.assign(amps.size(), Expr(reg, 0));
  coupling = coupling.map([](const Expr& e) { return e.truncated(); });

  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    CrossField res = residual(spec, sm.field, sm.evolution, coupling, sm.bound);
    std::size_t terms = 0;
    for (const auto& [k, e] : res.entries()) terms += e.size();
    sm.log.push_back("iteration " + std::to_string(iter) + ": residual terms " + std::to_string(terms));
    if (res.is_zero()) {
      sm.iterations = iter;
      return sm;
    }
    auto slow = crosssec::slow_part(spec.spectral, res);
    for (std::size_t j = 0; j < amps.size(); ++j) sm.evolution[j] += divide_small(slow[j], small_id);
    sm.field += crosssec::stable_update(spec.L(0), spec.spectral, crosssec::remove_slow(spec.spectral, res));
    sm.field = sm.field.map([](const Expr& e) { return e.truncated(); });
  }
  throw ConstructionError("slow manifold iteration did not converge in " + std::to_string(kMaxIterations) +
                          " passes");
}

CrossField generating_residual(const ProblemSpec& spec, const SlowManifold& sm, bool coupling) {
  CrossField c(spec.space);
  if (coupling) c = assemble_coupling(spec, sm.order).field;
  algebra::TruncationScope scope(*spec.reg, sm.bound);
  c = c.map([](const Expr& e) { return e.truncated(); });
  return residual(spec, sm.field, sm.evolution, c, sm.bound);
}

}  // namespace slowvary::nlreduce
