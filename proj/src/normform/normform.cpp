#include "slowvary/normform/normform.hpp"

#include <cctype>
#include <set>

#include "slowvary/error.hpp"
#include "slowvary/linreduce/linreduce.hpp"

namespace slowvary::normform {

using algebra::DependencyTable;
using algebra::Monomial;
using algebra::Scalar;
using algebra::SymbolKind;

namespace {

constexpr int kMaxIterations = 99;

std::string upper(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

struct Context {
  LocalOdes odes;
  std::map<SymbolId, Expr> sub;
  std::set<SymbolId> stable_vars;
};

void refresh(Context& ctx, const NormalForm& nf) {
  ctx.sub.clear();
  for (std::size_t i = 0; i < nf.map.size(); ++i)
    for (int n = 0; n <= nf.order; ++n) ctx.sub[ctx.odes.coef[i][n]] = nf.map[i][n];
}

Expr residual(const Context& ctx, const NormalForm& nf, std::size_t i, int n) {
  DependencyTable deps;
  for (std::size_t k = 0; k < nf.var.size(); ++k)
    for (int m = 0; m <= nf.order; ++m) deps.rate[nf.var[k][m]] = nf.rate[k][m];
  return algebra::subs(ctx.odes.rhs[i][n], ctx.sub) - algebra::ddt(nf.map[i][n], deps);
}

// Terms carrying any stable variable.
Expr stable_part(const Context& ctx, const Expr& e) {
  return algebra::select(e, [&](const Monomial& m) {
    for (const auto& f : m.factors())
      if (ctx.stable_vars.count(f.id)) return true;
    return false;
  });
}

Context make_context(const NormalForm& nf, const ProblemSpec& spec) {
  Context ctx{local_odes(spec, nf.order, false), {}, {}};
  for (std::size_t i = 0; i < nf.slow.size(); ++i)
    if (!nf.slow[i])
      for (auto id : nf.var[i]) ctx.stable_vars.insert(id);
  refresh(ctx, nf);
  return ctx;
}

}  // namespace

NormalForm separate(const ProblemSpec& spec, int order) {
  problems::validate_spec(spec, order);
  if (!spec.is_linear()) throw ConstructionError("the time-dependent normal form applies to linear problems");
  auto dm = crosssec::diagonal_modes(spec.L(0), spec.spectral);
  if (!dm || spec.space.kind != crosssec::SpaceKind::FiniteDim)
    throw ConstructionError("the normal form needs a finite-dimensional cross-section with diagonal L0");
  const auto& reg = spec.reg;
  algebra::TruncationScope exact(*reg, std::nullopt);
  const int m = spec.space.cap;

  NormalForm nf;
  nf.problem = spec.name;
  nf.order = order;
  nf.slow.assign(m, false);
  for (int k : dm->slow) nf.slow[k] = true;
  std::vector<Scalar> lambda(m);
  for (int i = 0; i < m; ++i) {
    lambda[i] = dm->lambda.at(i);
    if (!nf.slow[i] && (!lambda[i].is_real() || sgn(lambda[i].re()) >= 0))
      throw ConstructionError("stable component " + spec.fields[i] + " has non-decaying rate " + lambda[i].str());
    std::vector<SymbolId> ids;
    std::vector<Expr> maps, rates;
    for (int n = 0; n <= order; ++n) {
      SymbolId id = reg->symbol(upper(spec.fields[i]) + std::to_string(n));
      reg->set_time_varying(id);
      ids.push_back(id);
      maps.push_back(Expr::var(reg, id));
      rates.push_back(Expr::var(reg, id) * lambda[i]);
    }
    nf.var.push_back(ids);
    nf.map.push_back(maps);
    nf.rate.push_back(rates);
  }

  Context ctx = make_context(nf, spec);
  for (int iter = 1; iter <= kMaxIterations; ++iter) {
    bool ok = true;
    std::size_t terms = 0;
    for (int n = 0; n <= order; ++n) {
      for (int i = 0; i < m; ++i) {
        if (nf.slow[i]) continue;
        Expr res = residual(ctx, nf, i, n);
        Expr g = stable_part(ctx, res);
        nf.rate[i][n] += g;
        nf.map[i][n] += algebra::conv(res - g, lambda[i].re());
        refresh(ctx, nf);
        ok = ok && res.is_zero();
        terms += res.size();
      }
      for (int i = 0; i < m; ++i) {
        if (!nf.slow[i]) continue;
        Expr res = residual(ctx, nf, i, n);
        Expr f = stable_part(ctx, res);
        nf.map[i][n] -= f;
        nf.rate[i][n] += res - f;
        refresh(ctx, nf);
        ok = ok && res.is_zero();
        terms += res.size();
      }
    }
    nf.log.push_back("iteration " + std::to_string(iter) + ": residual terms " + std::to_string(terms));
    if (ok) {
      nf.iterations = iter;
      return nf;
    }
  }
  throw ConstructionError("normal form did not converge in " + std::to_string(kMaxIterations) + " iterations");
}

std::vector<std::vector<Expr>> transform_residuals(const NormalForm& nf, const ProblemSpec& spec) {
  algebra::TruncationScope exact(*spec.reg, std::nullopt);
  Context ctx = make_context(nf, spec);
  std::vector<std::vector<Expr>> out(nf.map.size());
  for (std::size_t i = 0; i < nf.map.size(); ++i)
    for (int n = 0; n <= nf.order; ++n) out[i].push_back(residual(ctx, nf, i, n));
  return out;
}

bool check_exact(const NormalForm& nf, const ProblemSpec& spec) {
  for (const auto& row : transform_residuals(nf, spec))
    for (const auto& r : row)
      if (!r.is_zero()) return false;
  return true;
}

ModelReport slow_pde_with_error(const NormalForm& nf, const ProblemSpec& spec) {
  const auto& reg = spec.reg;
  ModelReport rep;
  rep.problem = spec.name;
  rep.order = nf.order;
  rep.construction = "normal-form";
  rep.grading = "exact (no truncation); coupling enters through history convolutions";
  for (std::size_t i = 0; i < nf.map.size(); ++i)
    for (int n = 0; n <= nf.order; ++n)
      rep.manifold.emplace_back(spec.fields[i] + std::to_string(n), nf.map[i][n].str());
  for (std::size_t i = 0; i < nf.map.size(); ++i)
    for (int n = 0; n <= nf.order; ++n)
      rep.evolution.emplace_back(reg->info(nf.var[i][n]).name + "_t", nf.rate[i][n].str());

  auto red = linreduce::reduce_linear(spec, nf.order);
  auto ord = linreduce::component_orders(red, spec);
  for (std::size_t n = 0; n < red.A.size(); ++n)
    rep.coefficients.emplace_back("A" + std::to_string(n), red.A[n].size() == 1 ? red.A[n][0][0].str()
                                                                              : crosssec::matrix_str(red.A[n]));

  // coupling symbol -> (component, derivative)
  std::map<SymbolId, std::pair<int, int>> coupling;
  for (std::size_t i = 0; i < nf.map.size(); ++i)
    for (int k = 1; k <= spec.stack_size() - 1; ++k)
      if (auto id = reg->find(problems::coupling_name(spec, nf.order, static_cast<int>(i), k)))
        coupling[*id] = {static_cast<int>(i), k};

  std::string model;
  std::size_t a = 0;
  for (std::size_t i = 0; i < nf.map.size(); ++i) {
    if (!nf.slow[i]) continue;
    const std::string& amp = spec.amplitudes.at(a++);
    const Expr& rate = nf.rate[i][0];
    std::vector<std::pair<Expr, std::string>> terms;
    Expr error = rate;
    for (int n = 0; n <= nf.order; ++n) {
      Expr c = algebra::coeff(rate, nf.var[i][n], 1);
      if (c.is_constant() && !c.is_zero()) {
        terms.emplace_back(c, linreduce::derivative_name(amp, n));
        error -= c * Expr::var(reg, nf.var[i][n]);
      }
    }
    if (!model.empty()) model += "\n";
    std::string lhs = linreduce::format_sum(terms);
    model += amp + "_t = " + (terms.empty() ? std::string("coupling only") : lhs);
    if (!error.is_zero()) model += " + [" + error.str() + "]";
    rep.coupling_error.emplace_back(amp + "_t", error.str());

    for (const auto& [mono, c] : error.terms()) {
      const auto& fs = mono.factors();
      if (fs.size() != 1 || fs[0].exp != 1 || reg->info(fs[0].id).kind != SymbolKind::Atom) continue;
      const auto& core = reg->info(fs[0].id).core;
      if (core.factors().size() != 1) continue;
      auto it = coupling.find(core.factors()[0].id);
      if (it == coupling.end()) continue;
      int q = nf.order + it->second.second + ord[it->second.first];
      Expr term = Expr::monomial(reg, core, c);
      rep.estimates.push_back(term.str() + " = O(d^" + std::to_string(q) + " " + amp + "/dx^" + std::to_string(q) +
                              ")");
    }
  }
  rep.model = model;
  rep.log = nf.log;
  rep.log.push_back("separated in " + std::to_string(nf.iterations) + " iterations");
  return rep;
}

}  // namespace slowvary::normform
