#include "slowvary/normform/local_odes.hpp"

#include "slowvary/error.hpp"

namespace slowvary::normform {

using algebra::Scalar;
using crosssec::SpaceKind;

namespace {

Scalar factorial(int n) {
  mpz_class f;
  mpz_fac_ui(f.get_mpz_t(), n);
  return Scalar(mpq_class(f));
}

}  // namespace

LocalOdes local_odes(const ProblemSpec& spec, int order, bool with_nonlinearity) {
  if (spec.space.kind != SpaceKind::FiniteDim)
    throw ConstructionError("local Taylor ODEs are implemented for finite-dimensional cross-sections");
  const auto& reg = spec.reg;
  algebra::TruncationScope exact(*reg, std::nullopt);
  const int m = spec.space.cap;
  const int p = spec.stack_size() - 1;
  int depth = p;
  if (with_nonlinearity)
    for (const auto& f : spec.nonlinearity) depth = std::max(depth, f.max_deriv());

  LocalOdes lo;
  lo.order = order;
  const SymbolId s = reg->symbol("s_local");
  const Expr S = Expr::var(reg, s);
  std::vector<Expr> U(m);
  for (int i = 0; i < m; ++i) {
    std::vector<SymbolId> ids;
    for (int n = 0; n <= order; ++n) {
      SymbolId id = reg->symbol(spec.fields[i] + std::to_string(n));
      reg->set_time_varying(id);
      ids.push_back(id);
    }
    std::vector<SymbolId> ws;
    for (int k = 1; k <= depth; ++k) ws.push_back(reg->coupling(problems::coupling_name(spec, order, i, k)));
    // Taylor polynomial with the last coefficient expanded about X as well.
    Expr u;
    for (int n = 0; n < order; ++n) u += Expr::var(reg, ids[n]) * S.pow(n) / factorial(n);
    Expr last = Expr::var(reg, ids[order]);
    for (int k = 1; k <= depth; ++k) last += Expr::var(reg, ws[k - 1]) * S.pow(k) / factorial(k);
    u += last * S.pow(order) / factorial(order);
    U[i] = u;
    lo.coef.push_back(ids);
    lo.coupling.push_back(ws);
  }

  auto ds = [&](const Expr& e, int k) { return algebra::diff(e, s, k); };
  std::vector<Expr> rhs(m);
  for (int l = 0; l <= p; ++l) {
    const auto& M = spec.L(l).mat();
    for (int i = 0; i < m; ++i)
      for (int j = 0; j < m; ++j)
        if (!M[i][j].is_zero()) rhs[i] += M[i][j] * ds(U[j], l);
  }
  if (with_nonlinearity && !spec.nonlinearity.empty()) {
    for (int i = 0; i < m; ++i) {
      auto leaf = [&](const std::string& sym, int deriv) {
        auto it = std::find(spec.fields.begin(), spec.fields.end(), sym);
        return ds(U[it - spec.fields.begin()], deriv);
      };
      rhs[i] += spec.nonlinearity[i].evaluate<Expr>(
          Expr(), Expr(1), leaf, [](const Expr& e, const Scalar& c) { return e * c; });
    }
  }
  lo.rhs.assign(m, std::vector<Expr>(order + 1));
  for (int i = 0; i < m; ++i)
    for (int n = 0; n <= order; ++n) lo.rhs[i][n] = algebra::coeff(rhs[i], s, n) * factorial(n);
  return lo;
}

}  // namespace slowvary::normform
