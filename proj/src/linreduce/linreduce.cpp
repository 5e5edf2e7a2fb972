#include "slowvary/linreduce/linreduce.hpp"

#include <algorithm>
#include <set>

#include "slowvary/error.hpp"

namespace slowvary::linreduce {

using crosssec::inner;
using crosssec::SpaceKind;

namespace {

Scalar binomial(int n, int k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return Scalar(mpq_class(r));
}

FieldRow zero_row(const ProblemSpec& spec) {
  return FieldRow(spec.spectral.m(), CrossField(spec.space));
}

std::string matrix_or_scalar(const ExprMatrix& m) {
  if (m.size() == 1) return m[0][0].str();
  return crosssec::matrix_str(m);
}

}  // namespace

std::string derivative_name(const std::string& amp, int n) {
  return n == 0 ? amp : amp + "_" + std::string(n, 'x');
}

std::string format_sum(const std::vector<std::pair<Expr, std::string>>& terms) {
  std::string out;
  for (const auto& [coef, name] : terms) {
    if (coef.is_zero()) continue;
    std::string s = coef.str();
    std::string piece;
    if (name.empty()) {
      piece = coef.size() > 1 ? "(" + s + ")" : s;
    } else if (s == "1") {
      piece = name;
    } else if (s == "-1") {
      piece = "-" + name;
    } else if (coef.size() > 1) {
      piece = "(" + s + ")*" + name;
    } else {
      piece = s + "*" + name;
    }
    if (out.empty()) {
      out = piece;
    } else if (piece[0] == '-') {
      out += " - " + piece.substr(1);
    } else {
      out += " + " + piece;
    }
  }
  return out.empty() ? "0" : out;
}

std::string Remainder::str(const std::string& field_name, int order) const {
  if (field) return field->str();
  if (pieces.empty()) return "0";
  std::vector<std::pair<Expr, std::string>> t;
  for (const auto& p : pieces)
    t.emplace_back(Expr(p.coef), "L" + std::to_string(p.ell) + "[" + field_name + std::to_string(order) +
                                     std::string(p.k, 'x') + "]");
  return format_sum(t);
}

LinearReduction reduce_linear(const ProblemSpec& spec, int order) {
  problems::validate_spec(spec, order);
  const auto& sd = spec.spectral;
  const std::size_t m = sd.m();
  const int p = spec.stack_size() - 1;
  const auto& L0 = spec.L(0);

  LinearReduction red;
  red.problem = spec.name;
  red.order = order;
  red.A.push_back(sd.A0);
  red.V.push_back(sd.V0);

  for (int n = 1; n <= order; ++n) {
    // S_j = sum_{k>=1} L_k V_{n-k}
    FieldRow S = zero_row(spec);
    for (int k = 1; k <= std::min(n, p); ++k)
      for (std::size_t j = 0; j < m; ++j) S[j] += spec.L(k).apply(red.V[n - k][j]);

    ExprMatrix An(m, std::vector<Expr>(m));
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) An[i][j] = inner(sd.Z0[i], S[j]);
    red.A.push_back(An);

    FieldRow rhs = zero_row(spec);
    for (std::size_t j = 0; j < m; ++j) {
      rhs[j] -= S[j];
      for (int k = 1; k <= n; ++k)
        for (std::size_t i = 0; i < m; ++i) rhs[j] += red.V[n - k][i] * red.A[k][i][j];
      for (std::size_t i = 0; i < m; ++i)
        if (!inner(sd.Z0[i], rhs[j]).is_zero())
          throw ConstructionError("solvability fails at n = " + std::to_string(n) + ": " +
                                  inner(sd.Z0[i], rhs[j]).str());
    }
    red.V.push_back(crosssec::linv_solve(L0, sd, rhs));

    // Independent recheck of the recursion at this order.
    for (std::size_t j = 0; j < m; ++j) {
      CrossField res(spec.space);
      for (int k = 0; k <= std::min(n, p); ++k) res += spec.L(k).apply(red.V[n - k][j]);
      for (int k = 0; k <= n; ++k)
        for (std::size_t i = 0; i < m; ++i) res -= red.V[n - k][i] * red.A[k][i][j];
      if (!res.is_zero()) throw ConstructionError("recursion residual at n = " + std::to_string(n) + ": " + res.str());
    }
    red.log.push_back("n=" + std::to_string(n) + ": A" + std::to_string(n) + " = " + matrix_or_scalar(An));
  }
  red.remainders = remainder_terms(spec, order);
  return red;
}

Toeplitz assemble_toeplitz(const LinearReduction& red, const ProblemSpec& spec) {
  const int N = red.order;
  const std::size_t m = spec.spectral.m();
  const int p = spec.stack_size() - 1;
  Toeplitz t;
  t.cV.assign(N + 1, std::vector<FieldRow>(N + 1, zero_row(spec)));
  t.cA.assign((N + 1) * m, std::vector<Expr>((N + 1) * m));
  for (int i = 0; i <= N; ++i)
    for (int j = i; j <= N; ++j) {
      t.cV[i][j] = red.V[j - i];
      for (std::size_t a = 0; a < m; ++a)
        for (std::size_t b = 0; b < m; ++b) t.cA[i * m + a][j * m + b] = red.A[j - i][a][b];
    }
  // (cL cV)[i][j] = sum_k L_{k-i} V_{j-k};  (cV cA)[i][j] = sum_k V_{k-i} A_{j-k}
  for (int i = 0; i <= N; ++i)
    for (int j = i; j <= N; ++j)
      for (std::size_t b = 0; b < m; ++b) {
        CrossField lhs(spec.space), rhs(spec.space);
        for (int k = i; k <= j; ++k) {
          if (k - i <= p) lhs += spec.L(k - i).apply(t.cV[k][j][b]);
          for (std::size_t a = 0; a < m; ++a) rhs += t.cV[i][k][a] * t.cA[k * m + a][j * m + b];
        }
        if (!(lhs == rhs))
          throw ConstructionError("block Toeplitz identity fails in block (" + std::to_string(i) + ", " +
                                  std::to_string(j) + ")");
      }
  return t;
}

std::vector<Remainder> remainder_terms(const ProblemSpec& spec, int order) {
  const int p = spec.stack_size() - 1;
  std::vector<Remainder> out;
  for (int n = 0; n <= order; ++n) {
    Remainder r;
    r.n = n;
    for (int k = 1; k + order - n <= p; ++k) r.pieces.push_back({binomial(k + order, order), k + order - n, k});
    if (spec.space.kind != SpaceKind::NeumannChannel) {
      CrossField f(spec.space);
      for (const auto& pc : r.pieces)
        f += spec.L(pc.ell).apply(problems::coupling_field(spec, order, pc.k)) * Expr(pc.coef);
      r.field = f;
    }
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<int> component_orders(const LinearReduction& red, const ProblemSpec& spec) {
  if (spec.space.kind != SpaceKind::FiniteDim) return {0};
  std::vector<int> ord(spec.space.cap, red.order + 1);
  for (int n = static_cast<int>(red.V.size()) - 1; n >= 0; --n)
    for (const auto& v : red.V[n])
      for (const auto& [i, e] : v.entries()) ord[i] = n;
  return ord;
}

ModelReport emit_slow_pde(const LinearReduction& red, const ProblemSpec& spec) {
  ModelReport rep;
  rep.problem = spec.name;
  rep.order = red.order;
  rep.construction = "linear";
  rep.grading = "linear in the field; x-derivatives resolved to order " + std::to_string(red.order);
  const std::size_t m = spec.spectral.m();
  for (std::size_t n = 0; n < red.A.size(); ++n)
    rep.coefficients.emplace_back("A" + std::to_string(n), matrix_or_scalar(red.A[n]));
  for (std::size_t n = 1; n < red.V.size(); ++n)
    for (std::size_t j = 0; j < m; ++j)
      rep.manifold.emplace_back("V" + std::to_string(n) + (m > 1 ? "[" + std::to_string(j) + "]" : ""),
                                red.V[n][j].str());

  std::string model;
  for (std::size_t j = 0; j < m; ++j) {
    std::vector<std::pair<Expr, std::string>> t;
    for (std::size_t n = 0; n < red.A.size(); ++n)
      for (std::size_t i = 0; i < m; ++i)
        t.emplace_back(red.A[n][i][j], derivative_name(spec.amplitudes[i], static_cast<int>(n)));
    if (j) model += "\n";
    model += spec.amplitudes[j] + "_t = " + format_sum(t) + " + coupling";
    Expr rate(spec.reg, 0);
    for (const auto& [c, name] : t)
      if (!c.is_zero()) rate += c * Expr::var(spec.reg, name);
    rep.evolution.emplace_back(spec.amplitudes[j] + "_t", rate.str());
  }
  rep.model = model;

  const std::string field = spec.space.kind == SpaceKind::FiniteDim ? "u" : spec.fields.at(0);
  std::set<int> ks;
  for (const auto& r : red.remainders) {
    rep.coupling_error.emplace_back("r" + std::to_string(r.n), r.str(field, red.order));
    for (const auto& pc : r.pieces) ks.insert(pc.k);
  }
  auto ord = component_orders(red, spec);
  const std::string amp = spec.amplitudes[0];
  for (int k : ks) {
    if (spec.space.kind == SpaceKind::FiniteDim) {
      for (int i = 0; i < spec.space.cap; ++i) {
        int q = red.order + k + ord[i];
        rep.estimates.push_back(problems::coupling_name(spec, red.order, i, k) + " = O(d^" + std::to_string(q) +
                                " " + amp + "/dx^" + std::to_string(q) + ")");
      }
    } else {
      int q = red.order + k;
      rep.estimates.push_back(field + std::to_string(red.order) + std::string(k, 'x') + " = O(d^" +
                              std::to_string(q) + " " + field + "/dx^" + std::to_string(q) + ")");
    }
  }
  rep.log = red.log;
  return rep;
}

}  // namespace slowvary::linreduce
