#include "slowvary/crosssec/spectral.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <set>

#include <Eigen/Eigenvalues>

#include "slowvary/error.hpp"

namespace slowvary::crosssec {

namespace {

constexpr double kTol = 1e-10;

Scalar constant_of(const Expr& e, const char* what) {
  if (!e.is_constant()) throw ValidationError(std::string(what) + " must have constant entries, got " + e.str());
  return e.constant_term();
}

Eigen::MatrixXcd numeric(const ExprMatrix& m, const char* what) {
  Eigen::MatrixXcd out(m.size(), m.size());
  for (std::size_t i = 0; i < m.size(); ++i)
    for (std::size_t j = 0; j < m.size(); ++j) out(i, j) = constant_of(m[i][j], what).to_complex();
  return out;
}

std::vector<std::complex<double>> eigenvalues(const ExprMatrix& m, const char* what) {
  if (m.empty()) return {};
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(numeric(m, what), false);
  std::vector<std::complex<double>> out;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) out.push_back(es.eigenvalues()(i));
  return out;
}

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// Exact elimination for a consistent (possibly over-determined) system with
/// Gaussian-rational matrix and expression right-hand side.
std::vector<Expr> exact_solve(std::vector<std::vector<Scalar>> a, std::vector<Expr> b, std::size_t n) {
  const std::size_t rows = a.size();
  std::vector<int> pivot_col;
  std::size_t r = 0;
  for (std::size_t c = 0; c < n && r < rows; ++c) {
    std::size_t p = r;
    while (p < rows && a[p][c].is_zero()) ++p;
    if (p == rows) continue;
    std::swap(a[p], a[r]);
    std::swap(b[p], b[r]);
    Scalar inv = Scalar(1) / a[r][c];
    for (auto& x : a[r]) x *= inv;
    b[r] = b[r] * inv;
    for (std::size_t q = 0; q < rows; ++q) {
      if (q == r || a[q][c].is_zero()) continue;
      Scalar f = a[q][c];
      for (std::size_t k = c; k < n; ++k) a[q][k] -= f * a[r][k];
      b[q] -= b[r] * f;
    }
    pivot_col.push_back(static_cast<int>(c));
    ++r;
  }
  for (std::size_t q = r; q < rows; ++q)
    if (!b[q].is_zero())
      throw ConstructionError("linear solve is inconsistent (solvability fails or the cross-space cap is too small): " +
                              b[q].str());
  std::vector<Expr> x(n);
  for (std::size_t q = 0; q < r; ++q) x[pivot_col[q]] = b[q];
  return x;
}

CrossField solve_by_elimination(const Operator& L0, const SpectralData& sd, const CrossField& rhs,
                                const Scalar& shift) {
  for (const auto& [i, e] : rhs.entries())
    if (algebra::has_fast_time(e))
      throw ConstructionError("time-dependent right-hand side needs a diagonal eigenbasis on " +
                              rhs.space().str());
  const CrossSpace& sp = rhs.space();
  std::vector<int> unknowns;
  std::vector<CrossField> columns;
  const int lo = sp.kind == SpaceKind::PeriodicFourier ? -sp.cap : 0;
  const int hi = sp.kind == SpaceKind::FiniteDim ? sp.cap - 1 : sp.cap;
  for (int j = lo; j <= hi; ++j) {
    CrossField e = CrossField::basis(sp, j);
    try {
      columns.push_back(L0.apply(e) - e * Expr(shift));
      unknowns.push_back(j);
    } catch (const ConstructionError&) {
      // image leaves the truncated space; this unknown cannot be used
    }
  }
  const std::size_t n = unknowns.size();
  std::vector<std::vector<Scalar>> a;
  std::vector<Expr> b;
  for (int i = lo; i <= hi; ++i) {
    std::vector<Scalar> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = constant_of(columns[j].at(i), "L0");
    a.push_back(std::move(row));
    b.push_back(rhs.at(i));
  }
  for (const auto& z : sd.Z0) {
    std::vector<Scalar> row(n);
    for (std::size_t j = 0; j < n; ++j) row[j] = constant_of(inner(z, CrossField::basis(sp, unknowns[j])), "Z0");
    a.push_back(std::move(row));
    b.emplace_back();
  }
  if (sp.kind == SpaceKind::NeumannChannel) {
    std::vector<Scalar> plus(n), minus(n);
    for (std::size_t j = 0; j < n; ++j) {
      int k = unknowns[j];
      plus[j] = Scalar(k);
      minus[j] = Scalar(k % 2 == 1 ? k : -k);
    }
    a.push_back(std::move(plus));
    b.emplace_back();
    a.push_back(std::move(minus));
    b.emplace_back();
  }
  auto x = exact_solve(std::move(a), std::move(b), n);
  CrossField v(sp);
  for (std::size_t j = 0; j < n; ++j) v.set(unknowns[j], x[j]);
  return v;
}

}  // namespace

SpectralReport spectral_check(const Operator& L0, const SpectralData& sd, int order) {
  SpectralReport rep;
  const std::size_t m = sd.m();
  if (m == 0) throw ValidationError("no slow modes given");
  if (sd.Z0.size() != m || sd.A0.size() != m)
    throw ValidationError("V0, Z0 and A0 sizes disagree");
  for (const auto& row : sd.A0)
    if (row.size() != m) throw ValidationError("A0 is not square");

  for (std::size_t j = 0; j < m; ++j) {
    CrossField res = L0.apply(sd.V0[j]);
    for (std::size_t i = 0; i < m; ++i) res -= sd.V0[i] * sd.A0[i][j];
    if (!res.is_zero())
      throw ValidationError("L0 V0 != V0 A0 in column " + std::to_string(j) + ": residual " + res.str());
  }
  rep.lines.push_back("L0 V0 = V0 A0 holds exactly");

  ExprMatrix g = inner(sd.Z0, sd.V0);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (g[i][j] != Expr(i == j ? 1 : 0))
        throw ValidationError("<Z0, V0> is not the identity: " + matrix_str(g));
  rep.lines.push_back("<Z0, V0> = I holds exactly");

  double amax = 0;
  for (auto ev : eigenvalues(sd.A0, "A0")) amax = std::max(amax, std::abs(ev.real()));
  const double alpha = sd.alpha.get_d(), beta = sd.beta.get_d();
  if (amax > alpha + kTol)
    throw ValidationError("A0 has an eigenvalue with |Re| = " + fmt(amax) + " above alpha = " + fmt(alpha));
  if (!(sd.beta > order * sd.alpha))
    throw ValidationError("spectral gap fails: beta = " + fmt(beta) + " <= N alpha = " + fmt(order * alpha));
  rep.lines.push_back("gap beta = " + fmt(beta) + " > N alpha = " + fmt(order * alpha) + " (N = " +
                      std::to_string(order) + ")");

  const CrossSpace& sp = L0.space();
  auto require_stable = [&](double re, const std::string& where) {
    if (re > -beta + kTol)
      throw ValidationError("stable eigenvalue " + fmt(re) + " at " + where + " lies above -beta = " + fmt(-beta));
    rep.stable.push_back(re);
  };
  switch (sp.kind) {
    case SpaceKind::FiniteDim: {
      auto evs = eigenvalues(L0.mat(), "L0");
      std::size_t slow = 0;
      for (auto ev : evs) {
        if (std::abs(ev.real()) <= alpha + kTol) {
          ++slow;
          continue;
        }
        require_stable(ev.real(), "eigenvalue of L0");
      }
      if (slow != m)
        throw ValidationError("L0 has " + std::to_string(slow) + " slow eigenvalues but " + std::to_string(m) +
                              " slow modes were given");
      break;
    }
    case SpaceKind::PeriodicFourier: {
      std::set<int> slow;
      for (const auto& v : sd.V0)
        for (const auto& [k, c] : v.entries()) slow.insert(k);
      for (int k = -sp.cap; k <= sp.cap; ++k) {
        if (slow.count(k)) continue;
        Scalar s = constant_of(L0.symbol(k), "L0 symbol");
        require_stable(s.re().get_d(), "harmonic " + std::to_string(k));
      }
      break;
    }
    case SpaceKind::NeumannChannel: {
      const auto& t = L0.terms();
      bool pure = t.size() == 1 && t.count(2) && t.at(2).entries().size() == 1 && t.at(2).entries().count(0);
      if (pure) {
        double c = constant_of(t.at(2).at(0), "L0").re().get_d();
        for (int j = 1; j <= 8; ++j) {
          double lam = -c * std::pow(j * std::numbers::pi / 2, 2);
          require_stable(lam, "cos/sin mode " + std::to_string(j));
        }
      } else {
        rep.lines.push_back("stable spectrum of this Neumann operator is not checked");
      }
      break;
    }
  }
  if (!rep.stable.empty()) {
    double top = *std::max_element(rep.stable.begin(), rep.stable.end());
    rep.lines.push_back("least stable eigenvalue " + fmt(top) + " <= -beta");
  }
  return rep;
}

std::optional<DiagonalModes> diagonal_modes(const Operator& L0, const SpectralData& sd) {
  const CrossSpace& sp = L0.space();
  DiagonalModes dm;
  if (sp.kind == SpaceKind::NeumannChannel) return std::nullopt;
  if (sp.kind == SpaceKind::FiniteDim) {
    const auto& mat = L0.mat();
    for (int i = 0; i < sp.cap; ++i)
      for (int j = 0; j < sp.cap; ++j) {
        if (i != j && !mat[i][j].is_zero()) return std::nullopt;
        if (i == j) {
          if (!mat[i][i].is_constant()) return std::nullopt;
          dm.lambda[i] = mat[i][i].constant_term();
        }
      }
  } else {
    try {
      for (int k = -sp.cap; k <= sp.cap; ++k) {
        Expr s = L0.symbol(k);
        if (!s.is_constant()) return std::nullopt;
        dm.lambda[k] = s.constant_term();
      }
    } catch (const AlgebraError&) {
      return std::nullopt;
    }
  }
  for (std::size_t j = 0; j < sd.m(); ++j) {
    if (sd.V0[j].entries().size() != 1 || sd.Z0[j].entries().size() != 1) return std::nullopt;
    int k = sd.V0[j].entries().begin()->first;
    if (sd.Z0[j].entries().begin()->first != k) return std::nullopt;
    dm.slow.push_back(k);
  }
  return dm;
}

CrossField linv_solve(const Operator& L0, const SpectralData& sd, const CrossField& rhs, const Scalar& shift) {
  const CrossSpace& sp = rhs.space();
  CrossField v(sp);
  if (auto dm = diagonal_modes(L0, sd)) {
    std::set<int> slow(dm->slow.begin(), dm->slow.end());
    for (const auto& [i, r] : rhs.entries()) {
      if (slow.count(i))
        throw ConstructionError("right-hand side has slow content in component " + std::to_string(i) + ": " +
                                r.str());
      Scalar mu = dm->lambda.at(i) - shift;
      if (!mu.is_real() || sgn(mu.re()) >= 0)
        throw ConstructionError("component " + std::to_string(i) + " has non-decaying rate " + mu.str());
      v.set(i, -algebra::conv(r, mu.re()));
    }
  } else {
    v = solve_by_elimination(L0, sd, rhs, shift);
  }

  // In-line check of the solve.
  CrossField res = L0.apply(v) - v * Expr(shift) - v.map([](const Expr& e) { return algebra::fast_ddt(e); }) - rhs;
  if (!res.is_zero()) throw ConstructionError("linear solve check failed, residual " + res.str());
  for (const auto& z : sd.Z0)
    if (!inner(z, v).is_zero()) throw ConstructionError("linear solve leaves slow content " + inner(z, v).str());
  if (!satisfies_neumann(v)) throw ConstructionError("linear solve violates the Neumann condition");
  return v;
}

std::vector<CrossField> linv_solve(const Operator& L0, const SpectralData& sd, const std::vector<CrossField>& rhs) {
  const std::size_t m = sd.m();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j && !sd.A0[i][j].is_zero())
        throw ConstructionError("non-diagonal A0 is not supported by the row solver");
  std::vector<CrossField> out;
  for (std::size_t j = 0; j < rhs.size(); ++j)
    out.push_back(linv_solve(L0, sd, rhs[j], constant_of(sd.A0[j][j], "A0")));
  return out;
}

CrossField stable_update(const Operator& L0, const SpectralData& sd, const CrossField& res) {
  return -linv_solve(L0, sd, res);
}

std::vector<Expr> slow_part(const SpectralData& sd, const CrossField& v) {
  std::vector<Expr> out;
  for (const auto& z : sd.Z0) out.push_back(inner(z, v));
  return out;
}

CrossField remove_slow(const SpectralData& sd, const CrossField& v) {
  CrossField out = v;
  auto s = slow_part(sd, v);
  for (std::size_t j = 0; j < sd.m(); ++j) out -= sd.V0[j] * s[j];
  return out;
}

}  // namespace slowvary::crosssec
