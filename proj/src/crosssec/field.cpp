#include "slowvary/crosssec/field.hpp"

#include <algorithm>
#include <cstdlib>

#include "slowvary/error.hpp"

namespace slowvary::crosssec {

namespace {

Scalar ik_power(int k, int n) {
  Scalar f(1);
  Scalar ik = Scalar::i() * Scalar(k);
  for (int j = 0; j < n; ++j) f *= ik;
  return f;
}

}  // namespace

bool CrossSpace::admits(int index) const {
  switch (kind) {
    case SpaceKind::FiniteDim:
      return index >= 0 && index < cap;
    case SpaceKind::NeumannChannel:
      return index >= 0 && index <= cap;
    case SpaceKind::PeriodicFourier:
      return std::abs(index) <= cap;
  }
  return false;
}

void CrossSpace::check(int index) const {
  if (admits(index)) return;
  switch (kind) {
    case SpaceKind::FiniteDim:
      throw ConstructionError("component " + std::to_string(index) + " outside dimension " +
                              std::to_string(cap));
    case SpaceKind::NeumannChannel:
      throw ConstructionError("y-degree " + std::to_string(index) + " exceeds cap " + std::to_string(cap));
    case SpaceKind::PeriodicFourier:
      throw ConstructionError("harmonic " + std::to_string(index) + " exceeds cap " + std::to_string(cap));
  }
}

std::string CrossSpace::str() const {
  switch (kind) {
    case SpaceKind::FiniteDim:
      return "FiniteDim(" + std::to_string(cap) + ")";
    case SpaceKind::NeumannChannel:
      return "NeumannChannel(max degree " + std::to_string(cap) + ")";
    case SpaceKind::PeriodicFourier:
      return "PeriodicFourier(max harmonic " + std::to_string(cap) + ")";
  }
  return "";
}

CrossField CrossField::basis(CrossSpace space, int index, Expr coef) {
  CrossField f(space);
  f.set(index, std::move(coef));
  return f;
}

Expr CrossField::at(int index) const {
  auto it = c_.find(index);
  return it == c_.end() ? Expr() : it->second;
}

void CrossField::set(int index, Expr value) {
  if (value.is_zero()) {
    c_.erase(index);
    return;
  }
  space_.check(index);
  c_[index] = std::move(value);
}

void CrossField::add(int index, const Expr& value) {
  if (value.is_zero()) return;
  auto it = c_.find(index);
  if (it == c_.end()) {
    set(index, value);
    return;
  }
  it->second += value;
  if (it->second.is_zero()) c_.erase(it);
}

void CrossField::check_space(const CrossField& o) const {
  if (!(space_ == o.space_)) throw AlgebraError("cross-space mismatch: " + space_.str() + " vs " + o.space_.str());
}

CrossField& CrossField::operator+=(const CrossField& o) {
  check_space(o);
  for (const auto& [k, v] : o.c_) add(k, v);
  return *this;
}

CrossField& CrossField::operator-=(const CrossField& o) {
  check_space(o);
  for (const auto& [k, v] : o.c_) add(k, -v);
  return *this;
}

CrossField CrossField::operator-() const {
  CrossField r(space_);
  for (const auto& [k, v] : c_) r.c_.emplace(k, -v);
  return r;
}

CrossField operator*(const CrossField& a, const Expr& s) {
  CrossField r(a.space_);
  for (const auto& [k, v] : a.c_) r.set(k, v * s);
  return r;
}

CrossField product(const CrossField& a, const CrossField& b) {
  a.check_space(b);
  if (a.space_.kind == SpaceKind::FiniteDim)
    throw AlgebraError("pointwise product is undefined on a finite-dimensional cross-section");
  CrossField r(a.space_);
  for (const auto& [i, u] : a.c_)
    for (const auto& [j, v] : b.c_) r.add(i + j, u * v);
  return r;
}

CrossField CrossField::dy(int n) const {
  if (space_.kind == SpaceKind::FiniteDim) {
    if (n == 0) return *this;
    throw AlgebraError("d/dy is undefined on a finite-dimensional cross-section");
  }
  CrossField r(space_);
  for (const auto& [k, v] : c_) {
    if (space_.kind == SpaceKind::PeriodicFourier) {
      r.set(k, v * ik_power(k, n));
    } else if (k >= n) {
      long f = 1;
      for (int j = 0; j < n; ++j) f *= (k - j);
      r.set(k - n, v * Scalar(f));
    }
  }
  return r;
}

std::string CrossField::str() const {
  if (space_.kind == SpaceKind::FiniteDim) {
    std::string out = "(";
    for (int i = 0; i < space_.cap; ++i) {
      if (i) out += ", ";
      out += at(i).str();
    }
    return out + ")";
  }
  if (c_.empty()) return "0";
  std::string out;
  for (const auto& [k, v] : c_) {
    if (!out.empty()) out += " + ";
    std::string basis;
    if (space_.kind == SpaceKind::NeumannChannel) {
      basis = k == 0 ? "" : (k == 1 ? "y" : "y^" + std::to_string(k));
    } else {
      basis = k == 0 ? "" : "e^(" + std::to_string(k) + "*i*y)";
    }
    if (basis.empty()) {
      out += "(" + v.str() + ")";
    } else {
      out += "(" + v.str() + ")*" + basis;
    }
  }
  return out;
}

Operator Operator::zero(CrossSpace space) {
  Operator op;
  op.space_ = space;
  if (space.kind == SpaceKind::FiniteDim)
    op.mat_.assign(space.cap, std::vector<Expr>(space.cap));
  return op;
}

Operator Operator::matrix(CrossSpace space, std::vector<std::vector<Expr>> m) {
  if (space.kind != SpaceKind::FiniteDim) throw AlgebraError("matrix operator on a function space");
  if (static_cast<int>(m.size()) != space.cap) throw AlgebraError("operator matrix has the wrong size");
  for (const auto& row : m)
    if (static_cast<int>(row.size()) != space.cap) throw AlgebraError("operator matrix has the wrong size");
  Operator op;
  op.space_ = space;
  op.mat_ = std::move(m);
  return op;
}

Operator Operator::differential(CrossSpace space, std::map<int, CrossField> terms) {
  if (space.kind == SpaceKind::FiniteDim) throw AlgebraError("differential operator on a finite-dimensional space");
  Operator op;
  op.space_ = space;
  for (auto& [j, a] : terms) {
    if (j < 0) throw AlgebraError("negative derivative order in operator");
    if (!(a.space() == space)) throw AlgebraError("operator coefficient lives in another space");
    if (!a.is_zero()) op.terms_.emplace(j, std::move(a));
  }
  return op;
}

bool Operator::is_zero() const {
  if (space_.kind == SpaceKind::FiniteDim) {
    for (const auto& row : mat_)
      for (const auto& e : row)
        if (!e.is_zero()) return false;
    return true;
  }
  return terms_.empty();
}

CrossField Operator::apply(const CrossField& v) const {
  if (!(v.space() == space_)) throw AlgebraError("operator and field live in different spaces");
  CrossField r(space_);
  if (space_.kind == SpaceKind::FiniteDim) {
    if (mat_.empty()) return r;
    for (int i = 0; i < space_.cap; ++i) {
      Expr s;
      for (const auto& [j, vj] : v.entries())
        if (!mat_[i][j].is_zero()) s += mat_[i][j] * vj;
      r.set(i, std::move(s));
    }
    return r;
  }
  for (const auto& [j, a] : terms_) r += product(a, v.dy(j));
  return r;
}

Expr Operator::symbol(int k) const {
  if (space_.kind != SpaceKind::PeriodicFourier) throw AlgebraError("symbol is defined for Fourier operators only");
  Expr s;
  for (const auto& [j, a] : terms_) {
    for (const auto& [h, c] : a.entries())
      if (h != 0) throw AlgebraError("Fourier operator with non-constant coefficients has no symbol");
    s += a.at(0) * ik_power(k, j);
  }
  return s;
}

int Operator::order() const {
  int o = 0;
  for (const auto& [j, a] : terms_) o = std::max(o, j);
  return o;
}

std::string Operator::str() const {
  if (space_.kind == SpaceKind::FiniteDim) return matrix_str(mat_);
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& [j, a] : terms_) {
    if (!out.empty()) out += " + ";
    out += "[" + a.str() + "]";
    if (j == 1) out += "*d/dy";
    if (j > 1) out += "*d^" + std::to_string(j) + "/dy^" + std::to_string(j);
  }
  return out;
}

Expr inner(const CrossField& z, const CrossField& v) {
  if (!(z.space() == v.space())) throw AlgebraError("inner product of fields from different spaces");
  Expr s;
  switch (z.space().kind) {
    case SpaceKind::FiniteDim:
      for (const auto& [i, zi] : z.entries()) s += zi * v.at(i);
      break;
    case SpaceKind::NeumannChannel:
      // (1/2) int_{-1}^{1} y^n dy = 1/(n+1) for even n, zero for odd n.
      for (const auto& [a, za] : z.entries())
        for (const auto& [b, vb] : v.entries())
          if ((a + b) % 2 == 0) s += za * vb * Scalar(1, a + b + 1);
      break;
    case SpaceKind::PeriodicFourier:
      for (const auto& [k, zk] : z.entries()) s += zk.conj_coeffs() * v.at(k);
      break;
  }
  return s;
}

ExprMatrix inner(const std::vector<CrossField>& z, const std::vector<CrossField>& v) {
  ExprMatrix m(z.size(), std::vector<Expr>(v.size()));
  for (std::size_t i = 0; i < z.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j) m[i][j] = inner(z[i], v[j]);
  return m;
}

bool satisfies_neumann(const CrossField& v) {
  if (v.space().kind != SpaceKind::NeumannChannel) return true;
  CrossField d = v.dy();
  Expr at_plus, at_minus;
  for (const auto& [k, c] : d.entries()) {
    at_plus += c;
    at_minus += (k % 2 == 0) ? c : -c;
  }
  return at_plus.is_zero() && at_minus.is_zero();
}

std::string matrix_str(const ExprMatrix& m) {
  std::string out = "[";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) out += ", ";
    out += "[";
    for (std::size_t j = 0; j < m[i].size(); ++j) {
      if (j) out += ", ";
      out += m[i][j].str();
    }
    out += "]";
  }
  return out + "]";
}

}  // namespace slowvary::crosssec
