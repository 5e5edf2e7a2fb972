#pragma once

#include <map>
#include <string>
#include <vector>

#include "slowvary/algebra/expr.hpp"

namespace slowvary::crosssec {

using algebra::Expr;
using algebra::RegistryPtr;
using algebra::Scalar;

enum class SpaceKind { FiniteDim, NeumannChannel, PeriodicFourier };

/// Cross-sectional function space.
///
/// cap is the vector dimension for FiniteDim, the largest admissible power
/// of y for NeumannChannel, and the largest |harmonic| for PeriodicFourier.
struct CrossSpace {
  SpaceKind kind = SpaceKind::FiniteDim;
  int cap = 1;

  static CrossSpace finite(int m) { return {SpaceKind::FiniteDim, m}; }
  static CrossSpace neumann(int max_degree) { return {SpaceKind::NeumannChannel, max_degree}; }
  static CrossSpace fourier(int max_harmonic) { return {SpaceKind::PeriodicFourier, max_harmonic}; }

  bool admits(int index) const;
  void check(int index) const;
  std::string str() const;
  friend bool operator==(const CrossSpace& a, const CrossSpace& b) {
    return a.kind == b.kind && a.cap == b.cap;
  }
};

/// Element of a cross-space with expression coefficients, stored sparsely:
/// component index, power of y, or harmonic number mapped to its coefficient.
class CrossField {
 public:
  CrossField() = default;
  explicit CrossField(CrossSpace space) : space_(space) {}
  static CrossField basis(CrossSpace space, int index, Expr coef = Expr(1));

  const CrossSpace& space() const { return space_; }
  const std::map<int, Expr>& entries() const { return c_; }
  Expr at(int index) const;
  void set(int index, Expr value);
  void add(int index, const Expr& value);
  bool is_zero() const { return c_.empty(); }

  CrossField& operator+=(const CrossField& o);
  CrossField& operator-=(const CrossField& o);
  friend CrossField operator+(CrossField a, const CrossField& b) { return a += b; }
  friend CrossField operator-(CrossField a, const CrossField& b) { return a -= b; }
  friend CrossField operator*(const CrossField& a, const Expr& s);
  friend CrossField operator*(const Expr& s, const CrossField& a) { return a * s; }
  CrossField operator-() const;
  friend bool operator==(const CrossField& a, const CrossField& b) {
    return a.space_ == b.space_ && a.c_ == b.c_;
  }

  // Pointwise product of functions of y (NeumannChannel, PeriodicFourier only).
  friend CrossField product(const CrossField& a, const CrossField& b);

  CrossField dy(int n = 1) const;
  template <class F>
  CrossField map(F&& f) const {
    CrossField r(space_);
    for (const auto& [k, v] : c_) r.set(k, f(v));
    return r;
  }

  std::string str() const;

 private:
  void check_space(const CrossField& o) const;

  CrossSpace space_;
  std::map<int, Expr> c_;
};

/// One operator of the stack L_0..L_p.
///
/// FiniteDim operators are matrices; the function-space variants are
/// differential polynomials sum_j a_j(y) d^j/dy^j with field coefficients.
class Operator {
 public:
  Operator() = default;
  static Operator zero(CrossSpace space);
  static Operator matrix(CrossSpace space, std::vector<std::vector<Expr>> m);
  static Operator differential(CrossSpace space, std::map<int, CrossField> terms);

  const CrossSpace& space() const { return space_; }
  const std::vector<std::vector<Expr>>& mat() const { return mat_; }
  const std::map<int, CrossField>& terms() const { return terms_; }
  bool is_zero() const;

  CrossField apply(const CrossField& v) const;
  // Multiplier on e^{iky} for a constant-coefficient Fourier operator.
  Expr symbol(int k) const;
  // Highest y-derivative order.
  int order() const;

  std::string str() const;

 private:
  CrossSpace space_;
  std::vector<std::vector<Expr>> mat_;
  std::map<int, CrossField> terms_;
};

using OperatorStack = std::vector<Operator>;
using ExprMatrix = std::vector<std::vector<Expr>>;

Expr inner(const CrossField& z, const CrossField& v);
ExprMatrix inner(const std::vector<CrossField>& z, const std::vector<CrossField>& v);

// Neumann condition dv/dy = 0 at y = +-1.
bool satisfies_neumann(const CrossField& v);

std::string matrix_str(const ExprMatrix& m);

}  // namespace slowvary::crosssec
