#pragma once

#include <complex>
#include <functional>
#include <map>
#include <string>
#include <string_view>

#include "slowvary/algebra/registry.hpp"
#include "slowvary/algebra/scalar.hpp"

namespace slowvary::algebra {

/// Sparse polynomial over a Registry with Gaussian-rational coefficients.
///
/// Factors may be plain symbols (amplitudes, parameters, the order counter,
/// xi), coupling symbols, or interned history atoms, so the same type serves
/// as graded polynomial and as history expression. Products respect the
/// registry's active truncation bound.
class Expr {
 public:
  using Terms = std::map<Monomial, Scalar>;

  Expr() = default;
  Expr(Scalar c);  // NOLINT(google-explicit-constructor)
  Expr(long c) : Expr(Scalar(c)) {}  // NOLINT(google-explicit-constructor)
  Expr(RegistryPtr reg, Scalar c);

  static Expr var(const RegistryPtr& reg, SymbolId id, int exp = 1);
  static Expr var(const RegistryPtr& reg, std::string_view name, int exp = 1);
  static Expr monomial(const RegistryPtr& reg, const Monomial& m, Scalar c = 1);

  const RegistryPtr& registry() const { return reg_; }
  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  Scalar constant_term() const;

  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Expr& o);
  Expr& operator*=(const Scalar& c);
  Expr operator-() const;

  friend Expr operator+(Expr a, const Expr& b) { return a += b; }
  friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator*(Expr a, const Scalar& c) { return a *= c; }
  friend Expr operator*(const Scalar& c, Expr a) { return a *= c; }
  friend Expr operator/(Expr a, const Scalar& c) { return a *= Scalar(1) / c; }
  friend bool operator==(const Expr& a, const Expr& b) { return a.terms_ == b.terms_; }
  friend bool operator!=(const Expr& a, const Expr& b) { return !(a == b); }

  Expr pow(unsigned n) const;
  Expr conj_coeffs() const;

  // Drops every term whose weighted degree reaches the bound.
  Expr truncated(int bound) const;
  // Applies the registry's active bound, if any.
  Expr truncated() const;

  void add_term(const Monomial& m, const Scalar& c);

  std::string str() const;

 private:
  void adopt(const RegistryPtr& other);

  RegistryPtr reg_;
  Terms terms_;
};

/// Time-derivative replacements for slowly varying symbols.
struct DependencyTable {
  std::map<SymbolId, Expr> rate;
};

Expr diff(const Expr& e, SymbolId var, int n = 1);
Expr coeff(const Expr& e, SymbolId var, int k);
Expr subs(const Expr& e, const std::map<SymbolId, Expr>& values);
Expr select(const Expr& e, const std::function<bool(const Monomial&)>& keep);
Expr map_coeffs(const Expr& e, const std::function<Scalar(const Scalar&)>& f);

// Exact history convolution z(e; mu) with the normalising rewrite rules.
Expr conv(const Expr& e, const mpq_class& mu);
Expr ddt(const Expr& e, const DependencyTable& deps);
// Derivative in the fast time only: acts on history atoms, slow symbols held fixed.
Expr fast_ddt(const Expr& e);

// True when any factor of the term is a coupling symbol or history atom.
bool has_fast_time(const Registry& reg, const Monomial& m);
bool has_fast_time(const Expr& e);

// Factor of m made only of coupling symbols and atoms (empty if none).
Monomial fast_part(const Registry& reg, const Monomial& m);

std::complex<double> evaluate(const Expr& e, const std::function<std::complex<double>(SymbolId)>& value);

// Canonical text grammar: sums of coef*var^k*... terms and Z[expr;mu] atoms.
Expr parse_expr(const RegistryPtr& reg, std::string_view text);

}  // namespace slowvary::algebra
