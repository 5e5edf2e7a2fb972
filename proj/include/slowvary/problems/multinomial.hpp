#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "slowvary/algebra/scalar.hpp"

namespace slowvary::problems {

using algebra::Scalar;

// symbol_x..x^power; deriv counts the x-derivatives.
struct MFactor {
  std::string symbol;
  int deriv = 0;
  int power = 1;
  friend bool operator==(const MFactor&, const MFactor&) = default;
  friend auto operator<=>(const MFactor&, const MFactor&) = default;
};

struct MTerm {
  Scalar coef;
  std::vector<MFactor> factors;  // sorted by (symbol, deriv), distinct
  int degree() const;
  friend bool operator==(const MTerm& a, const MTerm& b) { return a.coef == b.coef && a.factors == b.factors; }
};

/// Polynomial nonlinearity in field symbols and their x-derivatives,
/// fully expanded and in canonical order (degree, then factors).
class Multinomial {
 public:
  const std::vector<MTerm>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  int min_degree() const;
  int max_degree() const;
  int max_deriv() const;
  std::set<std::string> symbols() const;
  std::string str() const;

  void add(const std::vector<MFactor>& factors, const Scalar& coef);
  Multinomial operator*(const Multinomial& o) const;
  Multinomial& operator+=(const Multinomial& o);
  Multinomial pow(int n) const;
  static Multinomial constant(const Scalar& c);
  static Multinomial factor(const MFactor& f);

  /// Evaluates over any ring: leaf(symbol, deriv) gives the value of a factor,
  /// scale(value, coef) multiplies by a scalar.
  template <class T, class Leaf, class Scale>
  T evaluate(T zero, T one, Leaf&& leaf, Scale&& scale) const {
    T sum = zero;
    for (const auto& t : terms_) {
      T prod = one;
      for (const auto& f : t.factors) {
        T v = leaf(f.symbol, f.deriv);
        for (int k = 0; k < f.power; ++k) prod = prod * v;
      }
      sum = sum + scale(prod, t.coef);
    }
    return sum;
  }

  friend bool operator==(const Multinomial& a, const Multinomial& b) { return a.terms_ == b.terms_; }

 private:
  void canonicalize();
  std::vector<MTerm> terms_;
};

// Parses without the degree check.
Multinomial parse_multinomial_raw(std::string_view src);
// Parses and rejects constant or linear terms (ValidationError).
Multinomial parse_multinomial(std::string_view src);

}  // namespace slowvary::problems
