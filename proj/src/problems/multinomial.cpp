#include "slowvary/problems/multinomial.hpp"

#include <algorithm>
#include <cctype>
#include <map>

#include "slowvary/error.hpp"

namespace slowvary::problems {

int MTerm::degree() const {
  int d = 0;
  for (const auto& f : factors) d += f.power;
  return d;
}

void Multinomial::canonicalize() {
  std::map<std::vector<MFactor>, Scalar> acc;
  for (auto& t : terms_) {
    std::map<std::pair<std::string, int>, int> pw;
    for (const auto& f : t.factors) pw[{f.symbol, f.deriv}] += f.power;
    std::vector<MFactor> fs;
    for (const auto& [k, p] : pw)
      if (p) fs.push_back({k.first, k.second, p});
    acc[fs] += t.coef;
  }
  terms_.clear();
  for (auto& [fs, c] : acc)
    if (!c.is_zero()) terms_.push_back({c, fs});
  std::stable_sort(terms_.begin(), terms_.end(), [](const MTerm& a, const MTerm& b) {
    if (a.degree() != b.degree()) return a.degree() < b.degree();
    return a.factors < b.factors;
  });
}

int Multinomial::min_degree() const {
  int d = 1 << 30;
  for (const auto& t : terms_) d = std::min(d, t.degree());
  return terms_.empty() ? 0 : d;
}

int Multinomial::max_degree() const {
  int d = 0;
  for (const auto& t : terms_) d = std::max(d, t.degree());
  return d;
}

int Multinomial::max_deriv() const {
  int d = 0;
  for (const auto& t : terms_)
    for (const auto& f : t.factors) d = std::max(d, f.deriv);
  return d;
}

std::set<std::string> Multinomial::symbols() const {
  std::set<std::string> s;
  for (const auto& t : terms_)
    for (const auto& f : t.factors) s.insert(f.symbol);
  return s;
}

void Multinomial::add(const std::vector<MFactor>& factors, const Scalar& coef) {
  terms_.push_back({coef, factors});
  canonicalize();
}

Multinomial Multinomial::constant(const Scalar& c) {
  Multinomial m;
  if (!c.is_zero()) m.terms_.push_back({c, {}});
  return m;
}

Multinomial Multinomial::factor(const MFactor& f) {
  Multinomial m;
  m.terms_.push_back({Scalar(1), {f}});
  m.canonicalize();
  return m;
}

Multinomial Multinomial::operator*(const Multinomial& o) const {
  Multinomial r;
  for (const auto& a : terms_)
    for (const auto& b : o.terms_) {
      MTerm t{a.coef * b.coef, a.factors};
      t.factors.insert(t.factors.end(), b.factors.begin(), b.factors.end());
      r.terms_.push_back(std::move(t));
    }
  r.canonicalize();
  return r;
}

Multinomial& Multinomial::operator+=(const Multinomial& o) {
  terms_.insert(terms_.end(), o.terms_.begin(), o.terms_.end());
  canonicalize();
  return *this;
}

Multinomial Multinomial::pow(int n) const {
  Multinomial r = constant(Scalar(1));
  for (int k = 0; k < n; ++k) r = r * *this;
  return r;
}

std::string Multinomial::str() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (const auto& t : terms_) {
    std::string mono;
    for (const auto& f : t.factors) {
      if (!mono.empty()) mono += "*";
      mono += f.symbol;
      if (f.deriv) mono += "_" + std::string(f.deriv, 'x');
      if (f.power != 1) mono += "^" + std::to_string(f.power);
    }
    const Scalar& c = t.coef;
    bool neg = sgn(c.re()) < 0 || (sgn(c.re()) == 0 && sgn(c.im()) < 0);
    Scalar mag = neg ? -c : c;
    std::string body;
    if (mono.empty()) {
      body = mag.str();
    } else if (mag.is_one()) {
      body = mono;
    } else {
      body = mag.str() + "*" + mono;
    }
    if (out.empty()) {
      out = neg ? "-" + body : body;
    } else {
      out += neg ? " - " + body : " + " + body;
    }
  }
  return out;
}

namespace {

class Parser {
 public:
  explicit Parser(std::string_view s) : s_(s) {}

  Multinomial run() {
    skip();
    if (pos_ == s_.size()) throw ParseError("empty expression", pos_);
    Multinomial m = expr();
    skip();
    if (pos_ != s_.size()) throw ParseError(std::string("unexpected '") + s_[pos_] + "'", pos_);
    return m;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }

  Multinomial expr() {
    Multinomial sum;
    bool first = true;
    while (true) {
      int sign = 1;
      if (peek('+') || peek('-')) {
        sign = s_[pos_] == '-' ? -1 : 1;
        ++pos_;
      } else if (!first) {
        break;
      }
      Multinomial t = term();
      sum += sign < 0 ? t * Multinomial::constant(Scalar(-1)) : t;
      first = false;
      if (!(peek('+') || peek('-'))) break;
    }
    return sum;
  }

  Multinomial term() {
    Multinomial p = power();
    while (peek('*')) {
      ++pos_;
      p = p * power();
    }
    return p;
  }

  long integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) throw ParseError("expected integer", pos_);
    if (pos_ - start > 15) throw ParseError("integer too long", start);
    return std::stol(std::string(s_.substr(start, pos_ - start)));
  }

  Multinomial power() {
    Multinomial base = primary();
    if (peek('^')) {
      ++pos_;
      long e = integer();
      base = base.pow(static_cast<int>(e));
    }
    return base;
  }

  Multinomial primary() {
    skip();
    if (pos_ == s_.size()) throw ParseError("unexpected end of input", pos_);
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Multinomial inner = expr();
      if (!peek(')')) throw ParseError("expected ')'", pos_);
      ++pos_;
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      long num = integer();
      long den = 1;
      if (peek('/')) {
        ++pos_;
        std::size_t at = pos_;
        den = integer();
        if (den == 0) throw ParseError("zero denominator", at);
      }
      return Multinomial::constant(Scalar(num, den));
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isalnum(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      MFactor f{std::string(s_.substr(start, pos_ - start)), 0, 1};
      if (pos_ < s_.size() && s_[pos_] == '_') {
        ++pos_;
        while (pos_ < s_.size() && s_[pos_] == 'x') {
          ++f.deriv;
          ++pos_;
        }
        if (f.deriv == 0) throw ParseError("expected derivative suffix _x", pos_);
        if (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
          throw ParseError("derivative suffix may only contain x", pos_);
      }
      return Multinomial::factor(f);
    }
    throw ParseError(std::string("unexpected '") + c + "'", pos_);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace

Multinomial parse_multinomial_raw(std::string_view src) { return Parser(src).run(); }

Multinomial parse_multinomial(std::string_view src) {
  Multinomial m = parse_multinomial_raw(src);
  for (const auto& t : m.terms())
    if (t.degree() < 2) {
      Multinomial single;
      single.add(t.factors, t.coef);
      throw ValidationError("nonlinearity term '" + single.str() + "' has degree " + std::to_string(t.degree()) +
                            "; constant and linear terms belong in the operator stack");
    }
  return m;
}

}  // namespace slowvary::problems
