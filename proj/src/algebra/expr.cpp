#include "slowvary/algebra/expr.hpp"

#include <algorithm>
#include <cctype>
#include <tuple>
#include <vector>

#include "slowvary/error.hpp"

namespace slowvary::algebra {

Expr::Expr(Scalar c) {
  if (!c.is_zero()) terms_.emplace(Monomial{}, std::move(c));
}

Expr::Expr(RegistryPtr reg, Scalar c) : reg_(std::move(reg)) {
  if (!c.is_zero()) terms_.emplace(Monomial{}, std::move(c));
}

Expr Expr::var(const RegistryPtr& reg, SymbolId id, int exp) {
  return monomial(reg, Monomial::of(id, exp));
}

Expr Expr::var(const RegistryPtr& reg, std::string_view name, int exp) {
  return var(reg, reg->symbol(name), exp);
}

Expr Expr::monomial(const RegistryPtr& reg, const Monomial& m, Scalar c) {
  Expr e(reg, 0);
  if (!c.is_zero()) e.terms_.emplace(m, std::move(c));
  return e;
}

bool Expr::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.empty());
}

Scalar Expr::constant_term() const {
  auto it = terms_.find(Monomial{});
  return it == terms_.end() ? Scalar(0) : it->second;
}

void Expr::adopt(const RegistryPtr& other) {
  if (!other) return;
  if (!reg_) {
    reg_ = other;
  } else if (reg_ != other) {
    throw AlgebraError("operands belong to different variable registries");
  }
}

void Expr::add_term(const Monomial& m, const Scalar& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = terms_.try_emplace(m, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }
}

Expr& Expr::operator+=(const Expr& o) {
  adopt(o.reg_);
  for (const auto& [m, c] : o.terms_) add_term(m, c);
  return *this;
}

Expr& Expr::operator-=(const Expr& o) {
  adopt(o.reg_);
  for (const auto& [m, c] : o.terms_) add_term(m, -c);
  return *this;
}

Expr& Expr::operator*=(const Scalar& c) {
  if (c.is_zero()) {
    terms_.clear();
    return *this;
  }
  for (auto& [m, v] : terms_) v *= c;
  return *this;
}

Expr Expr::operator-() const {
  Expr r = *this;
  for (auto& [m, v] : r.terms_) v = -v;
  return r;
}

Expr operator*(const Expr& a, const Expr& b) {
  Expr r;
  r.adopt(a.reg_);
  r.adopt(b.reg_);
  const Registry* reg = r.reg_.get();
  const bool cut = reg && reg->truncation().has_value();
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m = ma * mb;
      if (cut && reg->beyond(m)) continue;
      r.add_term(m, ca * cb);
    }
  }
  return r;
}

Expr& Expr::operator*=(const Expr& o) {
  *this = *this * o;
  return *this;
}

Expr Expr::pow(unsigned n) const {
  Expr r(reg_, 1);
  Expr base = *this;
  while (n) {
    if (n & 1u) r *= base;
    n >>= 1u;
    if (n) base *= base;
  }
  return r;
}

Expr Expr::conj_coeffs() const {
  Expr r = *this;
  for (auto& [m, v] : r.terms_) v = v.conj();
  return r;
}

Expr Expr::truncated(int bound) const {
  Expr r(reg_, 0);
  for (const auto& [m, c] : terms_)
    if (!reg_ || !reg_->beyond(m, bound)) r.terms_.emplace(m, c);
  return r;
}

Expr Expr::truncated() const {
  if (!reg_ || !reg_->truncation()) return *this;
  return truncated(*reg_->truncation());
}

namespace {

struct PrintKey {
  int degree;
  std::vector<std::tuple<int, std::string, int>> factors;
};

PrintKey print_key(const Registry* reg, const Monomial& m) {
  PrintKey k{m.degree(), {}};
  for (const auto& f : m.factors()) {
    const SymbolInfo& s = reg->info(f.id);
    k.factors.emplace_back(static_cast<int>(s.kind), s.name, -f.exp);
  }
  std::sort(k.factors.begin(), k.factors.end());
  return k;
}

bool key_less(const PrintKey& a, const PrintKey& b) {
  if (a.degree != b.degree) return a.degree < b.degree;
  return a.factors < b.factors;
}

std::string term_str(const Registry* reg, const Monomial& m, const Scalar& c) {
  if (m.empty()) return c.str();
  std::string mono = reg->monomial_str(m);
  if (c.is_one()) return mono;
  if (c == Scalar(-1)) return "-" + mono;
  if (c.is_real()) return rational_str(c.re()) + "*" + mono;
  if (sgn(c.re()) == 0) {
    if (c.im() == 1) return "i*" + mono;
    if (c.im() == -1) return "-i*" + mono;
    return rational_str(c.im()) + "*i*" + mono;
  }
  return c.str() + "*" + mono;
}

}  // namespace

std::string Expr::str() const {
  if (terms_.empty()) return "0";
  std::vector<std::pair<PrintKey, const Terms::value_type*>> order;
  order.reserve(terms_.size());
  for (const auto& t : terms_) order.emplace_back(print_key(reg_.get(), t.first), &t);
  std::stable_sort(order.begin(), order.end(),
                   [](const auto& a, const auto& b) { return key_less(a.first, b.first); });
  std::string out;
  for (const auto& [key, t] : order) {
    std::string s = term_str(reg_.get(), t->first, t->second);
    if (!out.empty() && s[0] != '-') out += "+";
    out += s;
  }
  return out;
}

Expr diff(const Expr& e, SymbolId var, int n) {
  if (n < 0) throw AlgebraError("negative derivative order");
  const RegistryPtr& reg = e.registry();
  if (n == 0 || e.is_zero()) return e;
  if (!reg) return Expr(0);
  if (var >= reg->size()) throw AlgebraError("differentiation with respect to an unknown variable");
  Expr cur = e;
  for (int step = 0; step < n; ++step) {
    Expr out(reg, 0);
    for (const auto& [m, c] : cur.terms()) {
      for (const auto& f : m.factors()) {
        if (f.id == var) {
          out.add_term(m.shifted(var, -1), c * Scalar(f.exp));
        } else if (auto next = reg->jet_successor(f.id, var)) {
          out.add_term(m.shifted(f.id, -1).shifted(*next, 1), c * Scalar(f.exp));
        }
      }
    }
    cur = std::move(out);
  }
  return cur;
}

Expr coeff(const Expr& e, SymbolId var, int k) {
  Expr out(e.registry(), 0);
  for (const auto& [m, c] : e.terms())
    if (m.exponent(var) == k) out.add_term(m.shifted(var, -k), c);
  return out;
}

Expr subs(const Expr& e, const std::map<SymbolId, Expr>& values) {
  const RegistryPtr& reg = e.registry();
  Expr out(reg, 0);
  std::map<std::pair<SymbolId, int>, Expr> powers;
  for (const auto& [m, c] : e.terms()) {
    Monomial kept;
    Expr factor(reg, c);
    for (const auto& f : m.factors()) {
      auto it = values.find(f.id);
      if (it == values.end()) {
        kept = kept * Monomial::of(f.id, f.exp);
        continue;
      }
      if (f.exp < 0) throw AlgebraError("cannot substitute into a negative power");
      auto key = std::make_pair(f.id, f.exp);
      auto p = powers.find(key);
      if (p == powers.end()) p = powers.emplace(key, it->second.pow(static_cast<unsigned>(f.exp))).first;
      factor *= p->second;
      if (factor.is_zero()) break;
    }
    if (factor.is_zero()) continue;
    out += factor * Expr::monomial(reg, kept);
  }
  return out;
}

Expr select(const Expr& e, const std::function<bool(const Monomial&)>& keep) {
  Expr out(e.registry(), 0);
  for (const auto& [m, c] : e.terms())
    if (keep(m)) out.add_term(m, c);
  return out;
}

Expr map_coeffs(const Expr& e, const std::function<Scalar(const Scalar&)>& f) {
  Expr out(e.registry(), 0);
  for (const auto& [m, c] : e.terms()) out.add_term(m, f(c));
  return out;
}

bool has_fast_time(const Registry& reg, const Monomial& m) {
  for (const auto& f : m.factors())
    if (reg.fast_time_dependent(f.id)) return true;
  return false;
}

bool has_fast_time(const Expr& e) {
  if (!e.registry()) return false;
  for (const auto& [m, c] : e.terms())
    if (has_fast_time(*e.registry(), m)) return true;
  return false;
}

Monomial fast_part(const Registry& reg, const Monomial& m) {
  Monomial out;
  for (const auto& f : m.factors())
    if (reg.fast_time_dependent(f.id)) out = out * Monomial::of(f.id, f.exp);
  return out;
}

Expr conv(const Expr& e, const mpq_class& mu) {
  if (sgn(mu) >= 0)
    throw AlgebraError("history convolution rate must be negative, got " + rational_str(mu));
  const RegistryPtr& reg = e.registry();
  Expr out(reg, 0);
  const Scalar inv_abs(mpq_class(-1) / mu);
  for (const auto& [m, c] : e.terms()) {
    if (!reg) {
      out.add_term(m, c * inv_abs);
      continue;
    }
    Monomial fast = fast_part(*reg, m);
    if (fast.empty()) {
      out.add_term(m, c * inv_abs);
      continue;
    }
    Monomial slow = m;
    for (const auto& f : fast.factors()) slow = slow.shifted(f.id, -f.exp);
    Expr head = Expr::monomial(reg, slow, c);
    const auto& ff = fast.factors();
    if (ff.size() == 1 && ff[0].exp == 1 && reg->info(ff[0].id).kind == SymbolKind::Atom &&
        reg->info(ff[0].id).rate != mu) {
      // z(z(r;nu);mu) = -sign(mu) (z(r;mu) - z(r;nu)) / (mu - nu); here sign(mu) = -1.
      const SymbolInfo& inner = reg->info(ff[0].id);
      mpq_class nu = inner.rate;
      Expr r = Expr::monomial(reg, inner.core);
      Expr nested = conv(r, mu) - Expr::var(reg, ff[0].id);
      out += head * nested * Scalar(mpq_class(1) / (mu - nu));
      continue;
    }
    out += head * Expr::var(reg, reg->atom(fast, mu));
  }
  return out;
}

Expr ddt(const Expr& e, const DependencyTable& deps) {
  const RegistryPtr& reg = e.registry();
  Expr out(reg, 0);
  if (!reg) return out;
  for (const auto& [m, c] : e.terms()) {
    for (const auto& f : m.factors()) {
      const SymbolInfo& s = reg->info(f.id);
      Expr d;
      switch (s.kind) {
        case SymbolKind::Atom:
          // d/dt z(core; mu) = -sign(mu) core + mu z = core + mu z for mu < 0.
          d = Expr::monomial(reg, s.core) + Expr::var(reg, f.id) * Scalar(s.rate);
          break;
        case SymbolKind::Coupling:
          throw AlgebraError("time derivative of bare coupling symbol '" + s.name + "'");
        case SymbolKind::Plain: {
          auto it = deps.rate.find(f.id);
          if (it != deps.rate.end()) {
            d = it->second;
          } else if (s.time_varying) {
            throw AlgebraError("no time-derivative rule for '" + s.name + "'");
          } else {
            continue;
          }
          break;
        }
      }
      out += Expr::monomial(reg, m.shifted(f.id, -1), c * Scalar(f.exp)) * d;
    }
  }
  return out;
}

Expr fast_ddt(const Expr& e) {
  const RegistryPtr& reg = e.registry();
  Expr out(reg, 0);
  if (!reg) return out;
  for (const auto& [m, c] : e.terms()) {
    for (const auto& f : m.factors()) {
      const SymbolInfo& s = reg->info(f.id);
      if (s.kind == SymbolKind::Coupling)
        throw AlgebraError("time derivative of bare coupling symbol '" + s.name + "'");
      if (s.kind != SymbolKind::Atom) continue;
      Expr d = Expr::monomial(reg, s.core) + Expr::var(reg, f.id) * Scalar(s.rate);
      out += Expr::monomial(reg, m.shifted(f.id, -1), c * Scalar(f.exp)) * d;
    }
  }
  return out;
}

std::complex<double> evaluate(const Expr& e,
                              const std::function<std::complex<double>(SymbolId)>& value) {
  std::complex<double> sum = 0;
  for (const auto& [m, c] : e.terms()) {
    std::complex<double> t = c.to_complex();
    for (const auto& f : m.factors()) t *= std::pow(value(f.id), f.exp);
    sum += t;
  }
  return sum;
}

namespace {

class ExprParser {
 public:
  ExprParser(const RegistryPtr& reg, std::string_view s) : reg_(reg), s_(s) {}

  Expr parse_all() {
    Expr e = sum();
    skip();
    if (pos_ != s_.size()) throw ParseError("unexpected '" + std::string(1, s_[pos_]) + "'", pos_);
    return e;
  }

 private:
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool accept(char c) {
    if (peek(c)) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) throw ParseError(std::string("expected '") + c + "'", pos_);
  }

  Expr sum() {
    Expr acc(reg_, 0);
    bool neg = false;
    if (accept('-')) {
      neg = true;
    } else {
      accept('+');
    }
    Expr t = product();
    acc += neg ? -t : t;
    while (true) {
      if (accept('+')) {
        acc += product();
      } else if (accept('-')) {
        acc -= product();
      } else {
        break;
      }
    }
    return acc;
  }

  Expr product() {
    Expr acc = power();
    while (true) {
      if (accept('*')) {
        acc *= power();
      } else if (peek('/')) {
        std::size_t at = pos_++;
        Expr d = power();
        if (!d.is_constant() || d.is_zero()) throw ParseError("division by a non-constant or zero", at);
        acc = acc / d.constant_term();
      } else {
        break;
      }
    }
    return acc;
  }

  Expr power() {
    Expr base = primary();
    if (accept('^')) {
      skip();
      bool neg = accept('-');
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) throw ParseError("expected integer exponent", pos_);
      int n = std::stoi(std::string(s_.substr(start, pos_ - start)));
      if (!neg) return base.pow(static_cast<unsigned>(n));
      if (base.size() != 1) throw ParseError("negative power of a sum", start);
      const auto& [m, c] = *base.terms().begin();
      Monomial inv;
      for (const auto& f : m.factors()) inv = inv * Monomial::of(f.id, -f.exp * n);
      Scalar ci = Scalar(1);
      for (int k = 0; k < n; ++k) ci /= c;
      return Expr::monomial(reg_, inv, ci);
    }
    return base;
  }

  Expr primary() {
    skip();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of expression", pos_);
    char ch = s_[pos_];
    if (ch == '(') {
      ++pos_;
      Expr e = sum();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return Expr(reg_, Scalar(mpq_class(std::string(s_.substr(start, pos_ - start)))));
    }
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      std::string name(s_.substr(start, pos_ - start));
      if (name == "i") return Expr(reg_, Scalar::i());
      if (name == "Z") return atom(start);
      bool fresh = !reg_->find(name).has_value();
      SymbolId id = reg_->symbol(name);
      if (fresh && atom_depth_ > 0) reg_->coupling(name);
      return Expr::var(reg_, id);
    }
    throw ParseError("unexpected '" + std::string(1, ch) + "'", pos_);
  }

  Expr atom(std::size_t at) {
    expect('[');
    ++atom_depth_;
    Expr inner = sum();
    --atom_depth_;
    expect(';');
    skip();
    std::size_t rstart = pos_;
    bool neg = accept('-');
    skip();
    std::size_t dstart = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '/'))
      ++pos_;
    if (dstart == pos_) throw ParseError("expected convolution rate", pos_);
    mpq_class mu(std::string(s_.substr(dstart, pos_ - dstart)));
    if (mu.get_den() == 0) throw ParseError("zero denominator in rate", dstart);
    mu.canonicalize();
    if (neg) mu = -mu;
    expect(']');
    if (sgn(mu) >= 0) throw ParseError("convolution rate must be negative", rstart);
    (void)at;
    return conv(inner, mu);
  }

  RegistryPtr reg_;
  std::string_view s_;
  std::size_t pos_ = 0;
  int atom_depth_ = 0;
};

}  // namespace

Expr parse_expr(const RegistryPtr& reg, std::string_view text) {
  if (!reg) throw AlgebraError("parse_expr needs a registry");
  return ExprParser(reg, text).parse_all();
}

}  // namespace slowvary::algebra
