#include "slowvary/algebra/registry.hpp"

#include <algorithm>

#include "slowvary/algebra/scalar.hpp"
#include "slowvary/error.hpp"

namespace slowvary::algebra {

Monomial Monomial::of(SymbolId id, int exp) {
  Monomial m;
  if (exp != 0) m.f_.push_back({id, exp});
  return m;
}

int Monomial::exponent(SymbolId id) const {
  auto it = std::lower_bound(f_.begin(), f_.end(), id,
                             [](const Factor& f, SymbolId v) { return f.id < v; });
  return (it != f_.end() && it->id == id) ? it->exp : 0;
}

int Monomial::degree() const {
  int d = 0;
  for (const auto& f : f_) d += f.exp;
  return d;
}

Monomial Monomial::shifted(SymbolId id, int delta) const {
  Monomial m = *this;
  auto it = std::lower_bound(m.f_.begin(), m.f_.end(), id,
                             [](const Factor& f, SymbolId v) { return f.id < v; });
  if (it != m.f_.end() && it->id == id) {
    it->exp += delta;
    if (it->exp == 0) m.f_.erase(it);
  } else if (delta != 0) {
    m.f_.insert(it, {id, delta});
  }
  return m;
}

Monomial operator*(const Monomial& a, const Monomial& b) {
  Monomial m;
  m.f_.reserve(a.f_.size() + b.f_.size());
  auto i = a.f_.begin();
  auto j = b.f_.begin();
  while (i != a.f_.end() && j != b.f_.end()) {
    if (i->id < j->id) {
      m.f_.push_back(*i++);
    } else if (j->id < i->id) {
      m.f_.push_back(*j++);
    } else {
      int e = i->exp + j->exp;
      if (e != 0) m.f_.push_back({i->id, e});
      ++i;
      ++j;
    }
  }
  m.f_.insert(m.f_.end(), i, a.f_.end());
  m.f_.insert(m.f_.end(), j, b.f_.end());
  return m;
}

std::shared_ptr<Registry> Registry::create() { return std::shared_ptr<Registry>(new Registry()); }

SymbolId Registry::add(SymbolInfo info) {
  auto id = static_cast<SymbolId>(symbols_.size());
  by_name_.emplace(info.name, id);
  symbols_.push_back(std::move(info));
  return id;
}

namespace {

bool valid_identifier(std::string_view name) {
  if (name.empty()) return false;
  auto alpha = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  if (!alpha(name[0])) return false;
  for (char c : name)
    if (!alpha(c) && !digit(c)) return false;
  return name != "i" && name != "Z";
}

}  // namespace

SymbolId Registry::symbol(std::string_view name) {
  std::lock_guard<std::mutex> lock(mu_);
  if (auto it = by_name_.find(std::string(name)); it != by_name_.end()) return it->second;
  if (!valid_identifier(name)) throw AlgebraError("invalid symbol name '" + std::string(name) + "'");
  // A name such as c_xx denotes a jet of a declared root c.
  auto us = name.rfind('_');
  if (us != std::string_view::npos && us + 1 < name.size()) {
    auto tail = name.substr(us + 1);
    if (std::all_of(tail.begin(), tail.end(), [](char c) { return c == 'x'; })) {
      auto root = by_name_.find(std::string(name.substr(0, us)));
      if (root != by_name_.end() && symbols_[root->second].jet_var != kNoSymbol &&
          symbols_[root->second].jet_order == 0) {
        const SymbolInfo& r = symbols_[root->second];
        SymbolInfo info;
        info.name = std::string(name);
        info.weight = r.weight;
        info.time_varying = r.time_varying;
        info.jet_root = root->second;
        info.jet_order = static_cast<int>(tail.size());
        info.jet_var = r.jet_var;
        return add(std::move(info));
      }
    }
  }
  SymbolInfo info;
  info.name = std::string(name);
  return add(std::move(info));
}

SymbolId Registry::coupling(std::string_view name) {
  SymbolId id = symbol(name);
  std::lock_guard<std::mutex> lock(mu_);
  SymbolInfo& s = symbols_[id];
  if (s.kind == SymbolKind::Atom || s.jet_var != kNoSymbol)
    throw AlgebraError("symbol '" + s.name + "' cannot be a coupling symbol");
  s.kind = SymbolKind::Coupling;
  return id;
}

std::optional<SymbolId> Registry::find(std::string_view name) const {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = by_name_.find(std::string(name));
  if (it == by_name_.end()) return std::nullopt;
  return it->second;
}

void Registry::set_weight(SymbolId id, int weight) {
  std::lock_guard<std::mutex> lock(mu_);
  if (weight < 0) throw AlgebraError("order weights must be non-negative");
  symbols_.at(id).weight = weight;
}

void Registry::set_time_varying(SymbolId id, bool on) {
  std::lock_guard<std::mutex> lock(mu_);
  symbols_.at(id).time_varying = on;
}

void Registry::declare_jets(SymbolId root, SymbolId wrt) {
  std::lock_guard<std::mutex> lock(mu_);
  SymbolInfo& r = symbols_.at(root);
  if (r.kind != SymbolKind::Plain) throw AlgebraError("only plain symbols carry jets");
  r.jet_root = root;
  r.jet_order = 0;
  r.jet_var = wrt;
}

SymbolId Registry::jet(SymbolId root, int order) {
  std::string name;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const SymbolInfo& r = symbols_.at(root);
    if (r.jet_var == kNoSymbol || r.jet_order != 0)
      throw AlgebraError("symbol '" + r.name + "' has no declared jets");
    if (order == 0) return root;
    name = r.name + "_" + std::string(static_cast<std::size_t>(order), 'x');
  }
  return symbol(name);
}

std::optional<SymbolId> Registry::jet_successor(SymbolId id, SymbolId wrt) {
  SymbolId root;
  int order;
  {
    std::lock_guard<std::mutex> lock(mu_);
    const SymbolInfo& s = symbols_.at(id);
    if (s.jet_var != wrt || s.jet_var == kNoSymbol) return std::nullopt;
    root = s.jet_root;
    order = s.jet_order;
  }
  return jet(root, order + 1);
}

SymbolId Registry::atom(const Monomial& core, const mpq_class& rate) {
  if (sgn(rate) >= 0) throw AlgebraError("history convolution needs a negative rate, got " + rational_str(rate));
  if (core.empty()) throw AlgebraError("history atom with constant core");
  for (const auto& f : core.factors())
    if (!fast_time_dependent(f.id)) throw AlgebraError("history atom core must be fast-time dependent");
  std::string name = "Z[" + monomial_str(core) + ";" + rational_str(rate) + "]";
  std::lock_guard<std::mutex> lock(mu_);
  if (auto it = by_name_.find(name); it != by_name_.end()) return it->second;
  SymbolInfo info;
  info.name = std::move(name);
  info.kind = SymbolKind::Atom;
  info.core = core;
  info.rate = rate;
  return add(std::move(info));
}

const SymbolInfo& Registry::info(SymbolId id) const {
  if (id >= symbols_.size()) throw AlgebraError("unknown symbol id");
  return symbols_[id];
}

bool Registry::fast_time_dependent(SymbolId id) const {
  return info(id).kind != SymbolKind::Plain;
}

std::size_t Registry::size() const {
  std::lock_guard<std::mutex> lock(mu_);
  return symbols_.size();
}

int Registry::weighted_degree(const Monomial& m) const {
  int w = 0;
  for (const auto& f : m.factors()) w += symbols_[f.id].weight * f.exp;
  return w;
}

std::string Registry::monomial_str(const Monomial& m) const {
  std::vector<const Factor*> fs;
  fs.reserve(m.factors().size());
  for (const auto& f : m.factors()) fs.push_back(&f);
  std::sort(fs.begin(), fs.end(), [this](const Factor* a, const Factor* b) {
    const SymbolInfo& x = info(a->id);
    const SymbolInfo& y = info(b->id);
    if (x.kind != y.kind) return x.kind < y.kind;
    return x.name < y.name;
  });
  std::string out;
  for (const Factor* f : fs) {
    if (!out.empty()) out += "*";
    out += info(f->id).name;
    if (f->exp != 1) out += "^" + std::to_string(f->exp);
  }
  return out;
}

}  // namespace slowvary::algebra
