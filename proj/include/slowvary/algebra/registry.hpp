#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <gmpxx.h>

namespace slowvary::algebra {

using SymbolId = std::uint32_t;
inline constexpr SymbolId kNoSymbol = static_cast<SymbolId>(-1);

struct Factor {
  SymbolId id;
  int exp;
  friend bool operator==(const Factor& a, const Factor& b) { return a.id == b.id && a.exp == b.exp; }
  friend bool operator<(const Factor& a, const Factor& b) {
    return a.id != b.id ? a.id < b.id : a.exp < b.exp;
  }
};

/// Power product of registry symbols, factors sorted by id, no zero exponents.
class Monomial {
 public:
  Monomial() = default;
  static Monomial of(SymbolId id, int exp = 1);

  const std::vector<Factor>& factors() const { return f_; }
  bool empty() const { return f_.empty(); }
  int exponent(SymbolId id) const;
  int degree() const;

  // Exponent of id changed by delta; factor removed when it reaches zero.
  Monomial shifted(SymbolId id, int delta) const;

  friend Monomial operator*(const Monomial& a, const Monomial& b);
  friend bool operator==(const Monomial& a, const Monomial& b) { return a.f_ == b.f_; }
  friend bool operator<(const Monomial& a, const Monomial& b) { return a.f_ < b.f_; }

 private:
  std::vector<Factor> f_;
};

enum class SymbolKind { Plain, Coupling, Atom };

struct SymbolInfo {
  std::string name;
  SymbolKind kind = SymbolKind::Plain;
  int weight = 0;
  bool time_varying = false;  // plain symbols whose d/dt must come from a DependencyTable
  // Jet bookkeeping: root symbol, derivative order and the variable differentiated.
  SymbolId jet_root = kNoSymbol;
  int jet_order = 0;
  SymbolId jet_var = kNoSymbol;
  // History atoms z(core; rate).
  Monomial core;
  mpq_class rate;
};

/// Variable registry shared by all expressions of one construction.
///
/// Holds names, order weights, jet families, interned history atoms and the
/// active truncation bound. Interning is guarded by a mutex; expressions
/// built from one registry can be read from several threads.
class Registry {
 public:
  static std::shared_ptr<Registry> create();

  SymbolId symbol(std::string_view name);
  SymbolId coupling(std::string_view name);
  std::optional<SymbolId> find(std::string_view name) const;

  void set_weight(SymbolId id, int weight);
  void set_time_varying(SymbolId id, bool on = true);

  // Declares root as a function of wrt; jets are named root_x, root_xx, ...
  void declare_jets(SymbolId root, SymbolId wrt);
  SymbolId jet(SymbolId root, int order);
  std::optional<SymbolId> jet_successor(SymbolId id, SymbolId wrt);

  // Interns z(core; rate) for a core made only of time-dependent factors.
  SymbolId atom(const Monomial& core, const mpq_class& rate);

  const SymbolInfo& info(SymbolId id) const;
  bool fast_time_dependent(SymbolId id) const;
  std::size_t size() const;

  std::optional<int> truncation() const { return bound_; }
  void set_truncation(std::optional<int> bound) { bound_ = bound; }
  int weighted_degree(const Monomial& m) const;
  bool beyond(const Monomial& m, int bound) const { return weighted_degree(m) >= bound; }
  bool beyond(const Monomial& m) const { return bound_ && weighted_degree(m) >= *bound_; }

  std::string monomial_str(const Monomial& m) const;

 private:
  Registry() = default;
  SymbolId add(SymbolInfo info);

  std::deque<SymbolInfo> symbols_;
  std::unordered_map<std::string, SymbolId> by_name_;
  std::optional<int> bound_;
  mutable std::mutex mu_;
};

using RegistryPtr = std::shared_ptr<Registry>;

/// Temporarily replaces the active truncation bound of a registry.
class TruncationScope {
 public:
  TruncationScope(Registry& r, std::optional<int> bound) : r_(r), saved_(r.truncation()) {
    r_.set_truncation(bound);
  }
  ~TruncationScope() { r_.set_truncation(saved_); }
  TruncationScope(const TruncationScope&) = delete;
  TruncationScope& operator=(const TruncationScope&) = delete;

 private:
  Registry& r_;
  std::optional<int> saved_;
};

}  // namespace slowvary::algebra
