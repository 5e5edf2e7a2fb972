#include "slowvary/problems/problem.hpp"

#include <algorithm>
#include <cctype>

#include "slowvary/error.hpp"

namespace slowvary::problems {

using crosssec::CrossField;
using crosssec::Operator;
using crosssec::SpaceKind;

namespace {

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

bool is_identifier(const std::string& s) {
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s[0]))) return false;
  return std::all_of(s.begin(), s.end(), [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

}  // namespace

bool ProblemSpec::is_linear() const {
  return std::all_of(nonlinearity.begin(), nonlinearity.end(), [](const Multinomial& m) { return m.is_zero(); });
}

Expr ProblemSpec::small() const { return Expr::var(reg, "small"); }
Expr ProblemSpec::xi() const { return Expr::var(reg, "xi"); }

void ProblemSpec::set_param(const std::string& key, const std::string& value) {
  auto it = std::find_if(params.begin(), params.end(), [&](const Parameter& p) { return lower(p.name) == lower(key); });
  if (it == params.end()) throw ValidationError("problem '" + name + "' has no parameter '" + key + "'");
  auto old = reg->find(it->name);
  if (!old) throw ValidationError("parameter '" + it->name + "' is not registered");
  Expr replacement = algebra::parse_expr(reg, value);
  std::map<algebra::SymbolId, Expr> sub{{*old, replacement}};
  auto s = [&](const Expr& e) { return algebra::subs(e, sub); };

  for (auto& op : ops) {
    if (op.space().kind == SpaceKind::FiniteDim) {
      auto m = op.mat();
      for (auto& row : m)
        for (auto& e : row) e = s(e);
      op = Operator::matrix(op.space(), std::move(m));
    } else {
      std::map<int, CrossField> terms;
      for (const auto& [j, a] : op.terms()) terms.emplace(j, a.map(s));
      op = Operator::differential(op.space(), std::move(terms));
    }
  }
  for (auto& row : spectral.A0)
    for (auto& e : row) e = s(e);
  if (is_identifier(value)) {
    if (perturbation && perturbation->param == it->name) perturbation->param = value;
    it->name = value;
  } else {
    if (perturbation && perturbation->param == it->name)
      throw ValidationError("perturbation parameter '" + it->name + "' must stay symbolic");
    params.erase(it);
  }
}

ValidationReport validate_spec(const ProblemSpec& spec, int order) {
  ValidationReport rep;
  if (order < 0) throw ValidationError("order must be non-negative");
  if (spec.ops.empty()) throw ValidationError("problem has an empty operator stack");
  for (std::size_t l = 0; l < spec.ops.size(); ++l)
    if (!(spec.ops[l].space() == spec.space))
      throw ValidationError("operator L" + std::to_string(l) + " acts on another cross-space");
  if (spec.amplitudes.size() != spec.spectral.m())
    throw ValidationError("need one amplitude name per slow mode");

  auto sc = crosssec::spectral_check(spec.L(0), spec.spectral, order);
  rep.lines = sc.lines;

  if (!spec.nonlinearity.empty()) {
    std::size_t want = spec.space.kind == SpaceKind::FiniteDim ? static_cast<std::size_t>(spec.space.cap) : 1;
    if (spec.nonlinearity.size() != want)
      throw ValidationError("expected " + std::to_string(want) + " nonlinearity components");
    for (const auto& f : spec.nonlinearity) {
      if (!f.is_zero() && f.min_degree() < 2)
        throw ValidationError("nonlinearity '" + f.str() + "' has a term of degree below 2");
      for (const auto& s : f.symbols())
        if (std::find(spec.fields.begin(), spec.fields.end(), s) == spec.fields.end())
          throw ValidationError("nonlinearity uses unknown field '" + s + "'");
    }
    if (!spec.is_linear()) {
      int p = 1 << 30;
      for (const auto& f : spec.nonlinearity)
        if (!f.is_zero()) p = std::min(p, f.min_degree());
      rep.lines.push_back("nonlinearity has order p = " + std::to_string(p) + " >= 2");
    }
  }
  if (spec.perturbation &&
      std::none_of(spec.params.begin(), spec.params.end(),
                   [&](const Parameter& p) { return p.name == spec.perturbation->param; }))
    throw ValidationError("perturbation parameter '" + spec.perturbation->param + "' is not declared");
  return rep;
}

std::string coupling_name(const ProblemSpec& spec, int order, int index, int k) {
  std::string xs(k, 'x');
  if (spec.space.kind == SpaceKind::FiniteDim) return spec.fields.at(index) + std::to_string(order) + xs;
  std::string base = spec.fields.at(0) + std::to_string(order);
  if (spec.space.kind == SpaceKind::NeumannChannel) return base + xs;
  std::string tag = index > 0 ? "p" + std::to_string(index) : index < 0 ? "m" + std::to_string(-index) : "0";
  return base + "_" + tag + "_" + xs;
}

CrossField coupling_field(const ProblemSpec& spec, int order, int k) {
  CrossField u(spec.space);
  auto sym = [&](int index) { return Expr::var(spec.reg, spec.reg->coupling(coupling_name(spec, order, index, k))); };
  switch (spec.space.kind) {
    case SpaceKind::FiniteDim:
      for (int i = 0; i < spec.space.cap; ++i) u.set(i, sym(i));
      break;
    case SpaceKind::PeriodicFourier:
      for (int h = -spec.coupling_modes; h <= spec.coupling_modes; ++h) u.set(h, sym(h));
      break;
    case SpaceKind::NeumannChannel:
      throw ConstructionError("coupling on a Neumann channel has no finite cross-sectional form");
  }
  return u;
}

}  // namespace slowvary::problems
