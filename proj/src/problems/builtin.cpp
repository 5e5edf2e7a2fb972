#include <gmpxx.h>

#include "slowvary/error.hpp"
#include "slowvary/problems/problem.hpp"

namespace slowvary::problems {

using algebra::Registry;
using algebra::Scalar;
using crosssec::CrossField;
using crosssec::CrossSpace;
using crosssec::Operator;

namespace {

RegistryPtr base_registry() {
  auto reg = Registry::create();
  reg->set_weight(reg->symbol("small"), 1);
  reg->set_weight(reg->symbol("xi"), 1);
  return reg;
}

Expr k(long num, long den = 1) { return Expr(Scalar(num, den)); }

CrossField constant_field(CrossSpace sp, const Expr& e) { return CrossField::basis(sp, 0, e); }

crosssec::ExprMatrix zero_matrix(std::size_t m) { return crosssec::ExprMatrix(m, std::vector<Expr>(m)); }

ProblemSpec heat_exchanger(bool nonlinear) {
  ProblemSpec p;
  p.reg = base_registry();
  p.space = CrossSpace::finite(2);
  p.fields = {"c", "d"};
  p.ops = {Operator::matrix(p.space, {{k(0), k(0)}, {k(0), k(-1)}}),
           Operator::matrix(p.space, {{k(0), k(1)}, {k(1), k(0)}})};
  p.spectral.V0 = {CrossField::basis(p.space, 0)};
  p.spectral.Z0 = {CrossField::basis(p.space, 0)};
  p.spectral.A0 = zero_matrix(1);
  p.spectral.alpha = 0;
  p.spectral.beta = 1;
  p.amplitudes = {"c"};
  if (nonlinear) {
    p.name = "heat-exchanger-nonlinear";
    p.description = "counter-flow heat exchanger with quadratic reaction: c_t = d_x - c*d, d_t = -d + c_x - (c^2+d^2)/2";
    p.nonlinearity = {parse_multinomial("-c*d"), parse_multinomial("-1/2*(c^2+d^2)")};
    p.default_order = 2;
    p.error_offset = 3;
  } else {
    p.name = "heat-exchanger-linear";
    p.description = "counter-flow heat exchanger in mean/difference form: c_t = d_x, d_t = -d + c_x";
    p.default_order = 4;
  }
  return p;
}

ProblemSpec shear_dispersion() {
  ProblemSpec p;
  p.name = "shear-dispersion";
  p.description =
      "advection-diffusion in a 2D channel |y| < 1 with Neumann walls and Poiseuille flow (3/2)Pe(1-y^2): "
      "u_t = -(3/2)Pe(1-y^2) u_x + u_xx + u_yy";
  p.reg = base_registry();
  p.space = CrossSpace::neumann(48);
  p.fields = {"u"};
  p.params = {{"Pe", 0}};
  Expr pe = Expr::var(p.reg, "Pe");
  CrossField w(p.space);
  w.set(0, pe * Scalar(-3, 2));
  w.set(2, pe * Scalar(3, 2));
  p.ops = {Operator::differential(p.space, {{2, constant_field(p.space, k(1))}}),
           Operator::differential(p.space, {{0, w}}),
           Operator::differential(p.space, {{0, constant_field(p.space, k(1))}})};
  p.spectral.V0 = {constant_field(p.space, k(1))};
  p.spectral.Z0 = {constant_field(p.space, k(1))};
  p.spectral.A0 = zero_matrix(1);
  p.spectral.alpha = 0;
  // Least stable Neumann mode cos(pi y/2 + ...) decays at pi^2/4 = 2.4674...; a rational just below it.
  p.spectral.beta = mpq_class(24674, 10000);
  p.amplitudes = {"c"};
  p.default_order = 3;
  return p;
}

ProblemSpec swift_hohenberg(bool nonlinear) {
  ProblemSpec p;
  p.reg = base_registry();
  p.space = CrossSpace::fourier(nonlinear ? 9 : 3);
  p.fields = {"u"};
  auto op = [&](std::map<int, long> coef) {
    std::map<int, CrossField> t;
    for (auto [j, c] : coef) t.emplace(j, constant_field(p.space, k(c)));
    return Operator::differential(p.space, std::move(t));
  };
  // -(1 + (d_y + d_x)^2)^2 grouped by powers of d_x.
  p.ops = {op({{0, -1}, {2, -2}, {4, -1}}), op({{1, -4}, {3, -4}}), op({{0, -2}, {2, -6}}), op({{1, -4}}),
           op({{0, -1}})};
  p.spectral.V0 = {CrossField::basis(p.space, 1), CrossField::basis(p.space, -1)};
  p.spectral.Z0 = p.spectral.V0;
  p.spectral.A0 = zero_matrix(2);
  p.spectral.alpha = 0;
  p.spectral.beta = 1;
  p.amplitudes = {"cp", "cm"};
  p.coupling_modes = 2;
  if (nonlinear) {
    p.name = "swift-hohenberg-nonlinear";
    p.description =
        "Swift-Hohenberg u_t = -(1 + d_x^2 + d_y^2)^2 u + r u - u^3, 2pi-periodic in y, r of second order";
    p.params = {{"r", 2}};
    p.perturbation = Perturbation{"r", 2};
    p.nonlinearity = {parse_multinomial("-u^3")};
    p.default_order = 2;
    p.error_offset = 2;
  } else {
    p.name = "swift-hohenberg-linear";
    p.description = "marginal Swift-Hohenberg u_t = -(1 + d_x^2 + d_y^2)^2 u, 2pi-periodic in y";
    p.default_order = 4;
  }
  return p;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"heat-exchanger-linear", "heat-exchanger-nonlinear", "shear-dispersion", "swift-hohenberg-linear",
          "swift-hohenberg-nonlinear"};
}

ProblemSpec builtin(const std::string& name) {
  if (name == "heat-exchanger-linear") return heat_exchanger(false);
  if (name == "heat-exchanger-nonlinear") return heat_exchanger(true);
  if (name == "shear-dispersion") return shear_dispersion();
  if (name == "swift-hohenberg-linear") return swift_hohenberg(false);
  if (name == "swift-hohenberg-nonlinear") return swift_hohenberg(true);
  throw ValidationError("unknown problem '" + name + "'");
}

}  // namespace slowvary::problems
