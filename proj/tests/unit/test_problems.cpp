#include <gtest/gtest.h>

#include "slowvary/error.hpp"
#include "slowvary/problems/problem.hpp"

using namespace slowvary;
using namespace slowvary::problems;
using algebra::Expr;
using algebra::Scalar;

namespace {
Expr P(const ProblemSpec& s, const char* text) { return algebra::parse_expr(s.reg, text); }
}  // namespace

TEST(Problems, FiveBuiltins) {
  auto names = builtin_names();
  EXPECT_EQ(names.size(), 5u);
  for (const auto& n : names) EXPECT_EQ(builtin(n).name, n);
  EXPECT_THROW(builtin("nosuch"), ValidationError);
}

TEST(Problems, NonlinearHeatExchanger) {
  auto p = builtin("heat-exchanger-nonlinear");
  EXPECT_EQ(p.fields, (std::vector<std::string>{"c", "d"}));
  EXPECT_EQ(p.L(0).mat()[0][0], P(p, "0"));
  EXPECT_EQ(p.L(0).mat()[1][1], P(p, "-1"));
  EXPECT_EQ(p.L(1).mat()[0][1], P(p, "1"));
  EXPECT_EQ(p.L(1).mat()[1][0], P(p, "1"));
  ASSERT_EQ(p.nonlinearity.size(), 2u);
  EXPECT_EQ(p.nonlinearity[0], parse_multinomial("-c*d"));
  EXPECT_EQ(p.nonlinearity[1], parse_multinomial("-1/2*(c^2+d^2)"));
  EXPECT_FALSE(p.is_linear());
}

TEST(Problems, ShearStack) {
  auto p = builtin("shear-dispersion");
  EXPECT_EQ(p.space.kind, crosssec::SpaceKind::NeumannChannel);
  EXPECT_EQ(p.stack_size(), 3);
  EXPECT_TRUE(p.is_linear());
}

TEST(Problems, SwiftHohenbergNonlinear) {
  auto p = builtin("swift-hohenberg-nonlinear");
  EXPECT_EQ(p.space.kind, crosssec::SpaceKind::PeriodicFourier);
  EXPECT_EQ(p.stack_size(), 5);
  ASSERT_EQ(p.nonlinearity.size(), 1u);
  EXPECT_EQ(p.nonlinearity[0], parse_multinomial("-u^3"));
  ASSERT_EQ(p.params.size(), 1u);
  EXPECT_EQ(p.params[0].name, "r");
  EXPECT_EQ(p.params[0].weight, 2);
}

TEST(Multinomial, ParseExamples) {
  auto m = parse_multinomial("-1/2*(c^2+d^2)");
  ASSERT_EQ(m.terms().size(), 2u);
  for (const auto& t : m.terms()) EXPECT_EQ(t.coef, Scalar(-1, 2));
  auto cubic = parse_multinomial("-u^3");
  ASSERT_EQ(cubic.terms().size(), 1u);
  EXPECT_EQ(cubic.max_degree(), 3);
  auto deriv = parse_multinomial("u*u_xx - 2*u_x^2");
  EXPECT_EQ(deriv.max_deriv(), 2);
  EXPECT_EQ(deriv.min_degree(), 2);
}

TEST(Multinomial, SyntaxErrorOffset) {
  try {
    parse_multinomial("c^");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
}

TEST(Multinomial, LinearTermsRejected) {
  EXPECT_THROW(parse_multinomial("u"), ValidationError);
  EXPECT_THROW(parse_multinomial("u^2 + 3"), ValidationError);
  EXPECT_NO_THROW(parse_multinomial_raw("u"));
}

TEST(Multinomial, PrintParseStable) {
  for (const char* s : {"-c*d", "-1/2*(c^2+d^2)", "u*u_xx - 2*u_x^2 + 1/3*u^5"}) {
    auto m = parse_multinomial(s);
    EXPECT_EQ(parse_multinomial(m.str()), m) << m.str();
  }
}

TEST(Problems, ValidateAllBuiltins) {
  for (const auto& n : builtin_names()) {
    auto p = builtin(n);
    EXPECT_NO_THROW(validate_spec(p, p.default_order)) << n;
    EXPECT_NO_THROW(validate_spec(p, 4)) << n;
  }
}

TEST(Problems, LinearNonlinearityRejected) {
  auto p = builtin("heat-exchanger-nonlinear");
  p.nonlinearity[0] = parse_multinomial_raw("c");
  EXPECT_THROW(validate_spec(p, 2), ValidationError);
}

TEST(Problems, SetParam) {
  auto p = builtin("shear-dispersion");
  p.set_param("pe", "2");
  auto v = p.L(1).apply(crosssec::CrossField::basis(p.space, 0));
  EXPECT_EQ(v.at(0), P(p, "-3"));
  auto q = builtin("shear-dispersion");
  q.set_param("Pe", "Q");
  EXPECT_EQ(q.L(1).apply(crosssec::CrossField::basis(q.space, 0)).at(0), P(q, "-3/2*Q"));
}

TEST(Problems, IniFile) {
  auto lp = load_problem_text(
      "[problem]\nname = heat-exchanger-nonlinear\norder = 3\n"
      "[nonlinearity]\nc = \"-c*d\"\nd = \"-c^2\"\n");
  ASSERT_TRUE(lp.order);
  EXPECT_EQ(*lp.order, 3);
  EXPECT_EQ(lp.spec.nonlinearity[1], parse_multinomial("-c^2"));
  auto sh = load_problem_text("[problem]\nname = swift-hohenberg-nonlinear\n[coupling]\nmodes = 1\n");
  EXPECT_EQ(sh.spec.coupling_modes, 1);
  EXPECT_THROW(load_problem_text("[problem]\nname = heat-exchanger-linear\n[bogus]\nx = 1\n"), ValidationError);
  EXPECT_THROW(load_problem_text("[params]\nPe = 1\n"), ValidationError);
  EXPECT_THROW(resolve_problem("nosuch"), ValidationError);
}

TEST(Problems, CouplingNames) {
  auto he = builtin("heat-exchanger-linear");
  EXPECT_EQ(coupling_name(he, 4, 0, 1), "c4x");
  EXPECT_EQ(coupling_name(he, 4, 1, 2), "d4xx");
  auto sh = builtin("swift-hohenberg-nonlinear");
  EXPECT_EQ(coupling_name(sh, 2, 1, 2), "u2_p1_xx");
  EXPECT_EQ(coupling_name(sh, 2, -1, 1), "u2_m1_x");
}
