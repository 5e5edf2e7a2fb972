#include <random>

#include <gtest/gtest.h>

#include "slowvary/algebra/expr.hpp"
#include "slowvary/error.hpp"

using namespace slowvary::algebra;
using slowvary::AlgebraError;

namespace {

struct Ring {
  RegistryPtr reg = Registry::create();
  Expr parse(const char* s) { return parse_expr(reg, s); }
};

// Random polynomial in x, y, z with small integer and rational coefficients.
Expr random_poly(const RegistryPtr& reg, std::mt19937& rng) {
  std::uniform_int_distribution<int> coef(-5, 5), den(1, 3), deg(0, 3), nterms(1, 4);
  Expr e(reg, Scalar(0));
  for (int t = nterms(rng); t > 0; --t) {
    Expr m(reg, Scalar(coef(rng), den(rng)));
    for (const char* v : {"x", "y", "z"}) m *= Expr::var(reg, v, deg(rng));
    e += m;
  }
  return e;
}

}  // namespace

TEST(Algebra, MonomialProduct) {
  Ring r;
  EXPECT_EQ(r.parse("1/2*c0^2") * r.parse("c0"), r.parse("1/2*c0^3"));
  EXPECT_EQ(r.parse("1+2/105*Pe^2") + Expr(r.reg, Scalar(0)), r.parse("1+2/105*Pe^2"));
}

TEST(Algebra, LongMultiplicationConstantTerm) {
  Ring r;
  Expr p = r.parse("(-7/120 + y^2/4 - y^4/8)*3/2*(1 - y^2)");
  EXPECT_EQ(p.constant_term(), Scalar(-7, 80));
  // Full expansion by hand: -7/80 + (7/80+3/8) y^2 + (-3/8-3/16) y^4 + 3/16 y^6.
  EXPECT_EQ(p, r.parse("-7/80 + 37/80*y^2 - 9/16*y^4 + 3/16*y^6"));
}

TEST(Algebra, RingLawsOnRandomTriples) {
  Ring r;
  std::mt19937 rng(12345);
  for (int trial = 0; trial < 50; ++trial) {
    Expr a = random_poly(r.reg, rng), b = random_poly(r.reg, rng), c = random_poly(r.reg, rng);
    EXPECT_EQ((a * b) * c, a * (b * c));
    EXPECT_EQ(a * (b + c), a * b + a * c);
    EXPECT_EQ(a + b, b + a);
    EXPECT_TRUE((a - a).is_zero());
  }
}

TEST(Algebra, CanonicalNoZeroTerms) {
  Ring r;
  Expr e = r.parse("x + y - x");
  EXPECT_EQ(e.size(), 1u);
  EXPECT_EQ(e.str(), "y");
}

TEST(Algebra, MismatchedRegistriesThrow) {
  Ring a, b;
  EXPECT_THROW(a.parse("x") + b.parse("x"), AlgebraError);
}

TEST(Algebra, TruncationExamples) {
  Ring r;
  r.reg->set_weight(r.reg->symbol("eps"), 1);
  r.reg->set_weight(r.reg->symbol("xi"), 1);
  EXPECT_TRUE(r.parse("eps^4*c0").truncated(4).is_zero());
  EXPECT_TRUE(r.parse("eps^2*xi^2").truncated(4).is_zero());
  EXPECT_EQ(r.parse("eps*xi^2").truncated(4), r.parse("eps*xi^2"));
  Expr e = r.parse("1 + eps + eps^3*xi + xi^5");
  EXPECT_EQ(e.truncated(4).truncated(4), e.truncated(4));
}

TEST(Algebra, TruncationIsAnIdeal) {
  Ring r;
  r.reg->set_weight(r.reg->symbol("x"), 1);
  r.reg->set_weight(r.reg->symbol("y"), 2);
  std::mt19937 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    Expr a = random_poly(r.reg, rng), b = random_poly(r.reg, rng);
    for (int bound : {2, 4, 6}) EXPECT_EQ((a * b).truncated(bound), (a.truncated(bound) * b.truncated(bound)).truncated(bound));
  }
}

TEST(Algebra, ActiveBoundAppliesToProducts) {
  Ring r;
  r.reg->set_weight(r.reg->symbol("eps"), 1);
  Expr a = r.parse("1 + eps^2");
  {
    TruncationScope scope(*r.reg, 3);
    EXPECT_EQ(a * a, r.parse("1 + 2*eps^2"));
  }
  EXPECT_EQ(a * a, r.parse("1 + 2*eps^2 + eps^4"));
}

TEST(Algebra, DiffInXi) {
  Ring r;
  SymbolId xi = r.reg->symbol("xi");
  EXPECT_EQ(diff(r.parse("xi^2/2*c2"), xi), r.parse("xi*c2"));
  // d/dxi of sum c_n xi^n/n! shifts the coefficients down.
  Expr g = r.parse("c0 + c1*xi + c2*xi^2/2 + c3*xi^3/6");
  EXPECT_EQ(diff(g, xi), r.parse("c1 + c2*xi + c3*xi^2/2"));
  // History atoms are constants in xi.
  EXPECT_EQ(diff(r.parse("xi*Z[w;-1]"), xi), r.parse("Z[w;-1]"));
}

TEST(Algebra, DiffUnknownVariableThrows) {
  Ring r;
  Expr e = r.parse("x");
  EXPECT_THROW(diff(e, 999), AlgebraError);
}

TEST(Algebra, CoeffAndSubs) {
  Ring r;
  SymbolId x = r.reg->symbol("x");
  Expr e = r.parse("3*x^2*y + x - 5");
  EXPECT_EQ(coeff(e, x, 2), r.parse("3*y"));
  EXPECT_EQ(coeff(e, x, 0), r.parse("-5"));
  EXPECT_EQ(subs(e, {{x, r.parse("y+1")}}), r.parse("3*(y+1)^2*y + y + 1 - 5"));
}

TEST(Algebra, EvaluateNumerically) {
  Ring r;
  Expr e = r.parse("2*x^2 - i*y");
  SymbolId x = *r.reg->find("x");
  auto v = evaluate(e, [&](SymbolId id) { return id == x ? std::complex<double>(3) : std::complex<double>(2); });
  EXPECT_DOUBLE_EQ(v.real(), 18);
  EXPECT_DOUBLE_EQ(v.imag(), -2);
}

TEST(Parser, RoundTripOnCanonicalPrinter) {
  Ring r;
  for (const char* s :
       {"c_xx-2*c*c_x+1/2*c^3", "-3*Z[d2x;-1]+9*c*Z[Z[c2x;-1];-1]", "4*cp_xx-12*i*u2_p1_x-6*u2_p1_xx+cp*r",
        "(1+2*i)*x^3*y-7/3", "5*Z[Z[d4x;-1];-1]+5*Z[d4x;-1]", "Z[u2_m2_x;-9]*xi^2"}) {
    Expr e = r.parse(s);
    Expr back = r.parse(e.str().c_str());
    EXPECT_EQ(back, e) << s;
    EXPECT_EQ(back.str(), e.str());
  }
}

TEST(Parser, RandomRoundTrip) {
  Ring r;
  std::mt19937 rng(99);
  for (int trial = 0; trial < 100; ++trial) {
    Expr e = random_poly(r.reg, rng) * r.parse("i + 1/3");
    EXPECT_EQ(r.parse(e.str().c_str()), e);
  }
}

TEST(Parser, ErrorsCarryOffset) {
  Ring r;
  try {
    r.parse("c^");
    FAIL() << "expected a parse error";
  } catch (const slowvary::ParseError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
  EXPECT_THROW(r.parse("Z[w;1]"), slowvary::ParseError);
  EXPECT_THROW(r.parse("x +"), slowvary::ParseError);
  EXPECT_THROW(r.parse("(x"), slowvary::ParseError);
}
