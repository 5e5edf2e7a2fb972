#include <random>

#include <gtest/gtest.h>

#include "slowvary/crosssec/spectral.hpp"
#include "slowvary/error.hpp"
#include "slowvary/problems/problem.hpp"

using namespace slowvary;
using namespace slowvary::crosssec;
using algebra::Expr;
using algebra::Scalar;

namespace {

Expr P(const problems::ProblemSpec& s, const char* text) { return algebra::parse_expr(s.reg, text); }

// Field with y^k coefficients from an expression in y.
CrossField y_poly(const problems::ProblemSpec& s, const Expr& e) {
  CrossField f(s.space);
  auto y = s.reg->symbol("y");
  for (int k = 0; k <= s.space.cap; ++k) {
    Expr c = algebra::coeff(e, y, k);
    if (!c.is_zero()) f.set(k, c);
  }
  return f;
}

}  // namespace

TEST(CrossSec, NeumannPairing) {
  auto shear = problems::builtin("shear-dispersion");
  auto one = CrossField::basis(shear.space, 0);
  EXPECT_EQ(inner(one, one), Expr(shear.reg, Scalar(1)));
  EXPECT_EQ(inner(one, CrossField::basis(shear.space, 2)), Expr(shear.reg, Scalar(1, 3)));
  EXPECT_TRUE(inner(one, CrossField::basis(shear.space, 1)).is_zero());
}

TEST(CrossSec, FourierPairingConjugatesLeft) {
  auto sh = problems::builtin("swift-hohenberg-linear");
  auto e1 = CrossField::basis(sh.space, 1);
  auto em1 = CrossField::basis(sh.space, -1);
  EXPECT_EQ(inner(e1, e1), Expr(sh.reg, Scalar(1)));
  EXPECT_TRUE(inner(e1, em1).is_zero());
  auto ie1 = CrossField::basis(sh.space, 1, Expr(sh.reg, Scalar::i()));
  EXPECT_EQ(inner(ie1, e1), Expr(sh.reg, -Scalar::i()));
}

TEST(CrossSec, MismatchedSpacesThrow) {
  auto sh = problems::builtin("swift-hohenberg-linear");
  auto he = problems::builtin("heat-exchanger-linear");
  EXPECT_THROW(inner(CrossField::basis(sh.space, 1), CrossField::basis(he.space, 0)), Error);
}

TEST(CrossSec, HeatExchangerL0) {
  auto he = problems::builtin("heat-exchanger-linear");
  auto v = he.L(0).apply(CrossField::basis(he.space, 1));
  EXPECT_EQ(v, CrossField::basis(he.space, 1, Expr(he.reg, Scalar(-1))));
}

TEST(CrossSec, ShearAdvectionProfile) {
  auto shear = problems::builtin("shear-dispersion");
  auto v = shear.L(1).apply(CrossField::basis(shear.space, 0));
  EXPECT_EQ(v, y_poly(shear, P(shear, "-3/2*Pe*(1-y^2)")));
}

TEST(CrossSec, SwiftHohenbergSymbol) {
  auto sh = problems::builtin("swift-hohenberg-linear");
  for (int k = -3; k <= 3; ++k) {
    const long s = 1 - k * k;
    EXPECT_EQ(sh.L(0).symbol(k), Expr(sh.reg, Scalar(-s * s))) << k;
    EXPECT_EQ(sh.L(0).apply(CrossField::basis(sh.space, k)), CrossField::basis(sh.space, k, Expr(sh.reg, Scalar(-s * s))));
  }
}

TEST(CrossSec, LinvNeumannShear) {
  auto shear = problems::builtin("shear-dispersion");
  auto rhs = y_poly(shear, P(shear, "Pe*(1/2 - 3/2*y^2)"));
  auto v = linv_solve(shear.L(0), shear.spectral, rhs);
  EXPECT_EQ(v, y_poly(shear, P(shear, "Pe*(-7/120 + y^2/4 - y^4/8)")));
  EXPECT_TRUE(satisfies_neumann(v));
}

TEST(CrossSec, LinvHeatExchanger) {
  auto he = problems::builtin("heat-exchanger-linear");
  auto rhs = CrossField::basis(he.space, 1, Expr(he.reg, Scalar(-1)));
  EXPECT_EQ(linv_solve(he.L(0), he.spectral, rhs), CrossField::basis(he.space, 1));
}

TEST(CrossSec, LinvRejectsSlowContent) {
  auto he = problems::builtin("heat-exchanger-linear");
  EXPECT_THROW(linv_solve(he.L(0), he.spectral, CrossField::basis(he.space, 0)), ConstructionError);
}

TEST(CrossSec, TimeDependentForcingMakesHistory) {
  auto sh = problems::builtin("swift-hohenberg-linear");
  sh.reg->coupling("w");
  auto rhs = CrossField::basis(sh.space, 0, P(sh, "w"));
  auto upd = stable_update(sh.L(0), sh.spectral, rhs);
  EXPECT_EQ(upd.at(0), P(sh, "Z[w;-1]"));
  // linv_solve is the negative: L0 v - dv/dt = rhs.
  EXPECT_EQ(linv_solve(sh.L(0), sh.spectral, rhs).at(0), -P(sh, "Z[w;-1]"));
}

TEST(CrossSec, SpectralChecksOfBuiltins) {
  for (const auto& name : problems::builtin_names()) {
    auto s = problems::builtin(name);
    EXPECT_NO_THROW(spectral_check(s.L(0), s.spectral, 4)) << name;
  }
  auto he = problems::builtin("heat-exchanger-linear");
  auto rep = spectral_check(he.L(0), he.spectral, 4);
  ASSERT_EQ(rep.stable.size(), 1u);
  EXPECT_DOUBLE_EQ(rep.stable[0], -1.0);
}

TEST(CrossSec, BrokenEigendataRejected) {
  auto he = problems::builtin("heat-exchanger-linear");
  auto sd = he.spectral;
  sd.V0[0] = CrossField::basis(he.space, 1);
  EXPECT_THROW(spectral_check(he.L(0), sd, 2), ValidationError);
}

TEST(CrossSec, NeumannSelfAdjoint) {
  auto shear = problems::builtin("shear-dispersion");
  std::mt19937 rng(5);
  std::uniform_int_distribution<int> c(-4, 4);
  auto random_neumann = [&] {
    // q(y)(1-y^2)^2 + a has zero slope at y = +-1.
    Expr q(shear.reg, Scalar(c(rng)));
    for (int k = 1; k <= 4; ++k) q += Expr(shear.reg, Scalar(c(rng))) * Expr::var(shear.reg, "y", k);
    return y_poly(shear, q * P(shear, "(1-y^2)^2") + Expr(shear.reg, Scalar(c(rng))));
  };
  for (int trial = 0; trial < 20; ++trial) {
    auto z = random_neumann(), v = random_neumann();
    ASSERT_TRUE(satisfies_neumann(z));
    EXPECT_EQ(inner(z.dy(2), v), inner(z, v.dy(2)));
  }
}

TEST(CrossSec, DegreeCapOverflowIsAnError) {
  auto shear = problems::builtin("shear-dispersion");
  EXPECT_THROW(CrossField::basis(shear.space, shear.space.cap + 1), Error);
}
