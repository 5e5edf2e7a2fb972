#include <gtest/gtest.h>

#include "slowvary/error.hpp"
#include "slowvary/linreduce/linreduce.hpp"
#include "slowvary/nlreduce/nlreduce.hpp"

using namespace slowvary;
using namespace slowvary::nlreduce;
using algebra::Expr;

namespace {

Expr P(const ProblemSpec& s, const std::string& text) { return algebra::parse_expr(s.reg, text); }

Expr autonomous(const ProblemSpec& s, const Expr& e) {
  return algebra::select(e, [&](const algebra::Monomial& m) { return !algebra::has_fast_time(*s.reg, m); });
}

}  // namespace

TEST(NlReduce, DirectMatchesLocalManifold) {
  auto he = problems::builtin("heat-exchanger-nonlinear");
  auto sm = reduce_nonlinear_direct(he, 2);
  const char* d[] = {
      "-1/2*c0^2+c1+3/8*c0^4-3*c0^2*c1+3/2*c1^2+3*c0*c2-3*Z[Z[c2x;-1];-1]-9*c0*Z[d2x;-1]-9*c0*Z[Z[d2x;-1];-1]",
      "-c0*c1+c2-3*Z[d2x;-1]+6*c0*Z[Z[c2x;-1];-1]",
      "-c1^2-c0*c2+3*Z[c2x;-1]+3*c0*Z[d2x;-1]",
  };
  const char* g[] = {
      "c2-2*c0*c1+1/2*c0^3-3*Z[d2x;-1]+9*c0*Z[Z[c2x;-1];-1]",
      "-2*c0*c2-2*c1^2+3/2*c0^2*c1+3*Z[c2x;-1]+6*c0*Z[d2x;-1]",
      "3*d2x-3*c0*Z[c2x;-1]",
  };
  for (int n = 0; n <= 2; ++n) {
    EXPECT_EQ(unit_small(he, sm.coef_manifold[1][n]), P(he, d[n])) << "d" << n;
    EXPECT_EQ(unit_small(he, sm.coef_evolution[0][n]), P(he, g[n])) << "c" << n;
  }
}

TEST(NlReduce, GeneratingMatchesManifoldAndEvolution) {
  // Published forms of this expansion drop the factor c on two xi^2 terms and
  // give 1 for the xi c ZZc2x coefficient; the forms below follow from the
  // direct construction (d1, d2 and c2_t above).
  auto he = problems::builtin("heat-exchanger-nonlinear");
  auto sm = reduce_nonlinear(he, 2);
  Expr d = unit_small(he, sm.field.at(1));
  EXPECT_EQ(d, P(he,
                 "(-1/2*c^2+c_x) + (3/8*c^4-3*c^2*c_x+3/2*c_x^2+3*c*c_xx-c_xxx)"
                 " + (xi^2/2*3*Z[c2x;-1] - xi*3*Z[d2x;-1] + xi^2/2*3*c*Z[d2x;-1] - 3*Z[Z[c2x;-1];-1]"
                 " + 6*xi*c*Z[Z[c2x;-1];-1] - 9*c*Z[d2x;-1] - 9*c*Z[Z[d2x;-1];-1])"))
      << d.str();
  Expr g = unit_small(he, sm.evolution.at(0));
  EXPECT_EQ(g, P(he,
                 "(1/2*c^3-2*c*c_x+c_xx) + (xi^2/2*3*d2x + xi*3*Z[c2x;-1] - xi^2/2*3*c*Z[c2x;-1]"
                 " - 3*Z[d2x;-1] + xi*6*c*Z[d2x;-1] + 9*c*Z[Z[c2x;-1];-1])"))
      << g.str();
  EXPECT_EQ(unit_small(he, sm.field.at(0)), P(he, "c"));
}

TEST(NlReduce, ResidualVanishesInTruncatedRing) {
  for (const char* name : {"heat-exchanger-nonlinear", "swift-hohenberg-nonlinear"}) {
    auto s = problems::builtin(name);
    auto sm = reduce_nonlinear(s, 2);
    EXPECT_TRUE(generating_residual(s, sm).is_zero()) << name;
  }
}

TEST(NlReduce, GeneratingAgreesWithDirect) {
  auto he = problems::builtin("heat-exchanger-nonlinear");
  for (int N : {2, 3, 4, 5}) {
    auto gen = reduce_nonlinear(he, N);
    auto dir = reduce_nonlinear_direct(he, N);
    auto rep = extract_taylor_compare(he, gen, dir);
    EXPECT_TRUE(rep.empty()) << "N=" << N << ": " << (rep.empty() ? "" : rep.diffs[0]);
  }
}

TEST(NlReduce, CorruptedDirectCoefficientGivesOneDiff) {
  auto he = problems::builtin("heat-exchanger-nonlinear");
  auto gen = reduce_nonlinear(he, 2);
  auto dir = reduce_nonlinear_direct(he, 2);
  dir.coef_evolution[0][1] += P(he, "c0^2");
  auto rep = extract_taylor_compare(he, gen, dir);
  EXPECT_EQ(rep.diffs.size(), 1u);
}

TEST(NlReduce, CouplingAssembly) {
  auto he = problems::builtin("heat-exchanger-nonlinear");
  auto ct = assemble_coupling(he, 2);
  EXPECT_EQ(unit_small(he, ct.field.at(0)), P(he, "3/2*xi^2*d2x"));
  EXPECT_EQ(unit_small(he, ct.field.at(1)), P(he, "3/2*xi^2*c2x"));

  auto only_l0 = problems::builtin("heat-exchanger-nonlinear");
  only_l0.ops.resize(1);
  EXPECT_TRUE(assemble_coupling(only_l0, 2).field.is_zero());

  // Swift-Hohenberg: L1..L4 all contribute.
  auto sh = problems::builtin("swift-hohenberg-nonlinear");
  EXPECT_GT(assemble_coupling(sh, 2).terms, 4);
}

TEST(NlReduce, SwiftHohenbergAmplitudes) {
  auto sh = problems::builtin("swift-hohenberg-nonlinear");
  auto sm = reduce_nonlinear(sh, 2);
  auto station = at_station(sh, sm.field);
  EXPECT_EQ(station.at(3), P(sh, "-1/64*cp^3"));
  EXPECT_EQ(station.at(-3), P(sh, "-1/64*cm^3"));
  auto rep = emit_model(sm, sh);
  ASSERT_EQ(rep.evolution.size(), 2u);
  EXPECT_EQ(P(sh, rep.evolution[0].second), P(sh, "r*cp - 3*cm*cp^2 + 4*cp_xx - 6*u2_p1_xx - 12*i*u2_p1_x"));
  EXPECT_EQ(P(sh, rep.evolution[1].second), P(sh, "r*cm - 3*cp*cm^2 + 4*cm_xx - 6*u2_m1_xx + 12*i*u2_m1_x"));
  EXPECT_EQ(station.at(0), P(sh, "24*Z[Z[u2_0_xx;-1];-1] + 30*Z[Z[u2_0_xxxx;-1];-1] - 6*Z[u2_0_xx;-1]")) << station.at(0).str();
}

TEST(NlReduce, SwiftHohenbergSingleHarmonicCoupling) {
  auto sh = problems::builtin("swift-hohenberg-nonlinear");
  sh.coupling_modes = 1;
  auto sm = reduce_nonlinear(sh, 2);
  Expr u0 = unit_small(sh, sm.field.at(0));
  EXPECT_EQ(u0, P(sh,
                  "24*Z[Z[u2_0_xx;-1];-1] + 30*Z[Z[u2_0_xxxx;-1];-1] - 6*Z[u2_0_xx;-1]"
                  " - xi*Z[6*u2_0_x + 10*u2_0_xxx;-1] - xi^2/2*Z[12*u2_0_xx + 15*u2_0_xxxx;-1]"))
      << u0.str();
}

TEST(NlReduce, BurgersLikeModel) {
  auto he = problems::builtin("heat-exchanger-nonlinear");
  auto rep = emit_model(reduce_nonlinear(he, 2), he);
  EXPECT_EQ(rep.model, "c_t = c_xx-2*c*c_x+1/2*c^3 + [-3*Z[d2x;-1]+9*c*Z[Z[c2x;-1];-1]]");
  EXPECT_EQ(rep.estimates.at(0), "residual = O(|u|^5)");
}

TEST(NlReduce, GinzburgLandauModel) {
  auto sh = problems::builtin("swift-hohenberg-nonlinear");
  auto rep = emit_model(reduce_nonlinear(sh, 2), sh);
  EXPECT_EQ(rep.model.substr(0, rep.model.find(" + [")), "cp_t = 4*cp_xx+cp*r-3*cm*cp^2");
}

TEST(NlReduce, AutonomousPartIndependentOfCoupling) {
  auto he = problems::builtin("heat-exchanger-nonlinear");
  auto with = reduce_nonlinear(he, 3);
  NonlinearOptions off;
  off.coupling = false;
  auto without = reduce_nonlinear(he, 3, off);
  EXPECT_EQ(autonomous(he, with.evolution[0]), without.evolution[0]);
  EXPECT_EQ(autonomous(he, with.field.at(1)), without.field.at(1));
}

TEST(NlReduce, LinearPartMatchesLinearReduction) {
  auto he = problems::builtin("heat-exchanger-nonlinear");
  const int N = 4;
  auto rep = emit_model(reduce_nonlinear(he, N), he);
  auto red = linreduce::reduce_linear(he, N);
  std::map<std::string, std::string> got(rep.coefficients.begin(), rep.coefficients.end());
  for (int n = 0; n <= N; ++n) {
    auto it = got.find("c:A" + std::to_string(n));
    const std::string have = it == got.end() ? "0" : it->second;
    EXPECT_EQ(P(he, have), red.A[n][0][0]) << n;
  }
}

TEST(NlReduce, ZeroNonlinearityReproducesLinearModel) {
  auto he = problems::builtin("heat-exchanger-linear");
  const int N = 4;
  auto rep = emit_model(reduce_nonlinear(he, N), he);
  auto lin = linreduce::emit_slow_pde(linreduce::reduce_linear(he, N), he);
  EXPECT_EQ(rep.model.substr(0, rep.model.find(" + [")), "c_t = c_xx-c_xxxx") << rep.model;
  EXPECT_EQ(lin.model, "c_t = c_xx - c_xxxx + coupling");
}

TEST(NlReduce, GradingSoundness) {
  // Every term of the direct evolution of c_n carries weight >= n + 1.
  auto he = problems::builtin("heat-exchanger-nonlinear");
  auto sm = reduce_nonlinear_direct(he, 3);
  for (std::size_t n = 0; n < sm.coef_evolution[0].size(); ++n) {
    Expr weighted = sm.coef_evolution[0][n] * P(he, "small").pow(static_cast<unsigned>(n + 1));
    for (const auto& [m, c] : weighted.terms()) EXPECT_GE(he.reg->weighted_degree(m), static_cast<int>(n + 1));
  }
}
