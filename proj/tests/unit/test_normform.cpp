#include <gtest/gtest.h>

#include "slowvary/error.hpp"
#include "slowvary/linreduce/linreduce.hpp"
#include "slowvary/normform/normform.hpp"

using namespace slowvary;
using namespace slowvary::normform;
using algebra::Expr;

namespace {

Expr P(const ProblemSpec& s, const char* text) { return algebra::parse_expr(s.reg, text); }

// Reference transform and separated system for the heat exchanger at N = 4, transcribed by hand.
const char* kMapC[] = {"C0-D1+D3", "C1-D2+D4", "C2-D3", "C3-D4", "C4"};
const char* kMapD[] = {
    "D0+C1-C3+5*Z[Z[c4x;-1];-1]+5*Z[Z[Z[c4x;-1];-1];-1]",
    "D1+C2-C4+5*Z[d4x;-1]+5*Z[Z[d4x;-1];-1]",
    "D2+C3-5*Z[Z[c4x;-1];-1]",
    "D3+C4-5*Z[d4x;-1]",
    "D4+5*Z[c4x;-1]",
};
const char* kRateD[] = {"-D0-D2+D4", "-D1-D3", "-D2-D4", "-D3", "-D4"};
const char* kRateC[] = {
    "C2-C4+5*Z[d4x;-1]+5*Z[Z[d4x;-1];-1]",
    "C3-5*Z[Z[c4x;-1];-1]",
    "C4-5*Z[d4x;-1]",
    "5*Z[c4x;-1]",
    "5*d4x",
};

struct HeatExchanger4 : ::testing::Test {
  ProblemSpec he = problems::builtin("heat-exchanger-linear");
  NormalForm nf = separate(he, 4);
};

}  // namespace

TEST_F(HeatExchanger4, TransformMatchesReference) {
  ASSERT_EQ(nf.map.size(), 2u);
  for (int n = 0; n <= 4; ++n) {
    EXPECT_EQ(nf.map[0][n], P(he, kMapC[n])) << "c" << n << ": " << nf.map[0][n].str();
    EXPECT_EQ(nf.map[1][n], P(he, kMapD[n])) << "d" << n << ": " << nf.map[1][n].str();
  }
}

TEST_F(HeatExchanger4, SeparatedSystemMatchesReference) {
  for (int n = 0; n <= 4; ++n) {
    EXPECT_EQ(nf.rate[0][n], P(he, kRateC[n])) << "C" << n << ": " << nf.rate[0][n].str();
    EXPECT_EQ(nf.rate[1][n], P(he, kRateD[n])) << "D" << n << ": " << nf.rate[1][n].str();
  }
}

TEST_F(HeatExchanger4, StableRatesFreeOfSlowAndCoupling) {
  for (const auto& r : nf.rate[1]) {
    EXPECT_FALSE(algebra::has_fast_time(r));
    for (const auto& [m, c] : r.terms())
      for (const auto& f : m.factors()) EXPECT_EQ(he.reg->info(f.id).name[0], 'D') << r.str();
  }
}

TEST_F(HeatExchanger4, ExactWithZeroResidual) {
  EXPECT_TRUE(check_exact(nf, he));
  for (const auto& row : transform_residuals(nf, he))
    for (const auto& e : row) EXPECT_TRUE(e.is_zero());
}

TEST_F(HeatExchanger4, PerturbedTransformFails) {
  NormalForm broken = nf;
  broken.map[1][4] = P(he, "D4");  // drop 5 Z[c4x]
  EXPECT_FALSE(check_exact(broken, he));
}

TEST_F(HeatExchanger4, IdentityOnSlowSubspace) {
  // With D = 0 and no coupling the map reduces to c_n = C_n.
  std::map<algebra::SymbolId, Expr> zero;
  for (const auto& v : nf.var[1]) zero[v] = Expr(he.reg, 0);
  for (int n = 0; n <= 4; ++n) {
    Expr c = algebra::subs(nf.map[0][n], zero);
    c = algebra::select(c, [&](const algebra::Monomial& m) { return !algebra::has_fast_time(*he.reg, m); });
    EXPECT_EQ(c, Expr::var(he.reg, nf.var[0][n]));
  }
}

TEST_F(HeatExchanger4, MeanFieldWithError) {
  auto rep = slow_pde_with_error(nf, he);
  EXPECT_EQ(rep.model, "c_t = c_xx - c_xxxx + [5*Z[Z[d4x;-1];-1]+5*Z[d4x;-1]]");
  ASSERT_FALSE(rep.estimates.empty());
  EXPECT_EQ(rep.estimates[0], "5*d4x = O(d^6 c/dx^6)");
  EXPECT_EQ(rep.transient_tag, "O(exp(-gamma*t))");
}

TEST(NormForm, ExactAcrossOrders) {
  auto he = problems::builtin("heat-exchanger-linear");
  for (int N = 1; N <= 5; ++N) EXPECT_TRUE(check_exact(separate(he, N), he)) << N;
}

TEST(NormForm, CoefficientsAgreeWithLinearReduction) {
  auto he = problems::builtin("heat-exchanger-linear");
  for (int N : {2, 3, 5}) {
    auto nf = separate(he, N);
    auto red = linreduce::reduce_linear(he, N);
    Expr slow = algebra::select(nf.rate[0][0], [&](const algebra::Monomial& m) { return !algebra::has_fast_time(*he.reg, m); });
    for (int n = 0; n <= N; ++n) EXPECT_EQ(algebra::coeff(slow, nf.var[0][n], 1), red.A[n][0][0]) << N << " " << n;
  }
}

TEST(NormForm, OrderZeroIsCouplingOnly) {
  auto he = problems::builtin("heat-exchanger-linear");
  auto rep = slow_pde_with_error(separate(he, 0), he);
  EXPECT_EQ(rep.model.rfind("c_t = coupling only", 0), 0u) << rep.model;
}
