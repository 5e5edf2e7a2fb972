#include <cmath>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <gtest/gtest.h>

#include "slowvary/error.hpp"
#include "slowvary/linreduce/linreduce.hpp"
#include "slowvary/verify/experiments.hpp"

using namespace slowvary;
using namespace slowvary::verify;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Heat exchanger with an x-mode e^{ikx}: d/dt (c, d) = [[0, ik], [ik, -1]] (c, d).
Eigen::Matrix2cd he_symbol(double k) {
  Eigen::Matrix2cd m;
  m << 0.0, cplx(0, k), cplx(0, k), -1.0;
  return m;
}

SimConfig single_mode(double length, int wave, double dt, double tmax) {
  SimConfig cfg;
  cfg.length = length;
  cfg.grid = 32;
  cfg.dt = dt;
  cfg.tmax = tmax;
  cfg.ic.modes = {{0, wave, 1.0, false}};
  return cfg;
}

double last(const SimResult& r, const std::string& key) { return r.diagnostics.at(key).back(); }

}  // namespace

TEST(Dispersion, HeatExchangerClosedForm) {
  auto he = problems::builtin("heat-exchanger-linear");
  for (double k : {0.01, 0.1, 0.3, 0.45}) {
    const double closed = (-1 + std::sqrt(1 - 4 * k * k)) / 2;
    EXPECT_NEAR(dispersion_oracle(he, k).real(), closed, 1e-12) << k;
    EXPECT_NEAR(dispersion_oracle(he, k).imag(), 0.0, 1e-12) << k;
  }
  EXPECT_THROW(dispersion_oracle(he, 0.6), NumericsError);
}

TEST(Dispersion, SwiftHohenbergModelIsExact) {
  auto sh = problems::builtin("swift-hohenberg-linear");
  auto red = linreduce::reduce_linear(sh, 4);
  for (double k : {-0.3, -0.05, 0.02, 0.2, 0.5}) {
    const double exact = -std::pow(2 * k + k * k, 2);
    EXPECT_NEAR(dispersion_oracle(sh, k).real(), exact, 1e-12) << k;
    EXPECT_NEAR(std::abs(model_symbol(red, k) - exact), 0.0, 1e-12) << k;
  }
  auto tab = dispersion_experiment(sh, 4, -0.3, 0.3, 9);
  EXPECT_LT(tab.max_err, 1e-12);
  EXPECT_EQ(tab.csv().substr(0, tab.csv().find('\n')), "k,lambda_full,lambda_model,abs_err");
}

TEST(Dispersion, ErrorScalingSlopes) {
  auto he = problems::builtin("heat-exchanger-linear");
  auto s2 = error_scaling_experiment(he, 2, 0.02, 0.1, 8);
  auto s4 = error_scaling_experiment(he, 4, 0.02, 0.1, 8);
  EXPECT_NEAR(s2.slope, 4.0, 0.3);
  EXPECT_NEAR(s4.slope, 6.0, 0.3);
  EXPECT_GT(s4.r2, 0.99);
  EXPECT_FALSE(s4.exact);
  auto sh = problems::builtin("swift-hohenberg-linear");
  EXPECT_TRUE(error_scaling_experiment(sh, 4, 0.02, 0.1, 8).exact);
}

TEST(Dispersion, ShearNeedsNumericPeclet) {
  auto shear = problems::builtin("shear-dispersion");
  EXPECT_THROW(dispersion_oracle(shear, 0.1), NumericsError);
}

TEST(FitLine, RecoversSlope) {
  std::vector<double> x{0, 1, 2, 3}, y{1, 3, 5, 7};
  auto f = fit_line(x, y);
  EXPECT_NEAR(f.slope, 2, 1e-12);
  EXPECT_NEAR(f.intercept, 1, 1e-12);
  EXPECT_NEAR(f.r2, 1, 1e-12);
}

TEST(FullSim, SingleModeMatchesMatrixExponential) {
  auto he = problems::builtin("heat-exchanger-linear");
  const double length = 2 * kPi / 0.5;
  auto res = simulate_full(he, single_mode(length, 1, 0.01, 3));
  Eigen::Vector2cd v = (he_symbol(0.5) * 3.0).exp() * Eigen::Vector2cd(1, 0);
  EXPECT_NEAR(last(res, "amp_c_0_1"), std::abs(v(0)), 1e-8);
}

TEST(FullSim, CentredDifferencesCrossCheck) {
  auto he = problems::builtin("heat-exchanger-linear");
  Eigen::Vector2cd v = (he_symbol(0.5) * 3.0).exp() * Eigen::Vector2cd(1, 0);
  auto err = [&](int grid) {
    auto cfg = single_mode(2 * kPi / 0.5, 1, 0.01, 3);
    cfg.grid = grid;
    cfg.scheme = Scheme::Centred;
    return std::abs(last(simulate_full(he, cfg), "amp_c_0_1") - std::abs(v(0)));
  };
  // Second order in dx.
  const double e64 = err(64), e128 = err(128);
  EXPECT_LT(e64, 2e-3);
  EXPECT_NEAR(e64 / e128, 4.0, 0.4);
}

TEST(FullSim, Rk4ConvergesAtFourthOrder) {
  auto he = problems::builtin("heat-exchanger-linear");
  const double length = 2 * kPi;
  Eigen::Vector2cd v = (he_symbol(1.0) * 2.0).exp() * Eigen::Vector2cd(1, 0);
  auto err = [&](double dt) { return std::abs(last(simulate_full(he, single_mode(length, 1, dt, 2)), "amp_c_0_1") - std::abs(v(0))); };
  const double ratio = err(0.1) / err(0.05);
  EXPECT_GE(ratio, 12);
  EXPECT_LE(ratio, 20);
}

TEST(FullSim, ConservesMeanOfC) {
  auto he = problems::builtin("heat-exchanger-nonlinear");
  SimConfig cfg;
  cfg.grid = 64;
  cfg.tmax = 2;
  cfg.ic.seed = 3;
  cfg.record_stride = 50;
  auto lin = problems::builtin("heat-exchanger-linear");
  auto res = simulate_full(lin, cfg);
  const auto& ints = res.diagnostics.at("int_c");
  for (double v : ints) EXPECT_NEAR(v, ints.front(), 1e-10);
  EXPECT_NO_THROW(simulate_full(he, cfg));
}

TEST(FullSim, ZeroStaysZero) {
  auto he = problems::builtin("heat-exchanger-nonlinear");
  SimConfig cfg;
  cfg.grid = 32;
  cfg.tmax = 1;
  auto res = simulate_full(he, cfg);
  EXPECT_EQ(last(res, "l2_c"), 0.0);
  EXPECT_EQ(last(res, "l2_d"), 0.0);
}

TEST(FullSim, SwiftHohenbergNeutralRoll) {
  auto sh = problems::builtin("swift-hohenberg-linear");
  SimConfig cfg;
  cfg.grid = 16;
  cfg.tmax = 1;
  cfg.grid_y = 8;
  cfg.dt = 5e-3;
  cfg.ic.modes = {{1, 0, 0.5, false}};
  auto res = simulate_full(sh, cfg);
  const auto& amp = res.diagnostics.at("amp_u_1_0");
  EXPECT_NEAR(amp.front(), 0.5, 1e-12);
  EXPECT_NEAR(amp.back(), 0.5, 1e-10);
}

TEST(FullSim, UnstableStepRejected) {
  auto sh = problems::builtin("swift-hohenberg-linear");
  SimConfig cfg;
  cfg.grid = 16;
  cfg.tmax = 1;
  cfg.dt = 0.5;
  EXPECT_THROW(simulate_full(sh, cfg), NumericsError);
}

TEST(FullSim, BadGridRejected) {
  auto he = problems::builtin("heat-exchanger-linear");
  SimConfig cfg;
  cfg.grid = 100;
  EXPECT_THROW(simulate_full(he, cfg), NumericsError);
}

TEST(ModelSim, LinearModelDecaysAtSymbolRate) {
  auto he = problems::builtin("heat-exchanger-linear");
  auto rep = linreduce::emit_slow_pde(linreduce::reduce_linear(he, 4), he);
  const double k = 0.5, t = 2;
  auto res = simulate_model(rep, {"c"}, single_mode(2 * kPi / k, 1, 0.01, t));
  EXPECT_NEAR(last(res, "amp_c_0_1"), std::exp((-k * k - std::pow(k, 4)) * t), 1e-12);
}

TEST(ModelSim, CubicDecayOfUniformState) {
  ModelReport rep;
  rep.evolution = {{"c_t", "-3*c^3"}};
  const double a = 0.8, t = 2;
  auto cfg = single_mode(2 * kPi, 0, 1e-3, t);
  cfg.ic.modes[0].amplitude = a;
  auto res = simulate_model(rep, {"c"}, cfg);
  EXPECT_NEAR(last(res, "amp_c_0_0"), a / std::sqrt(1 + 6 * a * a * t), 1e-9);
}

TEST(ModelSim, CouplingTermsAreDropped) {
  ModelReport rep;
  rep.evolution = {{"c_t", "c_xx + Z[d4x;-1]"}};
  auto res = simulate_model(rep, {"c"}, single_mode(2 * kPi, 1, 0.01, 1));
  EXPECT_NEAR(last(res, "amp_c_0_1"), std::exp(-1.0), 1e-12);
  bool logged = false;
  for (const auto& l : res.log) logged |= l.find("dropped") != std::string::npos;
  EXPECT_TRUE(logged);
  ModelReport none;
  EXPECT_THROW(simulate_model(none, {"c"}, single_mode(2 * kPi, 1, 0.01, 1)), NumericsError);
}

TEST(Emergence, LinearHeatExchangerRate) {
  auto he = problems::builtin("heat-exchanger-linear");
  auto r = emergence_experiment(he, 4, emergence_config(64, 5, 1));
  EXPECT_TRUE(r.fit_ok);
  EXPECT_GE(r.rate, 0.8);
  EXPECT_LE(r.rate, 1.1);
  EXPECT_EQ(r.csv().substr(0, r.csv().find('\n')), "t,distance");
}

TEST(Emergence, SingleModeWithPerturbedD) {
  // Off-manifold data decays along the fast branch (-1 - sqrt(1 - 4k^2))/2, about -1.
  auto he = problems::builtin("heat-exchanger-linear");
  SimConfig cfg;
  cfg.length = 2 * kPi / 0.05;
  cfg.grid = 32;
  cfg.tmax = 5;
  cfg.record_stride = 10;
  cfg.ic.modes = {{0, 1, 0.05, false}, {1, 1, 0.05, false}};
  auto r = emergence_experiment(he, 4, cfg);
  EXPECT_TRUE(r.fit_ok);
  EXPECT_GE(r.rate, 0.9);
  EXPECT_LE(r.rate, 1.1);
}

TEST(Emergence, NonlinearHeatExchangerRate) {
  auto he = problems::builtin("heat-exchanger-nonlinear");
  auto r = emergence_experiment(he, 2, emergence_config(64, 5, 1));
  EXPECT_TRUE(r.fit_ok);
  EXPECT_GE(r.rate, 0.8);
  EXPECT_LE(r.rate, 1.1);
  EXPECT_LT(r.distance.back(), r.distance.front());
}

TEST(Emergence, DeterministicForSeed) {
  auto he = problems::builtin("heat-exchanger-linear");
  auto a = emergence_experiment(he, 2, emergence_config(32, 2, 9), 0.5, 2);
  auto b = emergence_experiment(he, 2, emergence_config(32, 2, 9), 0.5, 2);
  EXPECT_EQ(a.distance, b.distance);
}
