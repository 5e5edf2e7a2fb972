#pragma once

#include <string>
#include <vector>

#include "slowvary/linreduce/linreduce.hpp"
#include "slowvary/verify/spectral_pde.hpp"

namespace slowvary::verify {

/// Slow eigenvalue of the full linear system at x-wavenumber k.
///
/// FiniteDim problems take the largest-real-part eigenvalue of
/// sum_l L_l (ik)^l, which must be separated from the rest; Fourier problems
/// use the first slow harmonic. Throws NumericsError where the slow branch
/// merges with a fast one (4k^2 >= 1 for the heat exchanger).
cplx dispersion_oracle(const problems::ProblemSpec& spec, double k, const std::map<std::string, double>& params = {});

// sum_n A_n (ik)^n for amplitude `component`.
cplx model_symbol(const linreduce::LinearReduction& red, double k, int component = 0,
                  const std::map<std::string, double>& params = {});

struct DispersionRow {
  double k = 0;
  cplx full, model;
  double abs_err = 0;
};

struct DispersionTable {
  std::vector<DispersionRow> rows;
  double max_err = 0;
  std::string csv() const;  // k,lambda_full,lambda_model,abs_err
};

enum class Spacing { Linear, Log };

DispersionTable dispersion_experiment(const problems::ProblemSpec& spec, int order, double kmin, double kmax,
                                      int samples, Spacing spacing = Spacing::Linear,
                                      const std::map<std::string, double>& params = {});

struct ScalingResult {
  DispersionTable table;
  double slope = 0;
  double r2 = 0;
  bool exact = false;  // every error below 1e-12: the model symbol is exact and the slope is undefined
};

// Least-squares slope of log|lambda_full - lambda_model| against log k, log-spaced k.
ScalingResult error_scaling_experiment(const problems::ProblemSpec& spec, int order, double kmin, double kmax,
                                       int samples, const std::map<std::string, double>& params = {});

struct EmergenceResult {
  double rate = 0;  // fitted decay rate of the off-manifold distance
  double r2 = 0;
  double t0 = 1, t1 = 5;
  bool fit_ok = false;  // r2 >= 0.99
  std::vector<double> t, distance;
  std::string csv() const;  // t,distance
};

/// Simulates the full problem from cfg's initial data and fits the decay of
/// the L2 distance between the stable components and the manifold at the
/// given order over [t0, t1]. Linear problems use the linear manifold,
/// nonlinear ones the generating-polynomial manifold at its station.
EmergenceResult emergence_experiment(const problems::ProblemSpec& spec, int order, const SimConfig& cfg,
                                     double t0 = 1, double t1 = 5);

// Default emergence configuration: seeded band-limited data of amplitude 0.05
// in every component, domain sized so the data has wavenumbers up to 0.1.
SimConfig emergence_config(int grid, double tmax, std::uint64_t seed);

struct LineFit {
  double slope = 0, intercept = 0, r2 = 0;
};
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace slowvary::verify
