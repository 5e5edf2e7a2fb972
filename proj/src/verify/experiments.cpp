#include "slowvary/verify/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/Dense>

#include "slowvary/error.hpp"
#include "slowvary/nlreduce/nlreduce.hpp"

namespace slowvary::verify {

using algebra::Expr;
using crosssec::SpaceKind;
using problems::ProblemSpec;

namespace {

constexpr double kExact = 1e-12;

cplx numeric(const Expr& e, const std::map<std::string, double>& params) {
  const auto& reg = e.registry();
  return algebra::evaluate(e, [&](algebra::SymbolId id) -> cplx {
    const std::string& name = reg->info(id).name;
    auto it = params.find(name);
    if (it == params.end()) throw NumericsError("parameter '" + name + "' needs a numeric value");
    return it->second;
  });
}

std::vector<double> sample_points(double kmin, double kmax, int samples, Spacing spacing) {
  if (samples < 2 || !(kmax > kmin)) throw NumericsError("need kmin < kmax and at least two samples");
  if (spacing == Spacing::Log && !(kmin > 0)) throw NumericsError("log spacing needs kmin > 0");
  std::vector<double> ks(samples);
  for (int s = 0; s < samples; ++s) {
    double f = static_cast<double>(s) / (samples - 1);
    ks[s] = spacing == Spacing::Log ? std::exp(std::log(kmin) + f * (std::log(kmax) - std::log(kmin)))
                                    : kmin + f * (kmax - kmin);
  }
  return ks;
}

struct JetPoly {
  std::vector<std::pair<int, int>> leaves;  // (amplitude, derivative)
  GridPoly poly;
};

JetPoly compile_manifold(const Expr& e, const std::vector<std::string>& amps, const std::map<std::string, double>& params) {
  JetPoly jp;
  const auto& reg = e.registry();
  for (const auto& [mono, c] : e.terms()) {
    if (algebra::has_fast_time(*reg, mono)) continue;  // coupling corrections are not simulated
    GridTerm t{c.to_complex(), {}};
    for (const auto& f : mono.factors()) {
      const std::string& name = reg->info(f.id).name;
      if (auto j = jet_index(name, amps)) {
        auto it = std::find(jp.leaves.begin(), jp.leaves.end(), *j);
        int idx = static_cast<int>(it - jp.leaves.begin());
        if (it == jp.leaves.end()) jp.leaves.push_back(*j);
        t.factors.emplace_back(idx, f.exp);
      } else {
        auto p = params.find(name);
        if (p == params.end()) throw NumericsError("manifold symbol '" + name + "' needs a numeric value");
        t.coef *= std::pow(p->second, f.exp);
      }
    }
    jp.poly.terms.push_back(std::move(t));
  }
  return jp;
}

}  // namespace

LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw NumericsError("line fit needs at least two points");
  Eigen::MatrixXd A(n, 2);
  Eigen::VectorXd b(n);
  for (std::size_t i = 0; i < n; ++i) {
    A(i, 0) = x[i];
    A(i, 1) = 1;
    b(i) = y[i];
  }
  Eigen::Vector2d c = A.colPivHouseholderQr().solve(b);
  double mean = b.mean(), ss_tot = 0, ss_res = 0;
  for (std::size_t i = 0; i < n; ++i) {
    ss_tot += (b(i) - mean) * (b(i) - mean);
    double r = b(i) - (c(0) * x[i] + c(1));
    ss_res += r * r;
  }
  return {c(0), c(1), ss_tot > 0 ? 1 - ss_res / ss_tot : 1.0};
}

cplx dispersion_oracle(const ProblemSpec& spec, double k, const std::map<std::string, double>& params) {
  const cplx ik(0, k);
  if (spec.space.kind == SpaceKind::FiniteDim) {
    const int m = spec.space.cap;
    Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(m, m);
    for (int l = 0; l < spec.stack_size(); ++l)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) M(i, j) += numeric(spec.L(l).mat()[i][j], params) * std::pow(ik, l);
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    std::vector<cplx> ev(es.eigenvalues().data(), es.eigenvalues().data() + m);
    std::sort(ev.begin(), ev.end(), [](cplx a, cplx b) { return a.real() > b.real(); });
    const std::size_t slow = spec.spectral.m();
    if (slow < ev.size() && std::abs(ev[slow - 1].real() - ev[slow].real()) < 1e-12)
      throw NumericsError("wavenumber " + std::to_string(k) + " is outside the slow branch");
    return ev[0];
  }
  if (spec.space.kind == SpaceKind::PeriodicFourier) {
    auto dm = crosssec::diagonal_modes(spec.L(0), spec.spectral);
    if (!dm || dm->slow.empty()) throw NumericsError("no slow harmonic found");
    cplx s = 0;
    for (int l = 0; l < spec.stack_size(); ++l) s += numeric(spec.L(l).symbol(dm->slow[0]), params) * std::pow(ik, l);
    return s;
  }
  throw NumericsError("no finite symbol for this cross-section");
}

cplx model_symbol(const linreduce::LinearReduction& red, double k, int component,
                  const std::map<std::string, double>& params) {
  cplx s = 0;
  const cplx ik(0, k);
  for (std::size_t n = 0; n < red.A.size(); ++n)
    s += numeric(red.A[n].at(component).at(component), params) * std::pow(ik, static_cast<int>(n));
  return s;
}

std::string DispersionTable::csv() const {
  std::ostringstream os;
  os.precision(15);
  os << "k,lambda_full,lambda_model,abs_err\n";
  auto c = [](cplx z) {
    std::ostringstream s;
    s.precision(15);
    s << z.real();
    if (z.imag() != 0) s << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
    return s.str();
  };
  for (const auto& r : rows) os << r.k << "," << c(r.full) << "," << c(r.model) << "," << r.abs_err << "\n";
  return os.str();
}

DispersionTable dispersion_experiment(const ProblemSpec& spec, int order, double kmin, double kmax, int samples,
                                      Spacing spacing, const std::map<std::string, double>& params) {
  auto red = linreduce::reduce_linear(spec, order);
  DispersionTable tab;
  for (double k : sample_points(kmin, kmax, samples, spacing)) {
    DispersionRow r;
    r.k = k;
    r.full = dispersion_oracle(spec, k, params);
    r.model = model_symbol(red, k, 0, params);
    r.abs_err = std::abs(r.full - r.model);
    tab.max_err = std::max(tab.max_err, r.abs_err);
    tab.rows.push_back(r);
  }
  return tab;
}

ScalingResult error_scaling_experiment(const ProblemSpec& spec, int order, double kmin, double kmax, int samples,
                                       const std::map<std::string, double>& params) {
  ScalingResult res;
  res.table = dispersion_experiment(spec, order, kmin, kmax, samples, Spacing::Log, params);
  if (res.table.max_err < kExact) {
    res.exact = true;
    return res;
  }
  std::vector<double> x, y;
  for (const auto& r : res.table.rows) {
    if (r.abs_err <= 0) throw NumericsError("zero error at k = " + std::to_string(r.k) + " breaks the log-log fit");
    x.push_back(std::log(r.k));
    y.push_back(std::log(r.abs_err));
  }
  auto f = fit_line(x, y);
  res.slope = f.slope;
  res.r2 = f.r2;
  return res;
}

std::string EmergenceResult::csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "t,distance\n";
  for (std::size_t i = 0; i < t.size(); ++i) os << t[i] << "," << distance[i] << "\n";
  return os.str();
}

SimConfig emergence_config(int grid, double tmax, std::uint64_t seed) {
  SimConfig cfg;
  cfg.grid = grid;
  cfg.length = 2 * std::numbers::pi * std::max(1, grid / 8) / 0.1;
  cfg.dt = 1e-2;
  cfg.tmax = tmax;
  cfg.record_stride = 10;
  cfg.ic.seed = seed;
  cfg.ic.amplitude = 0.05;
  return cfg;
}

EmergenceResult emergence_experiment(const ProblemSpec& spec, int order, const SimConfig& cfg, double t0, double t1) {
  if (spec.space.kind != SpaceKind::FiniteDim)
    throw NumericsError("emergence experiments need a finite-dimensional cross-section");
  if (!(t1 > t0) || t1 > cfg.tmax + 1e-12) throw NumericsError("fit window must lie inside [0, tmax]");
  const int m = spec.space.cap;
  const auto& amps = spec.amplitudes;

  // Manifold expression per component in the amplitude jets.
  std::vector<Expr> manifold(m, Expr(spec.reg, algebra::Scalar(0)));
  if (spec.is_linear()) {
    auto red = linreduce::reduce_linear(spec, order);
    for (std::size_t n = 0; n < red.V.size(); ++n)
      for (std::size_t j = 0; j < amps.size(); ++j)
        for (const auto& [i, e] : red.V[n][j].entries())
          manifold[i] += e * Expr::var(spec.reg, linreduce::derivative_name(amps[j], static_cast<int>(n)));
  } else {
    auto sm = nlreduce::reduce_nonlinear(spec, order);
    auto station = nlreduce::at_station(spec, sm.field);
    for (int i = 0; i < m; ++i) manifold[i] = station.at(i);
  }
  auto dm = crosssec::diagonal_modes(spec.L(0), spec.spectral);
  std::vector<bool> slow(m, false);
  if (dm)
    for (int k : dm->slow) slow[k] = true;

  SimResult sim = simulate_full(spec, cfg);
  const Kernels& kern = kernels(cfg.backend);
  EmergenceResult res;
  res.t0 = t0;
  res.t1 = t1;
  std::vector<JetPoly> polys;
  for (int i = 0; i < m; ++i) polys.push_back(compile_manifold(manifold[i], amps, cfg.params));

  for (std::size_t r = 0; r < sim.t.size(); ++r) {
    const auto& u = sim.snapshots[r];
    // Slow amplitudes <Z0_j, u>.
    std::vector<std::vector<cplx>> c(amps.size(), std::vector<cplx>(sim.grid, 0.0));
    for (std::size_t j = 0; j < amps.size(); ++j)
      for (const auto& [i, z] : spec.spectral.Z0[j].entries()) {
        cplx w = numeric(z, cfg.params);
        for (int p = 0; p < sim.grid; ++p) c[j][p] += w * u[i][p];
      }
    double dist2 = 0;
    for (int i = 0; i < m; ++i) {
      if (slow[i]) continue;
      std::vector<std::vector<cplx>> leaf;
      for (const auto& [a, d] : polys[i].leaves) leaf.push_back(spectral_derivative(c[a], d, cfg.length));
      Leaves views(leaf.begin(), leaf.end());
      std::vector<cplx> h(sim.grid, 0.0);
      kern.accumulate(polys[i].poly, views, h);
      double d = kern.l2_distance(u[i], h, sim.dx);
      dist2 += d * d;
    }
    res.t.push_back(sim.t[r]);
    res.distance.push_back(std::sqrt(dist2));
  }

  std::vector<double> x, y;
  for (std::size_t r = 0; r < res.t.size(); ++r)
    if (res.t[r] >= t0 - 1e-9 && res.t[r] <= t1 + 1e-9) {
      if (!(res.distance[r] > 0)) throw NumericsError("off-manifold distance vanished inside the fit window");
      x.push_back(res.t[r]);
      y.push_back(std::log(res.distance[r]));
    }
  auto f = fit_line(x, y);
  res.rate = -f.slope;
  res.r2 = f.r2;
  res.fit_ok = f.r2 >= 0.99;
  return res;
}

}  // namespace slowvary::verify
