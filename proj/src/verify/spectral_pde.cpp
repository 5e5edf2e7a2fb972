#include "slowvary/verify/spectral_pde.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "slowvary/error.hpp"

namespace slowvary::verify {

using algebra::Expr;
using crosssec::SpaceKind;
using problems::ProblemSpec;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDivergence = 1e6;

using Field = std::vector<cplx>;
using State = std::vector<Field>;

class Fft {
 public:
  Fft(int nx, int ny) : n_(static_cast<std::size_t>(nx) * ny) {
    buf_ = static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * n_));
    if (ny == 1) {
      fwd_ = fftw_plan_dft_1d(nx, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_1d(nx, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    } else {
      fwd_ = fftw_plan_dft_2d(nx, ny, buf_, buf_, FFTW_FORWARD, FFTW_ESTIMATE);
      bwd_ = fftw_plan_dft_2d(nx, ny, buf_, buf_, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
  }
  ~Fft() {
    fftw_destroy_plan(fwd_);
    fftw_destroy_plan(bwd_);
    fftw_free(buf_);
  }
  Fft(const Fft&) = delete;
  Fft& operator=(const Fft&) = delete;

  Field forward(const Field& v) { return run(v, fwd_, 1.0); }
  Field inverse(const Field& v) { return run(v, bwd_, 1.0 / static_cast<double>(n_)); }

 private:
  Field run(const Field& v, fftw_plan p, double scale) {
    std::copy(v.begin(), v.end(), reinterpret_cast<cplx*>(buf_));
    fftw_execute(p);
    Field out(reinterpret_cast<cplx*>(buf_), reinterpret_cast<cplx*>(buf_) + n_);
    if (scale != 1.0)
      for (auto& x : out) x *= scale;
    return out;
  }

  std::size_t n_;
  fftw_complex* buf_;
  fftw_plan fwd_, bwd_;
};

int signed_index(int j, int n) { return j <= n / 2 ? j : j - n; }

cplx numeric(const Expr& e, const std::map<std::string, double>& params) {
  const auto& reg = e.registry();
  return algebra::evaluate(e, [&](algebra::SymbolId id) -> cplx {
    const std::string& name = reg->info(id).name;
    auto it = params.find(name);
    if (it == params.end()) throw NumericsError("parameter '" + name + "' needs a numeric value");
    return it->second;
  });
}

// Central stencils (second order) for d^n/dx^n on a periodic grid.
std::map<int, double> stencil(int order, double h) {
  switch (order) {
    case 0:
      return {{0, 1.0}};
    case 1:
      return {{-1, -0.5 / h}, {1, 0.5 / h}};
    case 2:
      return {{-1, 1 / (h * h)}, {0, -2 / (h * h)}, {1, 1 / (h * h)}};
    case 3: {
      double c = 0.5 / (h * h * h);
      return {{-2, -c}, {-1, 2 * c}, {1, -2 * c}, {2, c}};
    }
    case 4: {
      double c = 1 / (h * h * h * h);
      return {{-2, c}, {-1, -4 * c}, {0, 6 * c}, {1, -4 * c}, {2, c}};
    }
    default:
      throw NumericsError("centred differences support derivatives up to order 4");
  }
}

cplx stencil_symbol(const std::map<int, double>& st, double k, double h) {
  cplx s = 0;
  for (const auto& [off, c] : st) s += c * std::exp(cplx(0, k * off * h));
  return s;
}

Field apply_stencil(const std::map<int, double>& st, const Field& u) {
  const int n = static_cast<int>(u.size());
  Field out(u.size(), 0.0);
  for (int j = 0; j < n; ++j)
    for (const auto& [off, c] : st) out[j] += c * u[((j + off) % n + n) % n];
  return out;
}

/// Discretised PDE u_t = S u + f(u): S acts blockwise per Fourier mode
/// (or by stencils), f pointwise on derivative leaves.
struct System {
  int fields = 1;
  int nx = 0, ny = 1;
  double dx = 0, dy = 1;
  Scheme scheme = Scheme::Spectral;
  std::vector<std::vector<Field>> sym;          // [i][j] per-mode multiplier
  std::vector<std::vector<cplx>> dmult;          // (ik)^d per mode, spectral derivatives
  std::vector<std::vector<std::vector<cplx>>> mat;  // [l][i][j] numeric operator stack (centred scheme)
  std::vector<std::map<int, double>> stencils;  // [l]
  std::vector<std::pair<int, int>> leaves;      // (field, x-derivative)
  std::vector<GridPoly> nonlinear;              // per field
  cplx pert = 0;                                // numeric perturbation parameter
  std::vector<double> kx;                       // per x index
};

std::vector<double> x_wavenumbers(int nx, double length) {
  std::vector<double> k(nx);
  for (int j = 0; j < nx; ++j) k[j] = 2 * kPi / length * signed_index(j, nx);
  return k;
}

cplx derivative_symbol(int d, double k, int j, int nx) {
  if (d % 2 == 1 && j == nx / 2) return 0.0;  // Nyquist mode has no odd derivative
  return std::pow(cplx(0, k), d);
}

int leaf_index(System& sys, int field, int deriv) {
  auto key = std::make_pair(field, deriv);
  auto it = std::find(sys.leaves.begin(), sys.leaves.end(), key);
  if (it != sys.leaves.end()) return static_cast<int>(it - sys.leaves.begin());
  sys.leaves.push_back(key);
  return static_cast<int>(sys.leaves.size()) - 1;
}

GridPoly compile(System& sys, const problems::Multinomial& f, const std::vector<std::string>& names) {
  GridPoly p;
  for (const auto& t : f.terms()) {
    GridTerm g{t.coef.to_complex(), {}};
    for (const auto& fac : t.factors) {
      auto it = std::find(names.begin(), names.end(), fac.symbol);
      if (it == names.end()) throw NumericsError("nonlinearity uses unknown field '" + fac.symbol + "'");
      g.factors.emplace_back(leaf_index(sys, static_cast<int>(it - names.begin()), fac.deriv), fac.power);
    }
    p.terms.push_back(std::move(g));
  }
  return p;
}

void finish_derivatives(System& sys) {
  int maxd = 0;
  for (const auto& [f, d] : sys.leaves) maxd = std::max(maxd, d);
  sys.dmult.assign(maxd + 1, std::vector<cplx>(static_cast<std::size_t>(sys.nx) * sys.ny));
  for (int d = 0; d <= maxd; ++d)
    for (int jx = 0; jx < sys.nx; ++jx)
      for (int jy = 0; jy < sys.ny; ++jy) sys.dmult[d][jx * sys.ny + jy] = derivative_symbol(d, sys.kx[jx], jx, sys.nx);
}

std::vector<cplx> block_eigenvalues(const System& sys) {
  std::vector<cplx> ev;
  const std::size_t n = sys.sym[0][0].size();
  if (sys.fields == 1) return std::vector<cplx>(sys.sym[0][0].begin(), sys.sym[0][0].end());
  Eigen::MatrixXcd M(sys.fields, sys.fields);
  for (std::size_t p = 0; p < n; ++p) {
    for (int i = 0; i < sys.fields; ++i)
      for (int j = 0; j < sys.fields; ++j) M(i, j) = sys.sym[i][j][p];
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, false);
    for (int i = 0; i < sys.fields; ++i) ev.push_back(es.eigenvalues()(i));
  }
  return ev;
}

System build_full(const ProblemSpec& spec, const SimConfig& cfg) {
  System sys;
  sys.scheme = cfg.scheme;
  sys.nx = cfg.grid;
  sys.dx = cfg.length / cfg.grid;
  sys.kx = x_wavenumbers(cfg.grid, cfg.length);
  const int p = spec.stack_size();
  cplx pert = 0;
  if (spec.perturbation) pert = numeric(Expr::var(spec.reg, spec.perturbation->param), cfg.params);
  sys.pert = pert;

  if (spec.space.kind == SpaceKind::FiniteDim) {
    const int m = spec.space.cap;
    sys.fields = m;
    sys.mat.assign(p, std::vector<std::vector<cplx>>(m, std::vector<cplx>(m, 0.0)));
    for (int l = 0; l < p; ++l)
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          if (!spec.L(l).mat().empty()) sys.mat[l][i][j] = numeric(spec.L(l).mat()[i][j], cfg.params);
    if (cfg.scheme == Scheme::Centred)
      for (int l = 0; l < p; ++l) sys.stencils.push_back(stencil(l, sys.dx));
    sys.sym.assign(m, std::vector<Field>(m, Field(sys.nx, 0.0)));
    for (int jx = 0; jx < sys.nx; ++jx) {
      double k = sys.kx[jx];
      for (int l = 0; l < p; ++l) {
        cplx d = cfg.scheme == Scheme::Centred ? stencil_symbol(stencil(l, sys.dx), k, sys.dx)
                                               : derivative_symbol(l, k, jx, sys.nx);
        for (int i = 0; i < m; ++i)
          for (int j = 0; j < m; ++j) sys.sym[i][j][jx] += sys.mat[l][i][j] * d;
      }
      for (int i = 0; i < m; ++i) sys.sym[i][i][jx] += pert;
    }
    for (int i = 0; i < m && !spec.nonlinearity.empty(); ++i)
      sys.nonlinear.push_back(compile(sys, spec.nonlinearity[i], spec.fields));
  } else if (spec.space.kind == SpaceKind::PeriodicFourier) {
    if (cfg.scheme != Scheme::Spectral) throw NumericsError("Fourier cross-sections need the spectral scheme");
    sys.ny = cfg.grid_y;
    sys.dy = 2 * kPi / cfg.grid_y;
    if (sys.ny < 4 * spec.space.cap / 3) throw NumericsError("y grid too coarse for the harmonic cap");
    const std::size_t n = static_cast<std::size_t>(sys.nx) * sys.ny;
    sys.sym.assign(1, std::vector<Field>(1, Field(n, 0.0)));
    for (int jy = 0; jy < sys.ny; ++jy) {
      int m = signed_index(jy, sys.ny);
      std::vector<cplx> s(p);
      for (int l = 0; l < p; ++l) s[l] = numeric(spec.L(l).symbol(m), cfg.params);
      for (int jx = 0; jx < sys.nx; ++jx) {
        cplx v = pert;
        for (int l = 0; l < p; ++l) v += s[l] * derivative_symbol(l, sys.kx[jx], jx, sys.nx);
        sys.sym[0][0][jx * sys.ny + jy] = v;
      }
    }
    if (!spec.nonlinearity.empty()) sys.nonlinear.push_back(compile(sys, spec.nonlinearity[0], spec.fields));
  } else {
    throw NumericsError("simulation needs a finite-dimensional or Fourier cross-section");
  }
  finish_derivatives(sys);
  return sys;
}

class Stepper {
 public:
  Stepper(const System& sys, Backend b) : sys_(sys), kern_(kernels(b)), fft_(sys.nx, sys.ny) {}

  State rhs(const State& u) {
    const std::size_t n = u[0].size();
    State out(sys_.fields, Field(n, 0.0));
    State hat;
    if (sys_.scheme == Scheme::Spectral) {
      for (const auto& f : u) hat.push_back(fft_.forward(f));
      for (int i = 0; i < sys_.fields; ++i) {
        Field acc(n, 0.0), tmp(n);
        for (int j = 0; j < sys_.fields; ++j) {
          tmp = hat[j];
          kern_.multiply(tmp, sys_.sym[i][j]);
          kern_.lincomb(acc, acc, 1.0, tmp);
        }
        out[i] = fft_.inverse(acc);
      }
    } else {
      for (std::size_t l = 0; l < sys_.mat.size(); ++l) {
        for (int j = 0; j < sys_.fields; ++j) {
          bool any = false;
          for (int i = 0; i < sys_.fields; ++i) any = any || sys_.mat[l][i][j] != 0.0;
          if (!any) continue;
          Field d = apply_stencil(sys_.stencils[l], u[j]);
          for (int i = 0; i < sys_.fields; ++i)
            if (sys_.mat[l][i][j] != 0.0) kern_.lincomb(out[i], out[i], sys_.mat[l][i][j], d);
        }
      }
      if (sys_.pert != 0.0)
        for (int i = 0; i < sys_.fields; ++i) kern_.lincomb(out[i], out[i], sys_.pert, u[i]);
    }
    if (!sys_.nonlinear.empty()) {
      std::vector<Field> leafs;
      for (const auto& [f, d] : sys_.leaves) {
        if (d == 0) {
          leafs.push_back(u[f]);
        } else if (sys_.scheme == Scheme::Spectral) {
          Field t = hat[f];
          kern_.multiply(t, sys_.dmult[d]);
          leafs.push_back(fft_.inverse(t));
        } else {
          leafs.push_back(apply_stencil(stencil(d, sys_.dx), u[f]));
        }
      }
      Leaves views(leafs.begin(), leafs.end());
      for (int i = 0; i < sys_.fields; ++i) kern_.accumulate(sys_.nonlinear[i], views, out[i]);
    }
    return out;
  }

  void step(State& u, double dt) {
    auto stage = [&](const State& k, double a) {
      State s(u.size());
      for (std::size_t i = 0; i < u.size(); ++i) {
        s[i].resize(u[i].size());
        kern_.lincomb(s[i], u[i], a, k[i]);
      }
      return s;
    };
    State k1 = rhs(u);
    State k2 = rhs(stage(k1, dt / 2));
    State k3 = rhs(stage(k2, dt / 2));
    State k4 = rhs(stage(k3, dt));
    for (std::size_t i = 0; i < u.size(); ++i) kern_.rk4_combine(u[i], k1[i], k2[i], k3[i], k4[i], dt);
  }

  const Kernels& kernels_used() const { return kern_; }
  Fft& fft() { return fft_; }

 private:
  const System& sys_;
  const Kernels& kern_;
  Fft fft_;
};

std::vector<double> random_profile(std::mt19937_64& rng, int nx, double amplitude) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2 * kPi);
  const int band = std::max(1, nx / 8);
  std::vector<double> a(band + 1), ph(band + 1);
  for (int h = 1; h <= band; ++h) {
    a[h] = gauss(rng);
    ph[h] = phase(rng);
  }
  std::vector<double> v(nx, 0.0);
  double peak = 0;
  for (int j = 0; j < nx; ++j) {
    for (int h = 1; h <= band; ++h) v[j] += a[h] * std::cos(2 * kPi * h * j / nx + ph[h]);
    peak = std::max(peak, std::abs(v[j]));
  }
  for (auto& x : v) x *= peak > 0 ? amplitude / peak : 0.0;
  return v;
}

State initial_state(const System& sys, const SimConfig& cfg, bool fourier) {
  const std::size_t n = static_cast<std::size_t>(sys.nx) * sys.ny;
  State u(sys.fields, Field(n, 0.0));
  auto put = [&](int comp_or_harmonic, const std::vector<double>& xprofile) {
    for (int jx = 0; jx < sys.nx; ++jx)
      for (int jy = 0; jy < sys.ny; ++jy) {
        if (fourier)
          u[0][jx * sys.ny + jy] += xprofile[jx] * std::cos(comp_or_harmonic * jy * sys.dy);
        else
          u[comp_or_harmonic][jx] += xprofile[jx];
      }
  };
  for (const auto& md : cfg.ic.modes) {
    if (!fourier && (md.field < 0 || md.field >= sys.fields)) throw NumericsError("initial mode names a missing component");
    std::vector<double> prof(sys.nx);
    for (int jx = 0; jx < sys.nx; ++jx) {
      double arg = 2 * kPi * md.wave * jx / sys.nx;
      prof[jx] = md.amplitude * (md.sine ? std::sin(arg) : std::cos(arg));
    }
    put(md.field, prof);
  }
  if (cfg.ic.seed) {
    std::mt19937_64 rng(*cfg.ic.seed);
    std::vector<int> which = cfg.ic.random_fields;
    if (which.empty()) {
      if (fourier)
        which = {1};
      else
        for (int i = 0; i < sys.fields; ++i) which.push_back(i);
    }
    for (int f : which) put(f, random_profile(rng, sys.nx, cfg.ic.amplitude));
  }
  return u;
}

void validate(const SimConfig& cfg) {
  if (cfg.grid < 4) throw NumericsError("grid must have at least 4 points");
  if (cfg.scheme == Scheme::Spectral && (cfg.grid & (cfg.grid - 1)) != 0)
    throw NumericsError("spectral runs need a power-of-two grid, got " + std::to_string(cfg.grid));
  if (!(cfg.length > 0) || !(cfg.dt > 0) || !(cfg.tmax >= 0)) throw NumericsError("length, dt and tmax must be positive");
  if (cfg.record_stride < 0) throw NumericsError("record stride must be non-negative");
}

struct Recorder {
  SimResult& res;
  const System& sys;
  Fft& fft;
  const Kernels& kern;
  std::vector<InitialCondition::Mode> modes;
  bool fourier;

  void operator()(double t, const State& u) {
    res.t.push_back(t);
    res.snapshots.push_back(u);
    const double area = sys.dx * (fourier ? sys.dy : 1.0);
    const std::size_t n = u[0].size();
    const Field zero(n, 0.0);
    for (int i = 0; i < sys.fields; ++i) {
      const std::string& name = res.fields[i];
      res.diagnostics["l2_" + name].push_back(kern.l2_distance(u[i], zero, area));
      double integral = 0;
      for (const auto& v : u[i]) integral += v.real();
      res.diagnostics["int_" + name].push_back(integral * area);
    }
    for (const auto& md : modes) {
      int comp = fourier ? 0 : md.field;
      Field hat = fft.forward(u[comp]);
      int jx = ((md.wave % sys.nx) + sys.nx) % sys.nx;
      int jy = fourier ? ((md.field % sys.ny) + sys.ny) % sys.ny : 0;
      double scale = (md.wave == 0 ? 1.0 : 2.0) * (fourier && md.field != 0 ? 2.0 : 1.0) / static_cast<double>(n);
      res.diagnostics["amp_" + res.fields[comp] + "_" + std::to_string(md.field) + "_" + std::to_string(md.wave)]
          .push_back(std::abs(hat[jx * sys.ny + jy]) * scale);
    }
  }
};

SimResult run(const System& sys, State u, const SimConfig& cfg, std::vector<std::string> names, bool fourier) {
  check_rk4_stability(block_eigenvalues(sys), cfg.dt);
  SimResult res;
  res.fields = std::move(names);
  res.grid = sys.nx;
  res.grid_y = sys.ny;
  res.dx = sys.dx;
  Stepper st(sys, cfg.backend);
  Recorder rec{res, sys, st.fft(), st.kernels_used(), cfg.ic.modes, fourier};
  const long steps = std::lround(cfg.tmax / cfg.dt);
  if (std::abs(steps * cfg.dt - cfg.tmax) > 1e-9 * std::max(1.0, cfg.tmax))
    throw NumericsError("tmax must be a whole number of time steps");
  rec(0.0, u);
  for (long s = 1; s <= steps; ++s) {
    st.step(u, cfg.dt);
    double peak = 0;
    for (const auto& f : u) peak = std::max(peak, st.kernels_used().max_abs(f));
    if (!std::isfinite(peak) || peak > kDivergence)
      throw NumericsError("simulation diverged at t = " + std::to_string(s * cfg.dt));
    if ((cfg.record_stride > 0 && s % cfg.record_stride == 0) || s == steps) {
      if (res.t.back() != s * cfg.dt) rec(s * cfg.dt, u);
    }
  }
  res.log.push_back("rk4 steps " + std::to_string(steps) + ", dt " + std::to_string(cfg.dt));
  return res;
}

struct ModelTerms {
  std::vector<std::vector<std::map<int, cplx>>> linear;  // [i][j] derivative -> coefficient
  std::vector<std::vector<std::tuple<cplx, std::vector<std::tuple<int, int, int>>>>> nonlinear;  // per field
  std::set<std::string> dropped;
};

// Names inside Z[...] are coupling inputs; register them before a bare
// occurrence elsewhere in the text could claim them as plain symbols.
void register_history_cores(algebra::Registry& reg, const std::string& text) {
  int depth = 0;
  std::string name;
  auto flush = [&] {
    if (depth > 0 && !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_') &&
        !reg.find(name))
      reg.coupling(name);
    name.clear();
  };
  for (std::size_t p = 0; p < text.size(); ++p) {
    char ch = text[p];
    if (ch == 'Z' && p + 1 < text.size() && text[p + 1] == '[' && name.empty()) {
      ++depth;
      ++p;
      continue;
    }
    if (std::isalnum(static_cast<unsigned char>(ch)) || ch == '_') {
      name += ch;
      continue;
    }
    flush();
    if (ch == ']') depth = std::max(0, depth - 1);
  }
  flush();
}

// Jet name amp, amp_x, amp_xx, ... -> (amplitude index, order).
std::optional<std::pair<int, int>> parse_jet(const std::string& name, const std::vector<std::string>& amps) {
  for (std::size_t a = 0; a < amps.size(); ++a) {
    if (name == amps[a]) return std::make_pair(static_cast<int>(a), 0);
    const std::string pre = amps[a] + "_";
    if (name.size() > pre.size() && name.compare(0, pre.size(), pre) == 0) {
      auto tail = name.substr(pre.size());
      if (std::all_of(tail.begin(), tail.end(), [](char c) { return c == 'x'; }))
        return std::make_pair(static_cast<int>(a), static_cast<int>(tail.size()));
    }
  }
  return std::nullopt;
}

ModelTerms read_model(const ModelReport& model, const std::vector<std::string>& amps, const SimConfig& cfg) {
  const std::size_t m = amps.size();
  ModelTerms mt;
  mt.linear.assign(m, std::vector<std::map<int, cplx>>(m));
  mt.nonlinear.resize(m);
  auto reg = algebra::Registry::create();
  std::vector<bool> seen(m, false);
  for (const auto& [key, text] : model.evolution) {
    auto it = std::find_if(amps.begin(), amps.end(), [&](const std::string& a) { return key == a + "_t"; });
    if (it == amps.end()) continue;
    const std::size_t i = it - amps.begin();
    seen[i] = true;
    register_history_cores(*reg, text);
    Expr e = algebra::parse_expr(reg, text);
    for (const auto& [mono, c] : e.terms()) {
      cplx coef = c.to_complex();
      std::vector<std::tuple<int, int, int>> fac;  // (amp, deriv, power)
      bool keep = true;
      for (const auto& f : mono.factors()) {
        const auto& info = reg->info(f.id);
        if (auto jet = parse_jet(info.name, amps)) {
          fac.emplace_back(jet->first, jet->second, f.exp);
        } else if (auto p = cfg.params.find(info.name); p != cfg.params.end() && info.kind == algebra::SymbolKind::Plain) {
          coef *= std::pow(p->second, f.exp);
        } else {
          mt.dropped.insert(info.name);
          keep = false;
        }
      }
      if (!keep) continue;
      if (fac.size() == 1 && std::get<2>(fac[0]) == 1)
        mt.linear[i][std::get<0>(fac[0])][std::get<1>(fac[0])] += coef;
      else
        mt.nonlinear[i].emplace_back(coef, fac);
    }
  }
  for (std::size_t i = 0; i < m; ++i)
    if (!seen[i]) throw NumericsError("model has no evolution for amplitude '" + amps[i] + "'");
  return mt;
}

}  // namespace

std::optional<std::pair<int, int>> jet_index(const std::string& name, const std::vector<std::string>& amplitudes) {
  return parse_jet(name, amplitudes);
}

std::vector<cplx> spectral_derivative(const std::vector<cplx>& u, int order, double length) {
  if (order == 0) return u;
  const int n = static_cast<int>(u.size());
  Fft fft(n, 1);
  Field h = fft.forward(u);
  for (int j = 0; j < n; ++j) {
    const int s = signed_index(j, n);
    // Odd derivatives drop the unpaired Nyquist mode.
    if (order % 2 == 1 && 2 * s == n) {
      h[j] = 0;
      continue;
    }
    h[j] *= std::pow(cplx(0, 2 * kPi * s / length), order);
  }
  return fft.inverse(h);
}

void check_rk4_stability(const std::vector<cplx>& eigenvalues, double dt) {
  for (const auto& lam : eigenvalues) {
    cplx z = lam * dt;
    cplx r = 1.0 + z + z * z / 2.0 + z * z * z / 6.0 + z * z * z * z / 24.0;
    if (std::abs(r) > 1.0 + 1e-12) {
      std::ostringstream os;
      os << "dt = " << dt << " violates the RK4 stability bound (eigenvalue " << lam << ")";
      throw NumericsError(os.str());
    }
  }
}

std::string SimResult::csv() const {
  std::ostringstream os;
  os.precision(12);
  os << "t";
  for (const auto& [name, v] : diagnostics) os << "," << name;
  os << "\n";
  for (std::size_t r = 0; r < t.size(); ++r) {
    os << t[r];
    for (const auto& [name, v] : diagnostics) os << "," << (r < v.size() ? v[r] : 0.0);
    os << "\n";
  }
  return os.str();
}

SimResult simulate_full(const ProblemSpec& spec, const SimConfig& cfg) {
  validate(cfg);
  System sys = build_full(spec, cfg);
  const bool fourier = spec.space.kind == SpaceKind::PeriodicFourier;
  State u = initial_state(sys, cfg, fourier);
  std::vector<std::string> names = fourier ? std::vector<std::string>{spec.fields.at(0)} : spec.fields;
  return run(sys, std::move(u), cfg, names, fourier);
}

SimResult simulate_model(const ModelReport& model, const std::vector<std::string>& amplitudes, const SimConfig& cfg) {
  validate(cfg);
  if (cfg.scheme != Scheme::Spectral) throw NumericsError("models are integrated spectrally");
  ModelTerms mt = read_model(model, amplitudes, cfg);
  const int m = static_cast<int>(amplitudes.size());

  System sys;
  sys.fields = m;
  sys.nx = cfg.grid;
  sys.dx = cfg.length / cfg.grid;
  sys.kx = x_wavenumbers(cfg.grid, cfg.length);
  sys.sym.assign(m, std::vector<Field>(m, Field(sys.nx, 0.0)));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      for (const auto& [d, c] : mt.linear[i][j])
        for (int jx = 0; jx < sys.nx; ++jx) sys.sym[i][j][jx] += c * derivative_symbol(d, sys.kx[jx], jx, sys.nx);
  bool nonlinear = false;
  sys.nonlinear.resize(m);
  for (int i = 0; i < m; ++i)
    for (const auto& [c, fac] : mt.nonlinear[i]) {
      GridTerm g{c, {}};
      for (const auto& [a, d, p] : fac) g.factors.emplace_back(leaf_index(sys, a, d), p);
      sys.nonlinear[i].terms.push_back(std::move(g));
      nonlinear = true;
    }
  if (!nonlinear) sys.nonlinear.clear();
  finish_derivatives(sys);

  State u = initial_state(sys, cfg, false);
  std::vector<std::string> names = amplitudes;
  SimResult res;
  if (nonlinear) {
    res = run(sys, std::move(u), cfg, names, false);
  } else {
    // Exact per-mode exponential of the symbol matrix.
    res.fields = names;
    res.grid = sys.nx;
    res.dx = sys.dx;
    Fft fft(sys.nx, 1);
    Recorder rec{res, sys, fft, kernels(cfg.backend), cfg.ic.modes, false};
    State hat;
    for (const auto& f : u) hat.push_back(fft.forward(f));
    const long steps = std::lround(cfg.tmax / cfg.dt);
    std::vector<double> times{0.0};
    for (long s = 1; s <= steps; ++s)
      if ((cfg.record_stride > 0 && s % cfg.record_stride == 0) || s == steps) times.push_back(s * cfg.dt);
    for (double t : times) {
      State phys(m, Field(sys.nx));
      State now(m, Field(sys.nx));
      for (int jx = 0; jx < sys.nx; ++jx) {
        Eigen::MatrixXcd S(m, m);
        Eigen::VectorXcd v(m);
        for (int i = 0; i < m; ++i) {
          v(i) = hat[i][jx];
          for (int j = 0; j < m; ++j) S(i, j) = sys.sym[i][j][jx] * t;
        }
        Eigen::VectorXcd w = S.exp() * v;
        for (int i = 0; i < m; ++i) now[i][jx] = w(i);
      }
      for (int i = 0; i < m; ++i) phys[i] = fft.inverse(now[i]);
      rec(t, phys);
    }
    res.log.push_back("exact modal exponentials at " + std::to_string(times.size()) + " times");
  }
  for (const auto& d : mt.dropped) res.log.push_back("dropped terms in '" + d + "'");
  return res;
}

}  // namespace slowvary::verify
