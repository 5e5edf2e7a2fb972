#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slowvary/problems/problem.hpp"
#include "slowvary/report.hpp"
#include "slowvary/verify/kernels.hpp"

namespace slowvary::verify {

enum class Scheme { Spectral, Centred };

/// Initial data: explicit modes, or a seeded band-limited random field
/// (x-harmonics 1..grid/8, scaled so its largest value is `amplitude`).
struct InitialCondition {
  struct Mode {
    int field = 0;     // component (FiniteDim) or y-harmonic (Fourier cross-sections)
    int wave = 1;      // x-harmonic: wavenumber 2*pi*wave/length
    double amplitude = 1;
    bool sine = false;
  };
  std::vector<Mode> modes;
  std::optional<std::uint64_t> seed;
  double amplitude = 0.05;
  std::vector<int> random_fields;  // components, or y-harmonics; empty means all components or harmonic 1
};

struct SimConfig {
  double length = 2 * 3.14159265358979323846 / 0.1;
  int grid = 128;    // x points, a power of two for the spectral scheme
  int grid_y = 16;   // y points for Fourier cross-sections
  double dt = 1e-2;
  double tmax = 1;
  Scheme scheme = Scheme::Spectral;
  InitialCondition ic;
  int record_stride = 0;  // steps between snapshots; 0 records only the start and the end
  Backend backend = Backend::OpenMP;
  std::map<std::string, double> params;  // numeric values of problem parameters
};

/// Snapshots are [record][field][point]; FiniteDim problems have one field per
/// component on the x grid, Fourier problems one field on the x-by-y grid.
struct SimResult {
  std::vector<std::string> fields;
  int grid = 0;
  int grid_y = 1;
  double dx = 0;
  std::vector<double> t;
  std::vector<std::vector<std::vector<cplx>>> snapshots;
  std::map<std::string, std::vector<double>> diagnostics;  // one value per record
  std::vector<std::string> log;

  std::string csv() const;  // header t,<diagnostics...>
};

// Method of lines with explicit RK4 for the full PDE on a periodic x domain.
SimResult simulate_full(const problems::ProblemSpec& spec, const SimConfig& cfg);

/// Integrates the autonomous part of a reduced model. Evolution entries are
/// read as polynomials in the amplitude jets (c, c_x, c_xx, ...) and the
/// parameters in cfg.params; terms with any other symbol (coupling, history)
/// are dropped, as the model prescribes. Linear models advance exactly per
/// Fourier mode; nonlinear ones by RK4 with the linear part applied spectrally.
SimResult simulate_model(const ModelReport& model, const std::vector<std::string>& amplitudes,
                         const SimConfig& cfg);

// Jet name amp, amp_x, amp_xx, ... -> (amplitude index, derivative order).
std::optional<std::pair<int, int>> jet_index(const std::string& name, const std::vector<std::string>& amplitudes);

// d^order u / dx^order of a periodic grid function on [0, length).
std::vector<cplx> spectral_derivative(const std::vector<cplx>& u, int order, double length);

// Throws NumericsError when some z = lambda*dt leaves the RK4 stability region |R(z)| <= 1.
void check_rk4_stability(const std::vector<cplx>& eigenvalues, double dt);

}  // namespace slowvary::verify
