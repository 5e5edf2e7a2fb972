#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "slowvary/crosssec/field.hpp"

namespace slowvary::crosssec {

/// Slow eigendata of L0: L0 V0 = V0 A0, <Z0, V0> = I, plus the gap bounds
/// |Re spec A0| <= alpha and Re(stable spectrum) <= -beta.
struct SpectralData {
  std::vector<CrossField> V0;
  std::vector<CrossField> Z0;
  ExprMatrix A0;
  mpq_class alpha = 0;
  mpq_class beta = 1;

  std::size_t m() const { return V0.size(); }
};

struct SpectralReport {
  std::vector<std::string> lines;
  // Stable eigenvalues seen by the solver (numeric; exact ones are printed in lines).
  std::vector<double> stable;
};

// Verifies the eigendata identities exactly and the gap condition beta > N alpha.
// Throws ValidationError naming the first violated condition.
SpectralReport spectral_check(const Operator& L0, const SpectralData& sd, int order);

/// Per-component eigenvalues when L0 acts diagonally (diagonal matrices,
/// constant-coefficient Fourier operators) and every slow mode is a single
/// basis component; nullopt otherwise.
struct DiagonalModes {
  std::map<int, Scalar> lambda;  // component or harmonic -> eigenvalue of L0
  std::vector<int> slow;         // components spanned by V0
};
std::optional<DiagonalModes> diagonal_modes(const Operator& L0, const SpectralData& sd);

/// Solves L0 v - shift v - dv/dtau = rhs with <Z0, v> = 0, where d/dtau is the
/// fast-time derivative acting on coupling symbols and history atoms.
///
/// Along a stable eigenvalue lambda this gives v = -z(rhs; lambda - shift);
/// static content reduces to rhs/(lambda - shift). Spaces without a diagonal
/// eigenbasis (Neumann channel, non-diagonal matrices) are solved exactly by
/// elimination and accept static content only. Every solution is checked
/// in-line, including the Neumann condition where it applies.
CrossField linv_solve(const Operator& L0, const SpectralData& sd, const CrossField& rhs,
                      const Scalar& shift = Scalar(0));

// Row version for L0 V - V A0 = R with diagonal A0.
std::vector<CrossField> linv_solve(const Operator& L0, const SpectralData& sd,
                                   const std::vector<CrossField>& rhs);

/// Manifold correction that cancels a residual with no slow content:
/// z(res; lambda) along each stable eigenvalue, that is -linv_solve(res).
CrossField stable_update(const Operator& L0, const SpectralData& sd, const CrossField& res);

// Slow amplitudes <Z0_j, v>.
std::vector<Expr> slow_part(const SpectralData& sd, const CrossField& v);
// v minus its projection sum_j V0_j <Z0_j, v>.
CrossField remove_slow(const SpectralData& sd, const CrossField& v);

}  // namespace slowvary::crosssec
