#pragma once

#include <string>
#include <vector>

#include "tribaker/periodic_orbits.hpp"
#include "tribaker/types.hpp"

namespace tribaker {

/// Periodized unit-aspect Gaussian on the torus in the position basis
/// q_j = (j + chi_q)/n:
///
///   c_j ~ sum_{v=-1,0,1} exp(-pi n d^2 + 2 pi i n p0 d - 2 pi i chi_p v),
///   d = q_j - q0 + v,
///
/// normalized to unit length. The phase reference (d rather than q_j) fixes
/// the convention in which step_action() gives the propagation phase.
CVector coherent_state(PhasePoint center, int n, double chi_q, double chi_p);

/// Bohr-Sommerfeld phase A = (n S_gamma + m) / L.
double bohr_phase(const PeriodicOrbit& orbit, int m, int n);

/// Unit-normalized orbit combination
/// sum_j exp(-2 pi i (j A - n theta_j)) |q_j, p_j>, theta_j = sum_{l<=j} S_l.
/// Requires 0 <= m < L.
CVector build_phi(const PeriodicOrbit& orbit, int m, int n, double chi_q = 0.5, double chi_p = 0.5);

/// round(ln n / ln 3); requires n >= 3.
int ehrenfest_time(int n);

struct ScarFunction {
  SymbolSequence orbit;
  bool inside_repeller = false;
  int m = 0;
  double bohr_phase = 0.0;
  int ehrenfest = 0;
  CVector right;
  CVector left;  // ket form: <psi^L| is left.adjoint()
};

class DegenerateScarError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Cosine-windowed propagation of build_phi up to time tau,
///   |R> ~ sum_t cos(pi t / 2 tau) e^{-2 pi i A t} U^t |phi>,
///   <L| ~ sum_t cos(pi t / 2 tau) e^{-2 pi i A t} <phi| U^t,
/// scaled so <L|R> = 1 and |R| = |L|. Throws DegenerateScarError when the
/// unnormalized <L|R> falls below 1e-12.
ScarFunction scar_pair(const PeriodicOrbit& orbit, int m, const CMatrix& u_tilde, int tau,
                       double chi_q = 0.5, double chi_p = 0.5);

/// Ordered scar functions (selection order, ascending m within an orbit).
struct ScarBasisSet {
  std::vector<ScarFunction> functions;
  std::vector<std::string> excluded;  // "symbols/m" of degenerate pairs

  [[nodiscard]] int size() const noexcept { return static_cast<int>(functions.size()); }
  [[nodiscard]] CMatrix right_matrix() const;
  [[nodiscard]] CMatrix left_matrix() const;
  [[nodiscard]] ScarBasisSet prefix(int count) const;
};

/// Builds every (orbit, m) pair; pairs are independent and run in parallel.
ScarBasisSet build_scar_basis(const std::vector<PeriodicOrbit>& orbits, const CMatrix& u_tilde,
                              int tau);

/// Single-threaded reference for build_scar_basis.
ScarBasisSet build_scar_basis_serial(const std::vector<PeriodicOrbit>& orbits,
                                     const CMatrix& u_tilde, int tau);

}  // namespace tribaker
