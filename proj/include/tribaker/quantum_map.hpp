#pragma once

#include <vector>

#include "tribaker/types.hpp"

namespace tribaker {

/// (G_n)_{kj} = exp(-2 pi i (j + chi_q)(k + chi_p) / n) / sqrt(n), mapping
/// position amplitudes (index j) to momentum amplitudes (index k).
CMatrix dft_matrix(int n, double chi_q, double chi_p);

/// Closed quantum tribaker map G_N^{-1} blockdiag(G_{N/3}, G_{N/3}, G_{N/3}).
CMatrix baker_propagator(const MapSpec& spec);

/// Diagonal of the partial projector: 1 on the outer thirds, sqrt(R) on the
/// middle third of the position basis.
CVector partial_projector_diagonal(const MapSpec& spec);

/// Dense form of partial_projector_diagonal.
CMatrix partial_projector(const MapSpec& spec);

/// P U P.
CMatrix open_propagator(const MapSpec& spec);

/// Right/left eigenpairs of the non-unitary propagator, sorted by decreasing
/// modulus, scaled so that <L_j|R_k> = delta_jk and |R_j| = |L_j|.
struct ResonanceSet {
  CVector eigenvalues;
  CMatrix right;   // column j is |Psi_j^R>
  CMatrix left;    // column j is |Psi_j^L> (the ket whose adjoint is the left eigenvector)
  int n_longlived = 0;
  double cutoff = 0.0;           // nu_c
  std::vector<int> defective;    // pairs whose <L|R> was numerically zero

  [[nodiscard]] int size() const noexcept { return static_cast<int>(eigenvalues.size()); }
};

/// Eigenvalue clusters closer than this are biorthogonalized jointly.
inline constexpr double kDegeneracyRadius = 1e-10;
/// Unit-norm pairs with |<L|R>| below this are reported as defective.
inline constexpr double kDefectiveOverlap = 1e-12;

/// Requires 1 <= n_c <= N. Throws NumericalError if the eigensolver fails.
ResonanceSet exact_resonances(const CMatrix& u_tilde, int n_c);

}  // namespace tribaker
