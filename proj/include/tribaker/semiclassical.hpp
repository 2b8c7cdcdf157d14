#pragma once

#include <vector>

#include "tribaker/quantum_map.hpp"
#include "tribaker/scar_basis.hpp"
#include "tribaker/types.hpp"

namespace tribaker {

/// Propagator and overlap matrices in a scar basis:
/// a(n,m) = <L_n|U|R_m>, s(n,m) = <L_n|R_m>.
struct ScarMatrices {
  CMatrix a;
  CMatrix s;

  /// Leading principal block of size k (the first k basis functions).
  [[nodiscard]] ScarMatrices leading(int k) const;
};

ScarMatrices assemble_matrices(const ScarBasisSet& basis, const CMatrix& u_tilde);

inline constexpr double kDefaultSvdTol = 1e-8;

/// Solution of a c = z s c after discarding overlap directions with
/// sigma < svd_tol * sigma_max.
struct GeneralizedSpectrum {
  CVector eigenvalues;
  CMatrix right_coefficients;  // column j: expansion of |Psi_j^R> in the right scar functions
  CMatrix left_coefficients;   // column j: expansion of |Psi_j^L> in the left scar functions
  int rank_used = 0;

  [[nodiscard]] bool has_vectors() const noexcept { return right_coefficients.size() > 0; }
};

/// Throws std::invalid_argument on shape errors and NumericalError when no
/// singular value survives the truncation.
GeneralizedSpectrum solve_generalized(const CMatrix& a, const CMatrix& s, double svd_tol = kDefaultSvdTol,
                                      bool want_vectors = false);

/// Reconstructed right/left states (columns), in the order of `spectrum`.
struct ReconstructedStates {
  CVector eigenvalues;
  CMatrix right;
  CMatrix left;
};

/// Combines scar functions with the eigenvector coefficients and rescales
/// each pair so <L|R> = 1 and |R| = |L|. Requires a spectrum solved with
/// vectors against a basis prefix of matching size.
ReconstructedStates reconstruct_states(const ScarBasisSet& basis, const GeneralizedSpectrum& spectrum);

struct MatchedPair {
  Complex exact;
  Complex semiclassical;
  double distance = 0.0;
};

struct PerformanceReport {
  int matched = 0;
  int total_longlived = 0;
  double performance = 0.0;
  double eps = 0.0;
  std::vector<MatchedPair> pairs;  // only claims within eps
};

/// Greedy one-to-one matching: the n_longlived exact eigenvalues, in
/// decreasing modulus, each claim the nearest unclaimed semiclassical value.
PerformanceReport match_eigenvalues(const ResonanceSet& exact, const CVector& semiclassical, double eps);

struct TracePoint {
  int n_sf = 0;
  int rank_used = 0;
  double performance = 0.0;
};

struct MinBasisResult {
  bool reached = false;
  int n_sf = 0;            // first crossing, or the full size when not reached
  int basis_size = 0;
  PerformanceReport report;  // at n_sf (best P when not reached)
  std::vector<TracePoint> trace;
};

struct MinBasisRequest {
  double target_p = 0.8;
  double eps = 1e-3;
  double svd_tol = kDefaultSvdTol;
  /// Coarse step of the prefix scan. With stride s > 1 the sizes s, 2s, ...
  /// are tried first and the bracket below the first coarse hit is then
  /// searched one size at a time. A crossing that dips back below the target
  /// inside an earlier bracket can be missed, so s = 1 is the exact search.
  int scan_stride = 1;
};

/// Scans basis prefixes 1, 2, ... and stops at the first size with
/// P >= target_p.
MinBasisResult find_min_basis(const ScarMatrices& full, const ResonanceSet& exact, const MinBasisRequest& req);

/// Convenience overload: builds the scar basis from the selection first.
MinBasisResult find_min_basis(const std::vector<PeriodicOrbit>& selection, const CMatrix& u_tilde,
                              const ResonanceSet& exact, const MinBasisRequest& req, int tau);

/// n_sf / N with saturation at 1 (not reached, or n_sf >= N).
double basis_fraction(const MinBasisResult& r, int n_dim);

}  // namespace tribaker
