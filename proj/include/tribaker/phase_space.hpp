#pragma once

#include <string>
#include <vector>

#include "tribaker/types.hpp"

namespace tribaker {

/// Coherent states centered on the cell midpoints of a grid_side x
/// grid_side grid, stored as conjugated rows so that bras() * psi gives
/// <q,p|psi> for every center at once. Row index = q_cell * side + p_cell.
class CoherentGrid {
 public:
  CoherentGrid(int grid_side, int n, double chi_q = 0.5, double chi_p = 0.5);

  [[nodiscard]] int side() const noexcept { return side_; }
  [[nodiscard]] int dimension() const noexcept { return dim_; }
  [[nodiscard]] const CMatrix& bras() const noexcept { return bras_; }
  [[nodiscard]] PhasePoint center(int q_cell, int p_cell) const noexcept;

 private:
  int side_;
  int dim_;
  CMatrix bras_;
};

struct PhaseSpaceImage {
  int grid_side = 0;
  std::vector<double> values;  // q-major
  std::string label;

  [[nodiscard]] double at(int q_cell, int p_cell) const {
    return values[static_cast<std::size_t>(q_cell) * grid_side + p_cell];
  }
  /// n times the Riemann sum over the unit torus.
  [[nodiscard]] double mass(int n) const;
};

class DegenerateProjectorError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Complex coherent-state diagonal <q,p| sum_j |R_j><L_j| / <L_j|R_j> |q,p>
/// over the columns of `right`/`left`. Columns with |<L|R>| < 1e-12 are
/// skipped and their indices appended to `skipped` (or, when `skipped` is
/// null, reported by throwing DegenerateProjectorError).
CVector husimi_diagonal(const CoherentGrid& grid, const CMatrix& right, const CMatrix& left,
                        std::vector<int>* skipped = nullptr);

/// Single-threaded, loop-level reference for husimi_diagonal.
CVector husimi_diagonal_serial(const CoherentGrid& grid, const CMatrix& right, const CMatrix& left,
                               std::vector<int>* skipped = nullptr);

/// |diagonal| as an image.
PhaseSpaceImage modulus_image(const CoherentGrid& grid, const CVector& diagonal, std::string label = {});

/// Image of h = |R><L| / <L|R>. Throws DegenerateProjectorError when
/// |<L|R>| < 1e-12.
PhaseSpaceImage projector_image(const CVector& right, const CVector& left, const CoherentGrid& grid);

/// Image of Q_j, the sum of the first j_max projectors (columns assumed
/// ordered by decreasing |z|). Degenerate columns are skipped and listed in
/// `skipped` when provided.
PhaseSpaceImage accumulate_q(const CMatrix& right, const CMatrix& left, int j_max, const CoherentGrid& grid,
                             std::vector<int>* skipped = nullptr);

/// n times the Riemann sum of a complex diagonal; equals the trace of the
/// operator up to discretization error.
Complex riemann_trace(const CoherentGrid& grid, const CVector& diagonal);

/// sum a*b / (|a|_2 |b|_2). Throws std::invalid_argument on mismatched grids
/// and NumericalError on a zero image.
double overlap(const PhaseSpaceImage& a, const PhaseSpaceImage& b);

}  // namespace tribaker
