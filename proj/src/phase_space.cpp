#include "tribaker/phase_space.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "tribaker/scar_basis.hpp"

namespace tribaker {

namespace {

constexpr double kDegenerate = 1e-12;
constexpr Eigen::Index kCellBlock = 256;

// Per-column 1 / <L_j|R_j>, zero for degenerate columns.
CVector inverse_overlaps(const CMatrix& right, const CMatrix& left, std::vector<int>* skipped) {
  if (right.rows() != left.rows() || right.cols() != left.cols()) {
    throw std::invalid_argument("husimi_diagonal: right and left blocks differ in shape");
  }
  CVector inv(right.cols());
  for (Eigen::Index j = 0; j < right.cols(); ++j) {
    const Complex s = left.col(j).dot(right.col(j));
    const double scale = right.col(j).norm() * left.col(j).norm();
    if (!(std::abs(s) >= kDegenerate * std::max(scale, 1e-300))) {
      if (skipped == nullptr) {
        throw DegenerateProjectorError("projector with vanishing <L|R> at column " + std::to_string(j));
      }
      skipped->push_back(static_cast<int>(j));
      inv(j) = 0.0;
    } else {
      inv(j) = 1.0 / s;
    }
  }
  return inv;
}

}  // namespace

CoherentGrid::CoherentGrid(int grid_side, int n, double chi_q, double chi_p) : side_(grid_side), dim_(n) {
  if (grid_side < 1) throw std::invalid_argument("CoherentGrid: grid_side must be >= 1");
  const Eigen::Index cells = static_cast<Eigen::Index>(grid_side) * grid_side;
  bras_.resize(cells, n);
#pragma omp parallel for schedule(static)
  for (Eigen::Index c = 0; c < cells; ++c) {
    const PhasePoint z = center(static_cast<int>(c / grid_side), static_cast<int>(c % grid_side));
    bras_.row(c) = coherent_state(z, n, chi_q, chi_p).adjoint();
  }
}

PhasePoint CoherentGrid::center(int q_cell, int p_cell) const noexcept {
  return {(q_cell + 0.5) / side_, (p_cell + 0.5) / side_};
}

double PhaseSpaceImage::mass(int n) const {
  const double sum = std::accumulate(values.begin(), values.end(), 0.0);
  return n * sum / (static_cast<double>(grid_side) * grid_side);
}

CVector husimi_diagonal_serial(const CoherentGrid& grid, const CMatrix& right, const CMatrix& left,
                               std::vector<int>* skipped) {
  const CVector inv = inverse_overlaps(right, left, skipped);
  const CMatrix& bras = grid.bras();
  CVector diag = CVector::Zero(bras.rows());
  for (Eigen::Index c = 0; c < bras.rows(); ++c) {
    Complex acc = 0.0;
    for (Eigen::Index j = 0; j < right.cols(); ++j) {
      if (inv(j) == Complex(0.0)) continue;
      Complex zr = 0.0;
      Complex zl = 0.0;
      for (Eigen::Index k = 0; k < bras.cols(); ++k) {
        zr += bras(c, k) * right(k, j);
        zl += bras(c, k) * left(k, j);
      }
      acc += zr * std::conj(zl) * inv(j);
    }
    diag(c) = acc;
  }
  return diag;
}

CVector husimi_diagonal(const CoherentGrid& grid, const CMatrix& right, const CMatrix& left,
                        std::vector<int>* skipped) {
  const CVector inv = inverse_overlaps(right, left, skipped);
  const CMatrix& bras = grid.bras();
  const Eigen::Index cells = bras.rows();
  const Eigen::Index blocks = (cells + kCellBlock - 1) / kCellBlock;
  CVector diag(cells);
#pragma omp parallel for schedule(static)
  for (Eigen::Index b = 0; b < blocks; ++b) {
    const Eigen::Index begin = b * kCellBlock;
    const Eigen::Index len = std::min(kCellBlock, cells - begin);
    const CMatrix zr = bras.middleRows(begin, len) * right;
    const CMatrix zl = bras.middleRows(begin, len) * left;
    diag.segment(begin, len) = (zr.array() * zl.array().conjugate()).matrix() * inv;
  }
  return diag;
}

PhaseSpaceImage modulus_image(const CoherentGrid& grid, const CVector& diagonal, std::string label) {
  PhaseSpaceImage img;
  img.grid_side = grid.side();
  img.label = std::move(label);
  img.values.resize(static_cast<std::size_t>(diagonal.size()));
  for (Eigen::Index c = 0; c < diagonal.size(); ++c) img.values[static_cast<std::size_t>(c)] = std::abs(diagonal(c));
  return img;
}

PhaseSpaceImage projector_image(const CVector& right, const CVector& left, const CoherentGrid& grid) {
  return modulus_image(grid, husimi_diagonal(grid, right, left), "projector");
}

PhaseSpaceImage accumulate_q(const CMatrix& right, const CMatrix& left, int j_max, const CoherentGrid& grid,
                             std::vector<int>* skipped) {
  if (j_max < 1 || j_max > right.cols()) throw std::invalid_argument("accumulate_q: j_max out of range");
  std::vector<int> local;
  PhaseSpaceImage img = modulus_image(
      grid, husimi_diagonal(grid, right.leftCols(j_max), left.leftCols(j_max), &local), "Q" + std::to_string(j_max));
  if (skipped != nullptr) skipped->insert(skipped->end(), local.begin(), local.end());
  return img;
}

Complex riemann_trace(const CoherentGrid& grid, const CVector& diagonal) {
  const double cells = static_cast<double>(grid.side()) * grid.side();
  return diagonal.sum() * (grid.dimension() / cells);
}

double overlap(const PhaseSpaceImage& a, const PhaseSpaceImage& b) {
  if (a.grid_side != b.grid_side || a.values.size() != b.values.size()) {
    throw std::invalid_argument("overlap: images are on different grids");
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (!(na > 0.0) || !(nb > 0.0)) throw NumericalError("overlap: zero-norm image");
  return dot / std::sqrt(na * nb);
}

}  // namespace tribaker
