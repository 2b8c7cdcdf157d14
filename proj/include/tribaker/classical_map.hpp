#pragma once

#include <cstdint>
#include <vector>

#include "tribaker/types.hpp"

namespace tribaker {

struct MapStep {
  PhasePoint point;
  int symbol = 0;
};

/// B(q,p) = (3q - e, (p + e)/3) with branch symbol e = floor(3q).
MapStep baker_forward(PhasePoint x) noexcept;

/// Inverse branch selected by e = floor(3p): ((q + e)/3, 3p - e).
MapStep baker_backward(PhasePoint x) noexcept;

struct IntensityTrajectory {
  PhasePoint point;
  double intensity = 1.0;
  int opening_visits = 0;
};

/// Advances one step, multiplying the intensity by R once for every transit
/// through the opening. A transit is charged to the point at which the
/// forward-time map is applied: the pre-step point when stepping forward and
/// the post-step point when stepping backward.
IntensityTrajectory step_intensity(IntensityTrajectory tr, const MapSpec& spec,
                                   Direction direction) noexcept;

/// Per-cell weights of a phase-space measure, row index = q cell, column
/// index = p cell.
struct MeasureGrid {
  int cells_per_side = 0;
  int time = 0;
  std::vector<double> weights;  // q-major, size cells_per_side^2

  [[nodiscard]] double& at(int q_cell, int p_cell) {
    return weights[static_cast<std::size_t>(q_cell) * cells_per_side + p_cell];
  }
  [[nodiscard]] double at(int q_cell, int p_cell) const {
    return weights[static_cast<std::size_t>(q_cell) * cells_per_side + p_cell];
  }
  [[nodiscard]] double total() const;
};

struct MeasureRequest {
  int time = 10;
  Direction direction = Direction::kForward;
  int grid_side = 243;
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
};

/// Monte-Carlo estimate of the finite-time intensity measure: uniform
/// initial conditions evolved `time` steps, final intensity deposited at the
/// endpoint cell, normalized to unit mass. Forward evolution gives mu^b,
/// backward gives mu^f.
///
/// Sample i draws its initial point from a counter-based stream keyed by
/// (seed, i), and the accumulator is an integer histogram over
/// (cell, number of opening visits), so the result is bit-identical for any
/// thread count. Throws std::invalid_argument on bad sizes and
/// NumericalError if every trajectory carries zero intensity.
MeasureGrid compute_measure(const MapSpec& spec, const MeasureRequest& req);

/// Single-threaded reference for compute_measure.
MeasureGrid compute_measure_serial(const MapSpec& spec, const MeasureRequest& req);

/// Cellwise product of two measures, renormalized. Throws
/// std::invalid_argument on mismatched geometry and NumericalError when the
/// supports are disjoint.
MeasureGrid partial_repeller_measure(const MeasureGrid& mu_b, const MeasureGrid& mu_f);

/// Uniform point in [0,1)^2 for sample `index` of stream `seed`.
PhasePoint sample_point(std::uint64_t seed, std::uint64_t index) noexcept;

}  // namespace tribaker
