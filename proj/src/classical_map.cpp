#include "tribaker/classical_map.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include <omp.h>

namespace tribaker {

namespace {

int branch_of(double x) noexcept { return std::clamp(static_cast<int>(3.0 * x), 0, 2); }

constexpr std::uint64_t splitmix(std::uint64_t z) noexcept {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double to_unit(std::uint64_t bits) noexcept {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

void check_request(const MapSpec& spec, const MeasureRequest& req) {
  spec.validate();
  if (req.grid_side <= 0) throw std::invalid_argument("compute_measure: grid_side must be positive");
  if (req.samples == 0) throw std::invalid_argument("compute_measure: samples must be positive");
  if (req.time < 1) throw std::invalid_argument("compute_measure: time must be >= 1");
}

int cell_of(double x, int side) noexcept {
  return std::min(static_cast<int>(x * side), side - 1);
}

// Histogram layout: [cell][visits], visits in 0..time.
void accumulate(const MapSpec& spec, const MeasureRequest& req, std::uint64_t begin,
                std::uint64_t end, std::vector<std::uint64_t>& hist) {
  const auto stride = static_cast<std::size_t>(req.time) + 1;
  for (std::uint64_t i = begin; i < end; ++i) {
    IntensityTrajectory tr{sample_point(req.seed, i), 1.0, 0};
    for (int t = 0; t < req.time; ++t) tr = step_intensity(tr, spec, req.direction);
    const auto cell = static_cast<std::size_t>(cell_of(tr.point.q, req.grid_side)) * req.grid_side +
                      cell_of(tr.point.p, req.grid_side);
    ++hist[cell * stride + tr.opening_visits];
  }
}

MeasureGrid finalize(const MapSpec& spec, const MeasureRequest& req,
                     const std::vector<std::uint64_t>& hist) {
  const auto stride = static_cast<std::size_t>(req.time) + 1;
  std::vector<double> decay(stride);
  for (std::size_t k = 0; k < stride; ++k) decay[k] = std::pow(spec.reflectivity, static_cast<double>(k));

  MeasureGrid grid;
  grid.cells_per_side = req.grid_side;
  grid.time = req.time;
  grid.weights.assign(static_cast<std::size_t>(req.grid_side) * req.grid_side, 0.0);
  double total = 0.0;
  for (std::size_t c = 0; c < grid.weights.size(); ++c) {
    double w = 0.0;
    for (std::size_t k = 0; k < stride; ++k) w += static_cast<double>(hist[c * stride + k]) * decay[k];
    grid.weights[c] = w;
    total += w;
  }
  if (!(total > 0.0)) throw NumericalError("compute_measure: no trajectory retained intensity");
  for (double& w : grid.weights) w /= total;
  return grid;
}

}  // namespace

MapStep baker_forward(PhasePoint x) noexcept {
  const int e = branch_of(x.q);
  return {{wrap_unit(3.0 * x.q - e), wrap_unit((x.p + e) / 3.0)}, e};
}

MapStep baker_backward(PhasePoint x) noexcept {
  const int e = branch_of(x.p);
  return {{wrap_unit((x.q + e) / 3.0), wrap_unit(3.0 * x.p - e)}, e};
}

IntensityTrajectory step_intensity(IntensityTrajectory tr, const MapSpec& spec,
                                   Direction direction) noexcept {
  if (direction == Direction::kForward) {
    if (spec.in_opening(tr.point.q)) {
      tr.intensity *= spec.reflectivity;
      ++tr.opening_visits;
    }
    tr.point = baker_forward(tr.point).point;
  } else {
    tr.point = baker_backward(tr.point).point;
    if (spec.in_opening(tr.point.q)) {
      tr.intensity *= spec.reflectivity;
      ++tr.opening_visits;
    }
  }
  return tr;
}

double MeasureGrid::total() const { return std::accumulate(weights.begin(), weights.end(), 0.0); }

PhasePoint sample_point(std::uint64_t seed, std::uint64_t index) noexcept {
  const std::uint64_t key = splitmix(seed) ^ (index * 0xd1b54a32d192ed03ULL);
  return {to_unit(splitmix(key)), to_unit(splitmix(key ^ 0x8cb92ba72f3d8dd7ULL))};
}

MeasureGrid compute_measure_serial(const MapSpec& spec, const MeasureRequest& req) {
  check_request(spec, req);
  std::vector<std::uint64_t> hist(static_cast<std::size_t>(req.grid_side) * req.grid_side *
                                  (static_cast<std::size_t>(req.time) + 1));
  accumulate(spec, req, 0, req.samples, hist);
  return finalize(spec, req, hist);
}

MeasureGrid compute_measure(const MapSpec& spec, const MeasureRequest& req) {
  check_request(spec, req);
  const std::size_t size = static_cast<std::size_t>(req.grid_side) * req.grid_side *
                           (static_cast<std::size_t>(req.time) + 1);
  std::vector<std::uint64_t> hist(size, 0);
  const int threads = omp_get_max_threads();
  if (threads == 1) {
    accumulate(spec, req, 0, req.samples, hist);
    return finalize(spec, req, hist);
  }

#pragma omp parallel num_threads(threads)
  {
    std::vector<std::uint64_t> local(size, 0);
    const auto nthreads = static_cast<std::uint64_t>(omp_get_num_threads());
    const auto tid = static_cast<std::uint64_t>(omp_get_thread_num());
    const std::uint64_t chunk = (req.samples + nthreads - 1) / nthreads;
    const std::uint64_t begin = std::min(req.samples, tid * chunk);
    const std::uint64_t end = std::min(req.samples, begin + chunk);
    accumulate(spec, req, begin, end, local);
#pragma omp critical
    for (std::size_t k = 0; k < size; ++k) hist[k] += local[k];
  }
  return finalize(spec, req, hist);
}

MeasureGrid partial_repeller_measure(const MeasureGrid& mu_b, const MeasureGrid& mu_f) {
  if (mu_b.cells_per_side != mu_f.cells_per_side || mu_b.time != mu_f.time ||
      mu_b.weights.size() != mu_f.weights.size()) {
    throw std::invalid_argument("partial_repeller_measure: grids differ in geometry or time");
  }
  MeasureGrid out = mu_b;
  double total = 0.0;
  for (std::size_t c = 0; c < out.weights.size(); ++c) {
    out.weights[c] = mu_b.weights[c] * mu_f.weights[c];
    total += out.weights[c];
  }
  if (!(total > 0.0)) throw NumericalError("partial_repeller_measure: disjoint supports, product is zero");
  for (double& w : out.weights) w /= total;
  return out;
}

}  // namespace tribaker
