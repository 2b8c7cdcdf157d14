#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace tribaker {

using Complex = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Raised when a numerical routine cannot produce a meaningful result
/// (non-convergence, degenerate normalization, empty spectrum).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point on the unit 2-torus. Map operations keep 0 <= q, p < 1.
struct PhasePoint {
  double q = 0.0;
  double p = 0.0;

  friend bool operator==(const PhasePoint&, const PhasePoint&) = default;
};

enum class Direction { kForward, kBackward };

/// Problem definition for the partially open tribaker map.
struct MapSpec {
  int n_dim = 243;
  double reflectivity = 1.0;
  double opening_lo = 1.0 / 3.0;
  double opening_hi = 2.0 / 3.0;
  double chi_q = 0.5;
  double chi_p = 0.5;

  static constexpr double kLyapunov = 1.0986122886681098;  // ln 3

  /// Half-open test lo <= q < hi, which coincides with the middle branch of
  /// the map.
  [[nodiscard]] bool in_opening(double q) const noexcept {
    return q >= opening_lo && q < opening_hi;
  }

  void validate() const {
    if (n_dim <= 0 || n_dim % 3 != 0) {
      throw std::invalid_argument("MapSpec: dimension must be a positive multiple of 3, got " +
                                  std::to_string(n_dim));
    }
    if (!(reflectivity >= 0.0 && reflectivity <= 1.0)) {
      throw std::invalid_argument("MapSpec: reflectivity must lie in [0,1]");
    }
  }
};

/// Reduces x into [0,1).
inline double wrap_unit(double x) noexcept {
  double r = x - std::floor(x);
  return r >= 1.0 ? 0.0 : r;
}

}  // namespace tribaker
