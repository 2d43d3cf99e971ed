#pragma once

#include <cmath>
#include <numbers>

namespace rsddog {

inline double deg2rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / std::numbers::pi; }

/// Reduces an angle into [0, 360).
inline double wrap_degrees(double deg) {
  double r = std::fmod(deg, 360.0);
  if (r < 0.0) r += 360.0;
  if (r >= 360.0) r -= 360.0;
  return r;
}

/// Orthonormal frame attached to direction θ on the (column, row) grid.
///
/// `along` is the unit vector (cos θ, -sin θ): θ = 0 points to increasing
/// columns and θ = 90 points up (decreasing rows). `across` is (sin θ, cos θ).
/// Exact zeros are kept for multiples of 90 degrees so that half-plane tests
/// on axis-aligned taps are not decided by rounding noise.
struct Frame {
  double c;
  double s;

  explicit Frame(double theta_deg) {
    const double t = wrap_degrees(theta_deg);
    if (t == 0.0) {
      c = 1.0, s = 0.0;
    } else if (t == 90.0) {
      c = 0.0, s = 1.0;
    } else if (t == 180.0) {
      c = -1.0, s = 0.0;
    } else if (t == 270.0) {
      c = 0.0, s = -1.0;
    } else {
      c = std::cos(deg2rad(t));
      s = std::sin(deg2rad(t));
    }
  }

  /// Frame coordinates (a along, b across) -> grid offset.
  double to_dx(double a, double b) const { return a * c + b * s; }
  double to_dy(double a, double b) const { return -a * s + b * c; }

  /// Grid offset -> frame coordinates.
  double along(double dx, double dy) const { return dx * c - dy * s; }
  double across(double dx, double dy) const { return dx * s + dy * c; }
};

}  // namespace rsddog
