#pragma once

#include <vector>

#include "rsddog/filterbank.hpp"
#include "rsddog/image.hpp"

namespace rsddog {

/// D(x, y, θ) sampled at θ = k·Δθ for one pixel. Indices wrap modulo N.
struct PixelSignal {
  std::vector<double> values;
  double delta_theta = 10.0;
  int x = 0;
  int y = 0;
};

/// Two strongest circular maxima and minima of a pixel signal.
///
/// A single extremum is duplicated into both slots; with none, the count is
/// zero and the slot angles and magnitudes are 0.
struct PeakSet {
  double theta_max1 = 0.0, theta_max2 = 0.0;
  double theta_min1 = 0.0, theta_min2 = 0.0;
  double mag_max1 = 0.0, mag_max2 = 0.0;
  double mag_min1 = 0.0, mag_min2 = 0.0;
  int max_count = 0;
  int min_count = 0;
};

struct EtaDelta {
  double eta1 = 0.0;
  double delta1 = 0.0;
  double eta2 = 0.0;
  double delta2 = 0.0;
};

/// Per-pixel (η1, δ1, η2, δ2). Invalid pixels carry δ1 = δ2 = 0.
struct OrientationField {
  int width = 0;
  int height = 0;
  std::vector<double> eta1, delta1, eta2, delta2;
  std::vector<unsigned char> valid;

  std::size_t index(int x, int y) const { return std::size_t(y) * width + x; }
};

PixelSignal pixel_signal(const DhsfStack& stack, int x, int y);

/// Circular local extrema with plateau handling: a maximal run of equal
/// samples whose two outside neighbours are both strictly lower (higher) is
/// one maximum (minimum), reported at the run's lowest index.
PeakSet extract_peaks(const PixelSignal& signal);

/// Shorter-arc circular midpoint of two angles, in [0, 360). Exactly
/// antipodal pairs resolve to the midpoint lying in [0, 180).
double circular_midpoint(double a_deg, double b_deg);

/// η = circular midpoints of the peak pairs, δ = mean magnitudes.
EtaDelta eta_delta(const PeakSet& peaks);

/// pixel_signal -> extract_peaks -> eta_delta at every pixel. A pixel is
/// invalid when its signal has neither maxima nor minima.
OrientationField orientation_field(const DhsfStack& stack);

}  // namespace rsddog
