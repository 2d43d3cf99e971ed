#include "rsddog/dirsignal.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rsddog/error.hpp"
#include "rsddog/geometry.hpp"

namespace rsddog {

namespace {

struct Extremum {
  int index;
  double value;
};

// Circular plateau-aware scan; returns maxima and minima in index order.
void find_extrema(const std::vector<double>& v, std::vector<Extremum>& maxima,
                  std::vector<Extremum>& minima) {
  const int n = int(v.size());
  maxima.clear();
  minima.clear();
  if (n < 3) return;
  auto at = [&](int i) { return v[std::size_t(((i % n) + n) % n)]; };

  int start = -1;
  for (int i = 0; i < n; ++i) {
    if (at(i) != at(i - 1)) {
      start = i;
      break;
    }
  }
  if (start < 0) return;  // constant signal

  int i = start;
  while (i < start + n) {
    int j = i + 1;
    while (j < start + n && at(j) == at(i)) ++j;
    const double value = at(i);
    const double prev = at(i - 1);
    const double next = at(j);
    int lowest = n;
    for (int k = i; k < j; ++k) lowest = std::min(lowest, k % n);
    if (prev < value && next < value) maxima.push_back({lowest, value});
    if (prev > value && next > value) minima.push_back({lowest, value});
    i = j;
  }
}

}  // namespace

PixelSignal pixel_signal(const DhsfStack& stack, int x, int y) {
  if (stack.slices.empty() || !stack.slices.front().contains(x, y)) {
    throw BoundsError("pixel (" + std::to_string(x) + ", " + std::to_string(y) +
                      ") outside the stack");
  }
  PixelSignal s;
  s.delta_theta = stack.delta_theta;
  s.x = x;
  s.y = y;
  s.values.reserve(stack.slices.size());
  for (const auto& slice : stack.slices) s.values.push_back(slice.at(x, y));
  return s;
}

PeakSet extract_peaks(const PixelSignal& signal) {
  std::vector<Extremum> maxima, minima;
  find_extrema(signal.values, maxima, minima);

  // Stable sort keeps the index (angle) order among equal values.
  std::stable_sort(maxima.begin(), maxima.end(),
                   [](const Extremum& a, const Extremum& b) { return a.value > b.value; });
  std::stable_sort(minima.begin(), minima.end(),
                   [](const Extremum& a, const Extremum& b) { return a.value < b.value; });

  PeakSet p;
  p.max_count = int(maxima.size());
  p.min_count = int(minima.size());
  const double step = signal.delta_theta;
  if (!maxima.empty()) {
    const Extremum& first = maxima[0];
    const Extremum& second = maxima.size() > 1 ? maxima[1] : maxima[0];
    p.theta_max1 = first.index * step;
    p.theta_max2 = second.index * step;
    p.mag_max1 = std::abs(first.value);
    p.mag_max2 = std::abs(second.value);
  }
  if (!minima.empty()) {
    const Extremum& first = minima[0];
    const Extremum& second = minima.size() > 1 ? minima[1] : minima[0];
    p.theta_min1 = first.index * step;
    p.theta_min2 = second.index * step;
    p.mag_min1 = std::abs(first.value);
    p.mag_min2 = std::abs(second.value);
  }
  return p;
}

double circular_midpoint(double a_deg, double b_deg) {
  const double a = wrap_degrees(a_deg);
  const double b = wrap_degrees(b_deg);
  double diff = b - a;  // signed arc from a to b in (-360, 360)
  if (diff > 180.0) diff -= 360.0;
  if (diff < -180.0) diff += 360.0;
  if (std::abs(diff) == 180.0) {
    const double m = wrap_degrees(a + 90.0);
    return m < 180.0 ? m : m - 180.0;
  }
  return wrap_degrees(a + diff / 2.0);
}

EtaDelta eta_delta(const PeakSet& peaks) {
  EtaDelta r;
  if (peaks.max_count > 0) {
    r.eta1 = circular_midpoint(peaks.theta_max1, peaks.theta_max2);
    r.delta1 = 0.5 * (peaks.mag_max1 + peaks.mag_max2);
  }
  if (peaks.min_count > 0) {
    r.eta2 = circular_midpoint(peaks.theta_min1, peaks.theta_min2);
    r.delta2 = 0.5 * (peaks.mag_min1 + peaks.mag_min2);
  }
  return r;
}

OrientationField orientation_field(const DhsfStack& stack) {
  OrientationField f;
  if (stack.slices.empty()) return f;
  f.width = stack.width();
  f.height = stack.height();
  const std::size_t n = std::size_t(f.width) * f.height;
  f.eta1.assign(n, 0.0);
  f.delta1.assign(n, 0.0);
  f.eta2.assign(n, 0.0);
  f.delta2.assign(n, 0.0);
  f.valid.assign(n, 0);

  PixelSignal signal;
  signal.delta_theta = stack.delta_theta;
  signal.values.resize(stack.slices.size());
  for (int y = 0; y < f.height; ++y) {
    for (int x = 0; x < f.width; ++x) {
      for (std::size_t k = 0; k < stack.slices.size(); ++k) {
        signal.values[k] = stack.slices[k].at(x, y);
      }
      signal.x = x;
      signal.y = y;
      const PeakSet peaks = extract_peaks(signal);
      const std::size_t i = f.index(x, y);
      if (peaks.max_count == 0 && peaks.min_count == 0) continue;
      const EtaDelta ed = eta_delta(peaks);
      f.eta1[i] = ed.eta1;
      f.delta1[i] = ed.delta1;
      f.eta2[i] = ed.eta2;
      f.delta2[i] = ed.delta2;
      f.valid[i] = 1;
    }
  }
  return f;
}

}  // namespace rsddog
