#include "rsddog/filterbank.hpp"

#include <algorithm>
#include <cmath>

#include "rsddog/error.hpp"
#include "rsddog/geometry.hpp"

namespace rsddog {

namespace {

// Taps whose along-coordinate is within this of zero sit on the cut line.
constexpr double kCutTolerance = 1e-9;
// Heaviside value on the cut line, H(0) = 1/2.
constexpr double kCutWeight = 0.5;

void check_widths(double mu, double lambda, double truncation) {
  if (!(mu > 0.0) || !(lambda > 0.0) || !(truncation > 0.0)) {
    throw ParameterError("kernel requires mu > 0, lambda > 0 and truncation > 0");
  }
}

// One-sided weights along the filter axis, offsets 0..n-1, unnormalized.
std::vector<double> along_weights(double mu, double truncation) {
  const int n = int(std::floor(truncation * mu)) + 1;
  std::vector<double> w(n);
  for (int k = 0; k < n; ++k) w[k] = std::exp(-double(k) * k / (2.0 * mu * mu));
  w[0] *= kCutWeight;
  return w;
}

// Symmetric weights across the axis, offsets -r..r, unnormalized.
std::vector<double> across_weights(double lambda, double truncation) {
  const int r = int(std::floor(truncation * lambda));
  std::vector<double> w(2 * r + 1);
  for (int j = -r; j <= r; ++j) w[j + r] = std::exp(-double(j) * j / (2.0 * lambda * lambda));
  return w;
}

void normalize(std::vector<double>& w) {
  double sum = 0.0;
  for (double v : w) sum += v;
  for (double& v : w) v /= sum;
}

// Correlation along rows of a canvas with a one-sided kernel, in the
// anchor-relative form out = x + Σ w_k (in[x+k] - in[x]); a constant input
// reproduces itself bit-exactly. `in` has `in_width` >= out_width + n - 1.
void correlate_rows(const std::vector<double>& in, int in_width, int rows,
                    const std::vector<double>& w, std::vector<double>& out, int out_width) {
  out.assign(std::size_t(out_width) * rows, 0.0);
  const int n = int(w.size());
  for (int r = 0; r < rows; ++r) {
    const double* src = in.data() + std::size_t(r) * in_width;
    double* dst = out.data() + std::size_t(r) * out_width;
    for (int x = 0; x < out_width; ++x) {
      const double anchor = src[x];
      double acc = 0.0;
      for (int k = 1; k < n; ++k) acc += w[k] * (src[x + k] - anchor);
      dst[x] = anchor + acc;
    }
  }
}

// Correlation along columns with a symmetric kernel of radius r; `in` has
// out_rows + 2r rows of `width` samples.
void correlate_cols(const std::vector<double>& in, int width, int out_rows,
                    const std::vector<double>& w, std::vector<double>& out) {
  const int r = int(w.size() / 2);
  out.assign(std::size_t(width) * out_rows, 0.0);
  for (int y = 0; y < out_rows; ++y) {
    const double* center = in.data() + std::size_t(y + r) * width;
    double* dst = out.data() + std::size_t(y) * width;
    for (int x = 0; x < width; ++x) dst[x] = 0.0;
    for (int j = -r; j <= r; ++j) {
      if (j == 0) continue;
      const double wj = w[j + r];
      const double* src = center + std::ptrdiff_t(j) * width;
      for (int x = 0; x < width; ++x) dst[x] += wj * (src[x] - center[x]);
    }
    for (int x = 0; x < width; ++x) dst[x] += center[x];
  }
}

GrayImage direct_correlate(const GrayImage& image, const HalfGaussianKernel& kernel) {
  struct Tap {
    int dx, dy;
    double w;
  };
  std::vector<Tap> taps;
  for (int ky = 0; ky < kernel.height; ++ky) {
    for (int kx = 0; kx < kernel.width; ++kx) {
      const double w = kernel.taps[std::size_t(ky) * kernel.width + kx];
      const int dx = kx - kernel.anchor_x;
      const int dy = ky - kernel.anchor_y;
      if (w != 0.0 && (dx != 0 || dy != 0)) taps.push_back({dx, dy, w});
    }
  }
  GrayImage out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const double anchor = image.at(x, y);
      double acc = 0.0;
      for (const Tap& t : taps) acc += t.w * (image.clamped(x + t.dx, y + t.dy) - anchor);
      out.at(x, y) = anchor + acc;
    }
  }
  return out;
}

// Rotate-image pipeline for one orientation: resample the image into the
// frame of θ, run the θ=0 separable half kernel once per width, and sample
// each result back at the source grid positions. Both resamplings are cubic
// with replicated borders.
std::vector<GrayImage> rotated_smooth(const GrayImage& image, double theta, double mu,
                                      std::span<const double> lambdas, double truncation) {
  const Frame f(theta);
  const double cx = image.width() / 2;
  const double cy = image.height() / 2;

  // Frame-coordinate bounding box of the source grid.
  double amin = 1e300, amax = -1e300, bmin = 1e300, bmax = -1e300;
  for (double dx : {-cx, image.width() - 1 - cx}) {
    for (double dy : {-cy, image.height() - 1 - cy}) {
      amin = std::min(amin, f.along(dx, dy));
      amax = std::max(amax, f.along(dx, dy));
      bmin = std::min(bmin, f.across(dx, dy));
      bmax = std::max(bmax, f.across(dx, dy));
    }
  }
  const int a0 = int(std::floor(amin + 1e-9));
  const int b0 = int(std::floor(bmin + 1e-9));
  const int out_w = int(std::ceil(amax - 1e-9)) - a0 + 1;
  const int out_h = int(std::ceil(bmax - 1e-9)) - b0 + 1;

  const auto wa = [&] {
    auto w = along_weights(mu, truncation);
    normalize(w);
    return w;
  }();
  int max_r = 0;
  std::vector<std::vector<double>> wbs;
  for (double lambda : lambdas) {
    auto w = across_weights(lambda, truncation);
    normalize(w);
    max_r = std::max(max_r, int(w.size() / 2));
    wbs.push_back(std::move(w));
  }

  // Rotated canvas: columns a0 .. a0+out_w-1+len(wa)-1, rows b0-max_r .. .
  const int can_w = out_w + int(wa.size()) - 1;
  const int can_h = out_h + 2 * max_r;
  std::vector<double> canvas(std::size_t(can_w) * can_h);
  for (int r = 0; r < can_h; ++r) {
    const double b = b0 - max_r + r;
    for (int c = 0; c < can_w; ++c) {
      const double a = a0 + c;
      canvas[std::size_t(r) * can_w + c] = image.bicubic(cx + f.to_dx(a, b), cy + f.to_dy(a, b));
    }
  }
  std::vector<double> along_pass;
  correlate_rows(canvas, can_w, can_h, wa, along_pass, out_w);

  std::vector<GrayImage> result;
  result.reserve(lambdas.size());
  std::vector<double> smoothed;
  for (const auto& wb : wbs) {
    const int r = int(wb.size() / 2);
    const int skip = max_r - r;
    std::vector<double> sub(along_pass.begin() + std::ptrdiff_t(skip) * out_w,
                            along_pass.begin() + std::ptrdiff_t(skip + out_h + 2 * r) * out_w);
    correlate_cols(sub, out_w, out_h, wb, smoothed);
    GrayImage rotated(out_w, out_h, std::move(smoothed));
    GrayImage back(image.width(), image.height());
    for (int y = 0; y < image.height(); ++y) {
      for (int x = 0; x < image.width(); ++x) {
        const double dx = x - cx;
        const double dy = y - cy;
        back.at(x, y) = rotated.bicubic(f.along(dx, dy) - a0, f.across(dx, dy) - b0);
      }
    }
    result.push_back(std::move(back));
    smoothed.clear();
  }
  return result;
}

}  // namespace

double HalfGaussianKernel::tap(int dx, int dy) const {
  const int kx = dx + anchor_x;
  const int ky = dy + anchor_y;
  if (kx < 0 || ky < 0 || kx >= width || ky >= height) return 0.0;
  return taps[std::size_t(ky) * width + kx];
}

HalfGaussianKernel build_kernel(KernelParams params) {
  check_widths(params.mu, params.lambda, params.truncation);
  params.theta = wrap_degrees(params.theta);
  const Frame f(params.theta);
  const double umax = params.truncation * params.mu;
  const double vmax = params.truncation * params.lambda;
  const int radius = int(std::ceil(std::hypot(umax, vmax))) + 1;

  struct Sample {
    int dx, dy;
    double w;
  };
  std::vector<Sample> kept;
  int xmin = 0, xmax = 0, ymin = 0, ymax = 0;
  for (int dy = -radius; dy <= radius; ++dy) {
    for (int dx = -radius; dx <= radius; ++dx) {
      double u = f.along(dx, dy);
      double v = f.across(dx, dy);
      if (std::abs(u) < kCutTolerance) u = 0.0;
      if (u < 0.0 || u > umax + kCutTolerance || std::abs(v) > vmax + kCutTolerance) continue;
      double w = std::exp(-u * u / (2.0 * params.mu * params.mu) -
                          v * v / (2.0 * params.lambda * params.lambda));
      if (u == 0.0) w *= kCutWeight;
      kept.push_back({dx, dy, w});
      xmin = std::min(xmin, dx), xmax = std::max(xmax, dx);
      ymin = std::min(ymin, dy), ymax = std::max(ymax, dy);
    }
  }
  double sum = 0.0;
  for (const auto& s : kept) sum += s.w;
  if (!(sum > 0.0)) throw ParameterError("half Gaussian kernel has empty support");

  HalfGaussianKernel k;
  k.params = params;
  k.width = xmax - xmin + 1;
  k.height = ymax - ymin + 1;
  k.anchor_x = -xmin;
  k.anchor_y = -ymin;
  k.normalization = 1.0 / sum;
  k.taps.assign(std::size_t(k.width) * k.height, 0.0);
  for (const auto& s : kept) {
    k.taps[std::size_t(s.dy + k.anchor_y) * k.width + (s.dx + k.anchor_x)] = s.w * k.normalization;
  }
  return k;
}

SmoothMethod parse_smooth_method(const std::string& name) {
  if (name == "rotate" || name == "rotate-image") return SmoothMethod::RotateImage;
  if (name == "direct" || name == "direct-convolution") return SmoothMethod::DirectConvolution;
  throw UsageError("unknown smoothing method '" + name + "' (expected rotate or direct)");
}

int orientation_count(double delta_theta) {
  if (!(delta_theta > 0.0) || delta_theta > 360.0) {
    throw ParameterError("delta_theta must lie in (0, 360]");
  }
  const double n = 360.0 / delta_theta;
  const double rounded = std::round(n);
  if (std::abs(n - rounded) > 1e-9) {
    throw ParameterError("delta_theta must divide 360");
  }
  if (delta_theta != 1.0 && delta_theta != 2.0 && delta_theta != 5.0 && delta_theta != 10.0) {
    warn("delta_theta outside the usual {1, 2, 5, 10} degrees");
  }
  return int(rounded);
}

std::vector<DirectionalStack> smooth_stacks(const GrayImage& image, double mu,
                                            std::span<const double> lambdas,
                                            double delta_theta, SmoothMethod method,
                                            double truncation) {
  for (double lambda : lambdas) check_widths(mu, lambda, truncation);
  const int n = orientation_count(delta_theta);

  std::vector<DirectionalStack> stacks(lambdas.size());
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    stacks[i].delta_theta = delta_theta;
    stacks[i].mu = mu;
    stacks[i].lambda = lambdas[i];
    stacks[i].method = method;
    stacks[i].slices.reserve(n);
  }
  for (int k = 0; k < n; ++k) {
    const double theta = k * delta_theta;
    if (method == SmoothMethod::RotateImage) {
      auto slices = rotated_smooth(image, theta, mu, lambdas, truncation);
      for (std::size_t i = 0; i < lambdas.size(); ++i) {
        stacks[i].slices.push_back(std::move(slices[i]));
      }
    } else {
      for (std::size_t i = 0; i < lambdas.size(); ++i) {
        const auto kernel = build_kernel({mu, lambdas[i], theta, truncation});
        stacks[i].slices.push_back(direct_correlate(image, kernel));
      }
    }
  }
  return stacks;
}

DirectionalStack smooth_stack(const GrayImage& image, double mu, double lambda,
                              double delta_theta, SmoothMethod method, double truncation) {
  const double lambdas[] = {lambda};
  return std::move(smooth_stacks(image, mu, lambdas, delta_theta, method, truncation).front());
}

std::vector<DhsfStack> dhsf_stacks(const GrayImage& image, double mu,
                                   std::span<const double> lambdas, double delta_theta,
                                   SmoothMethod method, double truncation) {
  if (lambdas.size() < 2) throw ParameterError("at least two widths are required");
  for (std::size_t i = 0; i + 1 < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0) || !(lambdas[i] < lambdas[i + 1])) {
      throw ParameterError("widths must satisfy 0 < lambda1 < lambda2");
    }
  }
  const auto smoothed = smooth_stacks(image, mu, lambdas, delta_theta, method, truncation);
  std::vector<DhsfStack> out;
  for (std::size_t i = 0; i + 1 < smoothed.size(); ++i) {
    DhsfStack d;
    d.delta_theta = delta_theta;
    d.mu = mu;
    d.lambda1 = lambdas[i];
    d.lambda2 = lambdas[i + 1];
    d.slices.reserve(smoothed[i].slices.size());
    for (std::size_t k = 0; k < smoothed[i].slices.size(); ++k) {
      GrayImage diff = smoothed[i].slices[k];
      auto lo = smoothed[i + 1].slices[k].samples();
      auto dst = diff.samples();
      for (std::size_t j = 0; j < dst.size(); ++j) dst[j] -= lo[j];
      d.slices.push_back(std::move(diff));
    }
    out.push_back(std::move(d));
  }
  return out;
}

DhsfStack dhsf_stack(const GrayImage& image, double mu, double lambda1, double lambda2,
                     double delta_theta, SmoothMethod method, double truncation) {
  const double lambdas[] = {lambda1, lambda2};
  return std::move(dhsf_stacks(image, mu, lambdas, delta_theta, method, truncation).front());
}

}  // namespace rsddog
