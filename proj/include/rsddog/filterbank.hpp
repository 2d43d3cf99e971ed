#pragma once

#include <span>
#include <string>
#include <vector>

#include "rsddog/image.hpp"

namespace rsddog {

struct KernelParams {
  double mu = 6.0;          // std-dev along the filter direction
  double lambda = 2.0;      // std-dev across the filter direction
  double theta = 0.0;       // degrees, normalized into [0, 360) by build_kernel
  double truncation = 3.0;  // support half-extent in std-devs, per axis
};

/// Anisotropic Gaussian cut to the half-plane that points along θ.
///
/// A tap at grid offset (dx, dy) from the anchor has frame coordinates
/// u = along(dx, dy), v = across(dx, dy) (see Frame). It is nonzero iff
/// 0 <= u <= truncation*mu and |v| <= truncation*lambda, and proportional to
/// exp(-u²/2mu² - v²/2lambda²). Taps sum to one.
struct HalfGaussianKernel {
  int width = 0;
  int height = 0;
  int anchor_x = 0;  // column of offset (0, 0) inside the tap grid
  int anchor_y = 0;
  std::vector<double> taps;  // row-major, width*height
  KernelParams params;
  double normalization = 1.0;  // the coefficient C actually applied

  /// Tap at an offset from the anchor; zero outside the grid.
  double tap(int dx, int dy) const;
};

HalfGaussianKernel build_kernel(KernelParams params);

enum class SmoothMethod { RotateImage, DirectConvolution };

SmoothMethod parse_smooth_method(const std::string& name);

/// I_θ = I ⋆ G(θ) for θ = k·Δθ, k = 0 .. 360/Δθ - 1.
///
/// Filtering is a correlation: I_θ(p) = Σ_o tap_θ(o)·I(p + o), so slice θ
/// averages the half-plane of the image lying in direction θ from p.
struct DirectionalStack {
  std::vector<GrayImage> slices;
  double delta_theta = 10.0;
  double mu = 0.0;
  double lambda = 0.0;
  SmoothMethod method = SmoothMethod::RotateImage;
};

/// D(·,·,θ) = I_θ(λ1) - I_θ(λ2).
struct DhsfStack {
  std::vector<GrayImage> slices;
  double delta_theta = 10.0;
  double mu = 0.0;
  double lambda1 = 0.0;
  double lambda2 = 0.0;

  int width() const { return slices.front().width(); }
  int height() const { return slices.front().height(); }
  int orientations() const { return int(slices.size()); }
};

/// Number of orientations for a step; throws ParameterError unless the step
/// divides 360. Steps outside {1, 2, 5, 10} are accepted with a warning.
int orientation_count(double delta_theta);

/// RotateImage resamples the image into each orientation's frame (Keys cubic,
/// replicated border), applies the separable θ=0 kernel and resamples back.
/// DirectConvolution correlates with build_kernel(θ); it is slower and serves
/// as the reference path.
DirectionalStack smooth_stack(const GrayImage& image, double mu, double lambda,
                              double delta_theta,
                              SmoothMethod method = SmoothMethod::RotateImage,
                              double truncation = 3.0);

/// Smooths with several widths sharing one rotation of the image per θ, so
/// resampling error is identical across the returned stacks.
std::vector<DirectionalStack> smooth_stacks(const GrayImage& image, double mu,
                                            std::span<const double> lambdas,
                                            double delta_theta,
                                            SmoothMethod method = SmoothMethod::RotateImage,
                                            double truncation = 3.0);

DhsfStack dhsf_stack(const GrayImage& image, double mu, double lambda1, double lambda2,
                     double delta_theta, SmoothMethod method = SmoothMethod::RotateImage,
                     double truncation = 3.0);

/// Differences of consecutive widths: result[i] uses (lambdas[i], lambdas[i+1]).
/// Each intermediate smoothing stack is computed once.
std::vector<DhsfStack> dhsf_stacks(const GrayImage& image, double mu,
                                   std::span<const double> lambdas, double delta_theta,
                                   SmoothMethod method = SmoothMethod::RotateImage,
                                   double truncation = 3.0);

}  // namespace rsddog
