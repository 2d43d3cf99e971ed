#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rsddog/image.hpp"

namespace rsddog {

/// Elliptical keypoint a(u-x)² + 2b(u-x)(v-y) + c(v-y)² = 1.
struct AffineRegion {
  double x = 0.0;
  double y = 0.0;
  double a = 1.0;
  double b = 0.0;
  double c = 1.0;
  std::optional<double> orientation;  // degrees

  bool positive_definite() const { return a > 0.0 && a * c - b * b > 0.0; }

  static AffineRegion circle(double x, double y, double radius) {
    const double inv = 1.0 / (radius * radius);
    return {x, y, inv, 0.0, inv, std::nullopt};
  }
};

/// Contents of an Oxford affine-region file. `dimension` is the first line
/// (0 or 1 for detector output); descriptors are populated when it exceeds 1.
struct RegionFile {
  int dimension = 1;
  std::vector<AffineRegion> regions;
  std::vector<std::vector<double>> descriptors;
};

RegionFile read_regions(const std::string& path);
RegionFile parse_regions(std::istream& in, const std::string& origin = "<stream>");

/// Region fields are written with 10 significant digits, descriptor values
/// with 6. Descriptors may be empty (detector file) or one per region.
void write_regions(std::ostream& out, const RegionFile& file);
void write_regions(const std::string& path, const RegionFile& file);

/// 3x3 mapping from image A to image B, row-major, scaled so h[8] == 1
/// whenever the original h[8] is nonzero.
class Homography {
 public:
  Homography();
  explicit Homography(const std::array<double, 9>& h);

  const std::array<double, 9>& matrix() const { return h_; }
  double operator()(int r, int c) const { return h_[std::size_t(r) * 3 + c]; }

  std::array<double, 2> apply(double x, double y) const;
  /// Jacobian of the projective map at (x, y), row-major 2x2.
  std::array<double, 4> jacobian(double x, double y) const;
  double determinant() const;

  static Homography identity() { return Homography(); }
  /// Rotation by `angle_deg` (counter-clockwise as displayed) about (cx, cy).
  static Homography rotation(double angle_deg, double cx, double cy);

 private:
  std::array<double, 9> h_;
};

Homography read_homography(const std::string& path);
Homography parse_homography(std::istream& in, const std::string& origin = "<stream>");

struct HarrisParams {
  double sigma_d = 1.0;     // derivative (pre-smoothing) scale
  double sigma_i = 2.0;     // integration scale; regions get radius 3·sigma_i
  double k = 0.04;
  double threshold = 0.01;  // fraction of the strongest cornerness response
  int max_regions = 1000;
};

/// Harris cornerness R = det(M) - k·trace(M)², 3x3 non-maximum suppression,
/// responses above threshold·max(R) (and > 0), strongest first.
std::vector<AffineRegion> harris_detect(const GrayImage& image, const HarrisParams& params = {});

/// Cornerness map used by harris_detect.
GrayImage harris_response(const GrayImage& image, const HarrisParams& params = {});

struct PatchParams {
  int patch_size = 41;
  double magnification = 3.0;  // measurement region = magnification × ellipse
  bool assign_orientation = false;
};

/// Samples the ellipse neighbourhood into a square patch. Patch offset p
/// from the centre pixel maps to image point
///   (x, y) + (2·magnification / patch_size) · E^(-1/2) · R(φ) · p
/// with E = [[a, b], [b, c]], so the magnified ellipse fills the patch and
/// patch +x points along φ. φ is the dominant gradient orientation when
/// `assign_orientation`, else the region's stored orientation (or 0).
GrayImage normalize_patch(const GrayImage& image, const AffineRegion& region,
                          const PatchParams& params = {});

/// Peak of a 36-bin Gaussian-weighted gradient-orientation histogram over
/// the unrotated normalized patch, refined by a parabola through the peak.
double dominant_orientation(const GrayImage& image, const AffineRegion& region,
                            const PatchParams& params = {});

}  // namespace rsddog
