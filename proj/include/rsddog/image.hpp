#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace rsddog {

/// Grayscale image with real-valued samples stored row-major.
///
/// Samples nominally live in [0, 255] but are never clamped, since filtered
/// images carry signed and fractional values.
class GrayImage {
 public:
  GrayImage(int width, int height, double fill = 0.0);
  GrayImage(int width, int height, std::vector<double> samples);

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return samples_.size(); }

  double at(int x, int y) const { return samples_[index(x, y)]; }
  double& at(int x, int y) { return samples_[index(x, y)]; }

  /// Sample with coordinates clamped to the grid (replicated border).
  double clamped(int x, int y) const;

  /// Bilinear interpolation at a real position, replicated border.
  double bilinear(double x, double y) const;

  /// Keys cubic convolution (a = -1/2) at a real position, replicated border.
  double bicubic(double x, double y) const;

  bool contains(int x, int y) const {
    return x >= 0 && y >= 0 && x < width_ && y < height_;
  }

  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }
  const double* row(int y) const { return samples_.data() + std::size_t(y) * width_; }
  double* row(int y) { return samples_.data() + std::size_t(y) * width_; }

  bool operator==(const GrayImage&) const = default;

 private:
  std::size_t index(int x, int y) const { return std::size_t(y) * width_ + x; }

  int width_;
  int height_;
  std::vector<double> samples_;
};

/// Reads binary or ASCII PGM (P2/P5) and PPM (P3/P6). Color is converted to
/// luminance with BT.601 weights; maxval other than 255 is rescaled to 0..255.
GrayImage load_image(const std::string& path);

/// Decodes an in-memory Netpbm buffer. `origin` names the source in errors.
GrayImage decode_netpbm(std::span<const unsigned char> bytes,
                        const std::string& origin = "<memory>");

/// Writes binary P5 with maxval 255; samples clamped and rounded half-up.
void save_pgm(const GrayImage& image, const std::string& path);
std::vector<unsigned char> encode_pgm(const GrayImage& image);

/// Writes `image` affinely mapped onto [0,255] as PGM, plus a sidecar
/// `<path>.txt` holding "offset=<o> scale=<s>" where pgm = (v + o) * s.
void save_pgm_scaled(const GrayImage& image, const std::string& path);

enum class SynthKind { Ridge, Valley, Junction, Constant };

SynthKind parse_synth_kind(const std::string& name);
std::string to_string(SynthKind kind);

/// Synthetic crest-line fixtures centered on pixel (size/2, size/2).
///
/// Angles follow the library convention: direction θ is the image vector
/// (cos θ, -sin θ) in (column, row) coordinates, i.e. counter-clockwise as
/// displayed. Ridge: Gaussian line profile of std-dev `profile_width` and
/// peak `amplitude` on a zero background. Valley: `amplitude` minus the
/// ridge. Junction: ridge along 0° plus a ridge along `angle`, combined by
/// maximum. Constant: every sample equals `amplitude`.
GrayImage synth_image(SynthKind kind, double angle_deg, double amplitude,
                      double profile_width, int size);

/// Rotates about the pixel center (w/2, h/2) by `angle_deg` (counter-clockwise
/// as displayed) keeping the dimensions; bilinear, replicated border.
GrayImage rotate_image(const GrayImage& image, double angle_deg);

}  // namespace rsddog
