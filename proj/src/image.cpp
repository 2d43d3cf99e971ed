#include "rsddog/image.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "rsddog/error.hpp"
#include "rsddog/geometry.hpp"

namespace rsddog {

void warn(const std::string& message) { std::clog << "warning: " << message << '\n'; }

GrayImage::GrayImage(int width, int height, double fill)
    : width_(width), height_(height) {
  if (width < 1 || height < 1) {
    throw ContractError("image dimensions must be positive");
  }
  samples_.assign(std::size_t(width) * height, fill);
}

GrayImage::GrayImage(int width, int height, std::vector<double> samples)
    : width_(width), height_(height), samples_(std::move(samples)) {
  if (width < 1 || height < 1) {
    throw ContractError("image dimensions must be positive");
  }
  if (samples_.size() != std::size_t(width) * height) {
    throw ContractError("sample count does not match width*height");
  }
  for (double v : samples_) {
    if (!std::isfinite(v)) throw ContractError("image samples must be finite");
  }
}

double GrayImage::clamped(int x, int y) const {
  x = std::clamp(x, 0, width_ - 1);
  y = std::clamp(y, 0, height_ - 1);
  return samples_[index(x, y)];
}

double GrayImage::bilinear(double x, double y) const {
  x = std::clamp(x, 0.0, double(width_ - 1));
  y = std::clamp(y, 0.0, double(height_ - 1));
  const int x0 = std::min(int(x), width_ - 1);
  const int y0 = std::min(int(y), height_ - 1);
  const int x1 = std::min(x0 + 1, width_ - 1);
  const int y1 = std::min(y0 + 1, height_ - 1);
  const double fx = x - x0;
  const double fy = y - y0;
  // lerp form keeps constant neighborhoods exact
  const double v00 = samples_[index(x0, y0)];
  const double v10 = samples_[index(x1, y0)];
  const double v01 = samples_[index(x0, y1)];
  const double v11 = samples_[index(x1, y1)];
  const double top = v00 + fx * (v10 - v00);
  const double bottom = v01 + fx * (v11 - v01);
  return top + fy * (bottom - top);
}

namespace {

// Keys cubic convolution weights for a fractional offset t in [0, 1).
void keys_weights(double t, double w[4]) {
  const double t2 = t * t, t3 = t2 * t;
  w[0] = -0.5 * t3 + t2 - 0.5 * t;
  w[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
  w[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
  w[3] = 0.5 * t3 - 0.5 * t2;
}

}  // namespace

double GrayImage::bicubic(double x, double y) const {
  x = std::clamp(x, 0.0, double(width_ - 1));
  y = std::clamp(y, 0.0, double(height_ - 1));
  const int x0 = std::min(int(x), width_ - 1);
  const int y0 = std::min(int(y), height_ - 1);
  double wx[4], wy[4];
  keys_weights(x - x0, wx);
  keys_weights(y - y0, wy);
  // Accumulated relative to the base sample so constant neighborhoods are exact.
  const double base = samples_[index(x0, y0)];
  double acc = 0.0;
  for (int j = 0; j < 4; ++j) {
    const int yy = std::clamp(y0 - 1 + j, 0, height_ - 1);
    double row = 0.0;
    for (int i = 0; i < 4; ++i) {
      const int xx = std::clamp(x0 - 1 + i, 0, width_ - 1);
      row += wx[i] * (samples_[index(xx, yy)] - base);
    }
    acc += wy[j] * row;
  }
  return base + acc;
}

namespace {

class NetpbmReader {
 public:
  NetpbmReader(std::span<const unsigned char> bytes, const std::string& origin)
      : bytes_(bytes), origin_(origin) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw FormatError(origin_ + ": " + what + " at byte offset " + std::to_string(pos_));
  }

  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      const unsigned char ch = bytes_[pos_];
      if (ch == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n' && bytes_[pos_] != '\r') ++pos_;
      } else if (std::isspace(ch)) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  unsigned long read_uint() {
    skip_space_and_comments();
    if (pos_ >= bytes_.size()) fail("unexpected end of data");
    if (!std::isdigit(bytes_[pos_])) fail("expected decimal integer");
    unsigned long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_] - '0');
      if (value > 0xFFFFFFFFul) fail("integer too large");
      ++pos_;
    }
    return value;
  }

  void expect_single_whitespace() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) {
      fail("expected whitespace after maxval");
    }
    ++pos_;
  }

  unsigned read_binary_sample(unsigned long maxval) {
    const std::size_t width = maxval > 255 ? 2 : 1;
    if (pos_ + width > bytes_.size()) fail("truncated payload");
    unsigned v = bytes_[pos_];
    if (width == 2) v = (v << 8) | bytes_[pos_ + 1];
    pos_ += width;
    return v;
  }

  std::size_t pos() const { return pos_; }
  void set_pos(std::size_t p) { pos_ = p; }
  std::size_t size() const { return bytes_.size(); }
  unsigned char byte(std::size_t i) const { return bytes_[i]; }

 private:
  std::span<const unsigned char> bytes_;
  std::string origin_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage decode_netpbm(std::span<const unsigned char> bytes, const std::string& origin) {
  NetpbmReader in(bytes, origin);
  if (bytes.size() < 2 || bytes[0] != 'P') in.fail("missing Netpbm magic");
  const char kind = char(bytes[1]);
  if (kind != '2' && kind != '3' && kind != '5' && kind != '6') {
    in.fail(std::string("unsupported Netpbm type P") + kind);
  }
  in.set_pos(2);
  const unsigned long width = in.read_uint();
  const unsigned long height = in.read_uint();
  const unsigned long maxval = in.read_uint();
  if (width == 0 || height == 0) in.fail("zero image dimension");
  if (width > 1u << 16 || height > 1u << 16) in.fail("image dimension too large");
  if (maxval == 0 || maxval > 65535) in.fail("maxval out of range");

  const bool color = kind == '3' || kind == '6';
  const bool binary = kind == '5' || kind == '6';
  if (binary) in.expect_single_whitespace();

  const double scale = 255.0 / double(maxval);
  std::vector<double> samples(width * height);
  auto next = [&]() -> double {
    unsigned long v;
    if (binary) {
      v = in.read_binary_sample(maxval);
    } else {
      v = in.read_uint();
    }
    if (v > maxval) in.fail("sample exceeds maxval");
    return double(v);
  };
  for (double& s : samples) {
    double value;
    if (color) {
      const double r = next();
      const double g = next();
      const double b = next();
      value = 0.299 * r + 0.587 * g + 0.114 * b;
    } else {
      value = next();
    }
    s = maxval == 255 ? value : value * scale;
  }
  return GrayImage(int(width), int(height), std::move(samples));
}

GrayImage load_image(const std::string& path) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open image '" + path + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(file)),
                                   std::istreambuf_iterator<char>());
  if (file.bad()) throw IoError("error reading image '" + path + "'");
  return decode_netpbm(bytes, path);
}

std::vector<unsigned char> encode_pgm(const GrayImage& image) {
  const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  std::vector<unsigned char> out(header.begin(), header.end());
  out.reserve(header.size() + image.size());
  for (double v : image.samples()) {
    const double c = std::clamp(v, 0.0, 255.0);
    out.push_back(static_cast<unsigned char>(std::floor(c + 0.5)));
  }
  return out;
}

void save_pgm(const GrayImage& image, const std::string& path) {
  const auto bytes = encode_pgm(image);
  std::ofstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  file.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
  if (!file) throw IoError("error writing '" + path + "'");
}

void save_pgm_scaled(const GrayImage& image, const std::string& path) {
  const auto [lo, hi] = std::minmax_element(image.samples().begin(), image.samples().end());
  const double offset = -*lo;
  const double scale = *hi > *lo ? 255.0 / (*hi - *lo) : 1.0;
  GrayImage mapped = image;
  for (double& v : mapped.samples()) v = (v + offset) * scale;
  save_pgm(mapped, path);

  std::ofstream side(path + ".txt");
  if (!side) throw IoError("cannot open '" + path + ".txt' for writing");
  char line[96];
  std::snprintf(line, sizeof line, "offset=%.9g scale=%.9g\n", offset, scale);
  side << line;
  if (!side) throw IoError("error writing '" + path + ".txt'");
}

SynthKind parse_synth_kind(const std::string& name) {
  if (name == "ridge") return SynthKind::Ridge;
  if (name == "valley") return SynthKind::Valley;
  if (name == "junction") return SynthKind::Junction;
  if (name == "constant") return SynthKind::Constant;
  throw UsageError("unknown synthetic image kind '" + name +
                   "' (expected ridge, valley, junction or constant)");
}

std::string to_string(SynthKind kind) {
  switch (kind) {
    case SynthKind::Ridge: return "ridge";
    case SynthKind::Valley: return "valley";
    case SynthKind::Junction: return "junction";
    case SynthKind::Constant: return "constant";
  }
  return "?";
}

GrayImage synth_image(SynthKind kind, double angle_deg, double amplitude,
                      double profile_width, int size) {
  if (size < 32) throw ParameterError("synthetic image size must be >= 32");
  if (!(profile_width >= 1.0) && kind != SynthKind::Constant) {
    throw ParameterError("profile width must be >= 1");
  }
  GrayImage out(size, size, kind == SynthKind::Constant ? amplitude : 0.0);
  if (kind == SynthKind::Constant) return out;

  const double center = size / 2;
  const double inv = 1.0 / (2.0 * profile_width * profile_width);
  auto ridge = [&](const Frame& f, double dx, double dy) {
    const double d = f.across(dx, dy);
    return amplitude * std::exp(-d * d * inv);
  };
  const Frame first(kind == SynthKind::Junction ? 0.0 : angle_deg);
  const Frame second(angle_deg);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      const double dx = x - center;
      const double dy = y - center;
      double v = ridge(first, dx, dy);
      if (kind == SynthKind::Junction) v = std::max(v, ridge(second, dx, dy));
      if (kind == SynthKind::Valley) v = amplitude - v;
      out.at(x, y) = v;
    }
  }
  return out;
}

GrayImage rotate_image(const GrayImage& image, double angle_deg) {
  const Frame f(angle_deg);
  const double cx = image.width() / 2;
  const double cy = image.height() / 2;
  GrayImage out(image.width(), image.height());
  for (int y = 0; y < image.height(); ++y) {
    for (int x = 0; x < image.width(); ++x) {
      const double dx = x - cx;
      const double dy = y - cy;
      out.at(x, y) = image.bilinear(cx + f.along(dx, dy), cy + f.across(dx, dy));
    }
  }
  return out;
}

}  // namespace rsddog
