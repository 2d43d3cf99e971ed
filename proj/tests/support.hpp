#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <string>
#include <vector>

#include "rsddog/image.hpp"

namespace rsddog::testing {

/// Sum of random Gaussian blobs around `base`; smooth, non-degenerate texture.
inline GrayImage blob_texture(int width, int height, int blobs, unsigned seed,
                              double base = 128.0, double min_sigma = 1.5,
                              double max_sigma = 5.5) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  GrayImage img(width, height, base);
  for (int b = 0; b < blobs; ++b) {
    const double cx = u(rng) * width, cy = u(rng) * height;
    const double s = min_sigma + u(rng) * (max_sigma - min_sigma);
    const double a = (u(rng) - 0.5) * 200.0;
    const int r = int(std::ceil(4 * s));
    for (int y = std::max(0, int(cy) - r); y < std::min(height, int(cy) + r + 1); ++y) {
      for (int x = std::max(0, int(cx) - r); x < std::min(width, int(cx) + r + 1); ++x) {
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        img.at(x, y) += a * std::exp(-d2 / (2 * s * s));
      }
    }
  }
  return img;
}

inline GrayImage checkerboard(int size, int square, double dark = 0.0, double bright = 255.0) {
  GrayImage img(size, size);
  for (int y = 0; y < size; ++y) {
    for (int x = 0; x < size; ++x) {
      img.at(x, y) = ((x / square + y / square) % 2) ? bright : dark;
    }
  }
  return img;
}

/// Scratch directory removed on destruction.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("rsddog-test-" + std::to_string(rd()) + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace rsddog::testing
