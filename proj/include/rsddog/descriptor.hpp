#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "rsddog/dirsignal.hpp"
#include "rsddog/filterbank.hpp"
#include "rsddog/image.hpp"

namespace rsddog {

enum class Scales { Two = 2, Three = 3 };

struct DescriptorParams {
  double delta_theta = 10.0;
  double mu = 6.0;
  double lambda1 = 2.0;
  double lambda2 = 2.0 * std::numbers::sqrt2;
  double lambda3 = 4.0;  // three-scale mode only
  int bins_per_block = 8;
  int grid = 4;
  int patch_size = 41;
  Scales scales = Scales::Two;
  SmoothMethod method = SmoothMethod::RotateImage;
  double truncation = 3.0;

  /// grid² · bins_per_block per histogram, two histograms per scale pair.
  int length() const {
    const int per_pair = 2 * grid * grid * bins_per_block;
    return scales == Scales::Three ? 2 * per_pair : per_pair;
  }
};

/// Throws ParameterError for settings describe_patch would reject.
void validate(const DescriptorParams& params);

struct Descriptor {
  std::vector<double> values;  // unit L2 norm, or all zero for a flat patch
  DescriptorParams params;
};

struct Block {
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
};

/// Row-major grid² blocks. Every block but the last along each axis is
/// floor(patch/grid) wide; the last one takes the remainder.
std::vector<Block> block_layout(int patch_size, int grid);

enum class Eta { First, Second };

/// δ-weighted orientation histogram per block, [0, 360) split into
/// `bins_per_block` bins with linear circular interpolation between the two
/// nearest bin centres. Block order follows `layout`; bins by angle.
std::vector<double> bin_orientations(const OrientationField& field, Eta which,
                                     const std::vector<Block>& layout, int bins_per_block);

/// Concatenated H_η1 ‖ H_η2 (and the second scale pair in three-scale mode)
/// before normalization.
std::vector<double> raw_histograms(const GrayImage& patch, const DescriptorParams& params);

Descriptor describe_patch(const GrayImage& patch, const DescriptorParams& params = {});

}  // namespace rsddog
