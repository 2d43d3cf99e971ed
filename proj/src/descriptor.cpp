#include "rsddog/descriptor.hpp"

#include <cmath>
#include <string>

#include "rsddog/error.hpp"

namespace rsddog {

void validate(const DescriptorParams& params) {
  orientation_count(params.delta_theta);
  std::vector<double> lambdas = {params.lambda1, params.lambda2};
  if (params.scales == Scales::Three) lambdas.push_back(params.lambda3);
  for (double lambda : lambdas) build_kernel({params.mu, lambda, 0.0, params.truncation});
  for (std::size_t i = 1; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > lambdas[i - 1])) throw ParameterError("filter widths must increase");
  }
  if (params.bins_per_block < 1) throw ParameterError("bins_per_block must be positive");
  block_layout(params.patch_size, params.grid);
}

std::vector<Block> block_layout(int patch_size, int grid) {
  if (grid < 1 || patch_size < grid) {
    throw ParameterError("block layout needs 1 <= grid <= patch_size");
  }
  const int step = patch_size / grid;
  std::vector<int> starts(grid), sizes(grid);
  for (int i = 0; i < grid; ++i) {
    starts[i] = i * step;
    sizes[i] = i + 1 < grid ? step : patch_size - step * (grid - 1);
  }
  std::vector<Block> blocks;
  blocks.reserve(std::size_t(grid) * grid);
  for (int by = 0; by < grid; ++by) {
    for (int bx = 0; bx < grid; ++bx) {
      blocks.push_back({starts[bx], starts[by], sizes[bx], sizes[by]});
    }
  }
  return blocks;
}

std::vector<double> bin_orientations(const OrientationField& field, Eta which,
                                     const std::vector<Block>& layout, int bins_per_block) {
  if (bins_per_block < 1) throw ParameterError("bins_per_block must be positive");
  for (const Block& b : layout) {
    if (b.x < 0 || b.y < 0 || b.x + b.width > field.width || b.y + b.height > field.height) {
      throw ContractError("block layout does not fit the orientation field (" +
                          std::to_string(field.width) + "x" + std::to_string(field.height) + ")");
    }
  }
  const auto& eta = which == Eta::First ? field.eta1 : field.eta2;
  const auto& delta = which == Eta::First ? field.delta1 : field.delta2;
  const double bin_width = 360.0 / bins_per_block;

  std::vector<double> hist(layout.size() * std::size_t(bins_per_block), 0.0);
  for (std::size_t bi = 0; bi < layout.size(); ++bi) {
    const Block& b = layout[bi];
    double* h = hist.data() + bi * bins_per_block;
    for (int y = b.y; y < b.y + b.height; ++y) {
      for (int x = b.x; x < b.x + b.width; ++x) {
        const std::size_t i = field.index(x, y);
        if (!field.valid[i] || delta[i] == 0.0) continue;
        // Bin k is centred at (k + 0.5)·bin_width.
        const double pos = eta[i] / bin_width - 0.5;
        const double lower = std::floor(pos);
        const double frac = pos - lower;
        const int k0 = ((int(lower) % bins_per_block) + bins_per_block) % bins_per_block;
        const int k1 = (k0 + 1) % bins_per_block;
        h[k0] += delta[i] * (1.0 - frac);
        h[k1] += delta[i] * frac;
      }
    }
  }
  return hist;
}

std::vector<double> raw_histograms(const GrayImage& patch, const DescriptorParams& params) {
  if (patch.width() != params.patch_size || patch.height() != params.patch_size) {
    throw ContractError("patch is " + std::to_string(patch.width()) + "x" +
                        std::to_string(patch.height()) + ", expected " +
                        std::to_string(params.patch_size) + " square");
  }
  std::vector<double> lambdas = {params.lambda1, params.lambda2};
  if (params.scales == Scales::Three) lambdas.push_back(params.lambda3);

  const auto stacks = dhsf_stacks(patch, params.mu, lambdas, params.delta_theta, params.method,
                                  params.truncation);
  const auto layout = block_layout(params.patch_size, params.grid);

  std::vector<double> out;
  out.reserve(std::size_t(params.length()));
  for (const auto& stack : stacks) {
    const auto field = orientation_field(stack);
    for (Eta which : {Eta::First, Eta::Second}) {
      const auto h = bin_orientations(field, which, layout, params.bins_per_block);
      out.insert(out.end(), h.begin(), h.end());
    }
  }
  return out;
}

Descriptor describe_patch(const GrayImage& patch, const DescriptorParams& params) {
  Descriptor d;
  d.params = params;
  d.values = raw_histograms(patch, params);
  double norm2 = 0.0;
  for (double v : d.values) norm2 += v * v;
  if (norm2 > 0.0) {
    const double inv = 1.0 / std::sqrt(norm2);
    for (double& v : d.values) v *= inv;
  }
  return d;
}

}  // namespace rsddog
