#pragma once

#include <string>
#include <vector>

#include "rsddog/descriptor.hpp"
#include "rsddog/regions.hpp"

namespace rsddog {

/// normalize_patch + describe_patch for every region. Work is spread over
/// `jobs` threads (0 = hardware concurrency); output order follows `regions`
/// and values do not depend on the thread count.
std::vector<std::vector<double>> extract_descriptors(const GrayImage& image,
                                                     const std::vector<AffineRegion>& regions,
                                                     const DescriptorParams& descriptor,
                                                     const PatchParams& patch, int jobs = 1);

/// Runs the command-line tool in-process; returns the exit status.
int run_cli(int argc, const char* const* argv);

}  // namespace rsddog
