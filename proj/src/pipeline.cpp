#include "rsddog/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

namespace rsddog {

std::vector<std::vector<double>> extract_descriptors(const GrayImage& image,
                                                     const std::vector<AffineRegion>& regions,
                                                     const DescriptorParams& descriptor,
                                                     const PatchParams& patch, int jobs) {
  std::vector<std::vector<double>> out(regions.size());
  if (regions.empty()) return out;
  if (jobs <= 0) jobs = int(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min<int>(jobs, int(regions.size()));

  PatchParams patch_params = patch;
  patch_params.patch_size = descriptor.patch_size;

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= regions.size()) return;
      try {
        const GrayImage p = normalize_patch(image, regions[i], patch_params);
        out[i] = describe_patch(p, descriptor).values;
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = regions.size();
        return;
      }
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(std::size_t(jobs));
    for (int t = 0; t < jobs; ++t) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace rsddog
