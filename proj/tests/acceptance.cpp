// Acceptance checks: one PASS/FAIL line per criterion, nonzero exit if any fails.
// `acceptance --freeze` recomputes the criterion 9 reference with direct convolution.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "rsddog/descriptor.hpp"
#include "rsddog/dirsignal.hpp"
#include "rsddog/eval.hpp"
#include "rsddog/geometry.hpp"
#include "rsddog/pipeline.hpp"
#include "rsddog/regions.hpp"
#include "support.hpp"

using namespace rsddog;
using rsddog::testing::blob_texture;

namespace {

// Tolerances and frozen values.
constexpr double kNullTolerance = 1e-6;
constexpr double kNullSeconds = 10.0;
constexpr double kAxisTolerance = 10.0;
constexpr double kCrestFraction = 0.9;
constexpr double kOracleFraction = 0.02;
constexpr double kRelightTolerance = 1e-5;
constexpr double kSelfMatchSeconds = 60.0;
constexpr double kWarpFloor = 0.3;
constexpr double kWarpSlack = 0.05;
// Best recall at 1-precision <= 0.5 on the 30 degree warp fixture with the
// direct-convolution pipeline (acceptance --freeze).
constexpr double kWarpFrozen = 0.79;

const double kLambda2 = 2.0 * std::numbers::sqrt2;

struct Outcome {
  bool pass;
  std::string detail;
};

int circular_extrema(const std::vector<double>& v, int sign) {
  const int n = int(v.size());
  int count = 0;
  for (int i = 0; i < n; ++i) {
    const double p = v[std::size_t((i + n - 1) % n)], c = v[std::size_t(i)], q = v[std::size_t((i + 1) % n)];
    if (sign > 0 && c > p && c > q && c > 0.0) ++count;
    if (sign < 0 && c < p && c < q && c < 0.0) ++count;
  }
  return count;
}

double axial_error(double a, double b) {
  const double d = std::fmod(std::abs(a - b), 180.0);
  return std::min(d, 180.0 - d);
}

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Outcome null_response() {
  const auto t0 = std::chrono::steady_clock::now();
  const GrayImage img(128, 128, 128.0);
  const auto d = dhsf_stack(img, 6.0, 2.0, kLambda2, 10.0);
  double worst = 0.0;
  for (const auto& s : d.slices) {
    for (double v : s.samples()) worst = std::max(worst, std::abs(v));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return {worst < kNullTolerance && secs < kNullSeconds && d.slices.size() == 36,
          fmt("max|D| = %.3g over 36 slices, %.2f s", worst, secs)};
}

Outcome signal_semantics() {
  const auto valley = synth_image(SynthKind::Valley, 0.0, 200.0, 2.0, 64);
  const auto ridge = synth_image(SynthKind::Ridge, 0.0, 200.0, 2.0, 64);
  const auto junction = synth_image(SynthKind::Junction, 90.0, 200.0, 2.0, 64);
  const int v = circular_extrema(pixel_signal(dhsf_stack(valley, 6.0, 2.0, kLambda2, 10.0), 32, 32).values, -1);
  const int r = circular_extrema(pixel_signal(dhsf_stack(ridge, 6.0, 2.0, kLambda2, 10.0), 32, 32).values, +1);
  const int j = circular_extrema(pixel_signal(dhsf_stack(junction, 6.0, 2.0, kLambda2, 10.0), 32, 32).values, +1);
  return {v >= 2 && r >= 2 && j >= 3,
          fmt("valley negative minima %g, ridge positive maxima %g, junction positive maxima %g", v, r, j)};
}

Outcome perpendicularity() {
  std::string detail;
  bool pass = true;
  for (double phi : {0.0, 30.0, 45.0, 60.0, 90.0, 135.0}) {
    const auto img = synth_image(SynthKind::Ridge, phi, 200.0, 2.0, 96);
    const auto f = orientation_field(dhsf_stack(img, 6.0, 2.0, kLambda2, 10.0));
    const Frame frame(phi);
    int crest = 0, good = 0;
    for (int y = 24; y < 72; ++y) {
      for (int x = 24; x < 72; ++x) {
        if (std::abs(frame.across(x - 48, y - 48)) > 0.5) continue;
        ++crest;
        const auto i = f.index(x, y);
        if (f.valid[i] && axial_error(f.eta1[i], phi + 90.0) <= kAxisTolerance) ++good;
      }
    }
    const double frac = crest ? double(good) / crest : 0.0;
    pass = pass && crest > 0 && frac >= kCrestFraction;
    detail += fmt("%g:%.0f%% ", phi, 100.0 * frac);
  }
  return {pass, "crest pixels within 10 deg: " + detail};
}

Outcome oracle_equivalence() {
  double worst = 0.0;
  for (double phi : {0.0, 30.0, 45.0, 60.0}) {
    const auto img = synth_image(SynthKind::Ridge, phi, 200.0, 2.0, 64);
    const auto rot = smooth_stack(img, 6.0, 2.0, 10.0, SmoothMethod::RotateImage);
    const auto dir = smooth_stack(img, 6.0, 2.0, 10.0, SmoothMethod::DirectConvolution);
    for (int theta : {0, 40, 90, 130}) {
      const auto& a = rot.slices[std::size_t(theta / 10)];
      const auto& b = dir.slices[std::size_t(theta / 10)];
      double err = 0.0;
      for (int y = 16; y < 48; ++y) {
        for (int x = 16; x < 48; ++x) err = std::max(err, std::abs(a.at(x, y) - b.at(x, y)));
      }
      worst = std::max(worst, err / 200.0);
    }
  }
  return {worst <= kOracleFraction,
          fmt("worst |rotate - direct| = %.3f%% of the 200-level range (ridges 0/30/45/60)", 100.0 * worst)};
}

Outcome illumination() {
  std::mt19937 rng(2024);
  double worst = 0.0;
  int degenerate = 0;
  for (int i = 0; i < 20; ++i) {
    const auto patch = blob_texture(41, 41, 30, rng());
    const auto base = describe_patch(patch);
    degenerate += std::all_of(base.values.begin(), base.values.end(), [](double v) { return v == 0.0; });
    for (auto [a, b] : {std::pair{0.5, -20.0}, std::pair{2.0, 30.0}}) {
      GrayImage relit = patch;
      for (double& v : relit.samples()) v = a * v + b;
      const auto d = describe_patch(relit);
      for (std::size_t k = 0; k < d.values.size(); ++k) worst = std::max(worst, std::abs(d.values[k] - base.values[k]));
    }
  }
  return {worst < kRelightTolerance && degenerate == 0,
          fmt("max |describe(aI+b) - describe(I)| = %.3g over 20 patches x 2 relights", worst)};
}

Outcome dimensions() {
  const auto patch = blob_texture(41, 41, 30, 77);
  DescriptorParams three;
  three.scales = Scales::Three;
  const auto n2 = describe_patch(patch).values.size();
  const auto n3 = describe_patch(patch, three).values.size();
  const auto layout = block_layout(41, 4);
  bool blocks_ok = layout.size() == 16;
  const int expect[4] = {10, 10, 10, 11};
  for (int by = 0; by < 4 && blocks_ok; ++by) {
    for (int bx = 0; bx < 4; ++bx) {
      const auto& b = layout[std::size_t(by * 4 + bx)];
      blocks_ok = blocks_ok && b.width == expect[bx] && b.height == expect[by];
    }
  }
  return {n2 == 256 && n3 == 512 && blocks_ok,
          fmt("lengths %g / %g, 41x41 blocks [10,10,10,11]^2 ", double(n2), double(n3)) +
              (blocks_ok ? "ok" : "WRONG")};
}

Outcome evaluation_math() {
  CorrespondenceSet c;
  for (int i = 0; i < 10; ++i) c.pairs.emplace_back(i, i);
  std::vector<MatchPair> m;
  for (int i = 0; i < 4; ++i) m.push_back({i, i, 0.0, false});
  for (int i = 0; i < 6; ++i) m.push_back({i, 9 - i, 0.0, false});
  const auto s = score(m, c);
  const bool eq = s.recall == 0.4 && s.one_minus_precision == 0.6;

  std::mt19937 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  bool exact = true;
  for (int trial = 0; trial < 10; ++trial) {
    DescriptorList a(20, std::vector<double>(32)), b(20, std::vector<double>(32));
    for (auto* list : {&a, &b}) {
      for (auto& d : *list) {
        for (double& v : d) v = u(rng);
      }
    }
    CorrespondenceSet gt;
    for (int i = 0; i < 20; ++i) {
      if (u(rng) < 0.6) gt.pairs.emplace_back(i, (i * 3 + trial) % 20);
    }
    std::sort(gt.pairs.begin(), gt.pairs.end());
    const auto t = default_thresholds(a, b);
    const auto cv = curve(a, b, gt, t);
    for (std::size_t k = 0; k < t.size(); ++k) {
      long good = 0, bad = 0;
      for (int i = 0; i < 20; ++i) {
        for (int j = 0; j < 20; ++j) {
          double sum = 0.0;
          for (int d = 0; d < 32; ++d) {
            const double diff = a[std::size_t(i)][std::size_t(d)] - b[std::size_t(j)][std::size_t(d)];
            sum += diff * diff;
          }
          if (std::sqrt(sum) < t[k]) {
            (std::find(gt.pairs.begin(), gt.pairs.end(), std::pair{i, j}) != gt.pairs.end() ? good : bad)++;
          }
        }
      }
      const double recall = gt.pairs.empty() ? 0.0 : double(good) / double(gt.pairs.size());
      const double omp = good + bad ? double(bad) / double(good + bad) : 0.0;
      const auto& smp = cv.samples[k];
      exact = exact && smp.correct == good && smp.false_matches == bad && smp.recall == recall &&
              smp.one_minus_precision == omp;
    }
  }
  return {eq && exact, fmt("score (%.6g, %.6g); curve vs brute force over 10x64 thresholds: ", s.recall,
                           s.one_minus_precision) +
                           (exact ? "identical" : "MISMATCH")};
}

Outcome self_match() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto img = blob_texture(512, 512, 2600, 8, 128.0, 1.5, 5.0);
  HarrisParams hp;
  hp.max_regions = 500;
  const auto regions = harris_detect(img, hp);
  PatchParams pp;
  pp.assign_orientation = true;
  const auto desc = extract_descriptors(img, regions, DescriptorParams{}, pp, 0);
  const auto gt = ground_truth(regions, regions, Homography::identity(), GtCriterion::Center, 2.5);

  // Schedule: 16 geometric steps up to half the closest distinct-region distance.
  double closest = 1e300;
  for (std::size_t i = 0; i < desc.size(); ++i) {
    for (std::size_t j = i + 1; j < desc.size(); ++j) closest = std::min(closest, euclidean_distance(desc[i], desc[j]));
  }
  const double top = 0.5 * closest;
  std::vector<double> t;
  for (int k = 0; k < 16; ++k) t.push_back(top * std::pow(1e-3, (15 - k) / 15.0));
  const auto cv = curve(desc, desc, gt, t);
  const auto& last = cv.samples.back();
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool pass = regions.size() == 500 && top > 0.0 && last.recall == 1.0 &&
                    last.one_minus_precision == 0.0 && secs < kSelfMatchSeconds;
  return {pass, fmt("%g regions, final threshold %.3g: recall %.3g", double(regions.size()), top, last.recall) +
                    fmt(", 1-precision %.3g, %.1f s", last.one_minus_precision, secs)};
}

double warp_recall(SmoothMethod method, std::string* detail) {
  const auto a = blob_texture(256, 256, 600, 30, 128.0, 1.5, 5.0);
  const auto b = rotate_image(a, 30.0);
  const auto h = Homography::rotation(30.0, 128.0, 128.0);
  HarrisParams hp;
  hp.max_regions = 300;
  // keep regions whose measurement disc lies inside the content shared by both images
  auto central = [](std::vector<AffineRegion> rs) {
    std::erase_if(rs, [](const AffineRegion& r) { return std::hypot(r.x - 128.0, r.y - 128.0) > 100.0; });
    return rs;
  };
  const auto ra = central(harris_detect(a, hp));
  const auto rb = central(harris_detect(b, hp));
  DescriptorParams dp;
  dp.method = method;
  PatchParams pp;
  pp.assign_orientation = true;
  const auto da = extract_descriptors(a, ra, dp, pp, 0);
  const auto db = extract_descriptors(b, rb, dp, pp, 0);
  const auto gt = ground_truth(ra, rb, h, GtCriterion::Center, 2.5);
  const auto cv = curve(da, db, gt, default_thresholds(da, db));
  double best = 0.0, at = 0.0, omp = 0.0;
  for (const auto& s : cv.samples) {
    if (s.correct + s.false_matches > 0 && s.one_minus_precision <= 0.5 && s.recall > best) {
      best = s.recall;
      at = s.threshold;
      omp = s.one_minus_precision;
    }
  }
  if (detail) {
    *detail = fmt("%g/%g regions, %g correspondences", double(ra.size()), double(rb.size()), double(gt.pairs.size())) +
              fmt(", best recall %.4f at threshold %.4g (1-precision %.3f)", best, at, omp);
  }
  return best;
}

Outcome synthetic_warp() {
  std::string detail;
  const double r = warp_recall(SmoothMethod::RotateImage, &detail);
  const bool pass = r >= kWarpFloor && r >= kWarpFrozen - kWarpSlack;
  return {pass, detail + fmt("; frozen direct-pipeline value %.4f", kWarpFrozen)};
}

Outcome determinism() {
  rsddog::testing::TempDir dir;
  const auto img = blob_texture(160, 160, 250, 5);
  save_pgm(img, dir.file("img.pgm"));
  HarrisParams hp;
  hp.max_regions = 80;
  RegionFile rf;
  rf.regions = harris_detect(img, hp);
  write_regions(dir.file("regions.txt"), rf);
  auto extract = [&](const char* jobs, const std::string& out) {
    const std::string image = dir.file("img.pgm"), regions = dir.file("regions.txt");
    const char* argv[] = {"rsddog", "extract", "--image", image.c_str(), "--regions", regions.c_str(),
                          "--output", out.c_str(), "--jobs", jobs};
    return run_cli(10, argv);
  };
  const int s1 = extract("1", dir.file("d1.txt"));
  const int s8 = extract("8", dir.file("d8.txt"));
  const auto t1 = rsddog::testing::read_text(dir.file("d1.txt"));
  const auto t8 = rsddog::testing::read_text(dir.file("d8.txt"));
  const bool same = s1 == 0 && s8 == 0 && !t1.empty() && t1 == t8;
  return {same, fmt("%g regions, %g bytes, files ", double(rf.regions.size()), double(t1.size())) +
                    (same ? "identical" : "DIFFER")};
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1 && std::strcmp(argv[1], "--freeze") == 0) {
    std::string detail;
    const double r = warp_recall(SmoothMethod::DirectConvolution, &detail);
    std::printf("direct pipeline: %s\nkWarpFrozen = %.4f\n", detail.c_str(), r);
    return 0;
  }

  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
      {"null response on a constant image", null_response},
      {"directional signal peaks on valley, ridge and junction", signal_semantics},
      {"eta1 perpendicular to ridges", perpendicularity},
      {"rotate-image vs direct-kernel oracle", oracle_equivalence},
      {"illumination invariance", illumination},
      {"descriptor dimensions and block layout", dimensions},
      {"score and curve arithmetic", evaluation_math},
      {"end-to-end self match", self_match},
      {"end-to-end synthetic 30 degree warp", synthetic_warp},
      {"extraction determinism across thread counts", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("[%s] %2zu %s: %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - std::size_t(failed), criteria.size());
  return failed == 0 ? 0 : 1;
}
