#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include "rsddog/dirsignal.hpp"
#include "rsddog/error.hpp"
#include "rsddog/eval.hpp"
#include "rsddog/pipeline.hpp"

namespace rsddog {

namespace {

// Writes to a sibling temporary file and renames it into place, so a failed
// command never leaves a partial output behind.
void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& fill) {
  if (path == "-") {
    fill(std::cout);
    std::cout.flush();
    return;
  }
  const std::string tmp = path + ".partial";
  try {
    {
      std::ofstream out(tmp, std::ios::binary);
      if (!out) throw IoError("cannot open '" + path + "' for writing");
      fill(out);
      out.flush();
      if (!out) throw IoError("error writing '" + path + "'");
    }
    std::filesystem::rename(tmp, path);
  } catch (...) {
    std::error_code ec;
    std::filesystem::remove(tmp, ec);
    throw;
  }
}

struct FilterFlags {
  double delta_theta = 10.0;
  double mu = 6.0;
  double lambda1 = 2.0;
  double lambda2 = 2.8284271;
  double lambda3 = 4.0;
  int scales = 2;
  std::string method = "rotate";

  void add_to(CLI::App& app, bool with_scales) {
    app.add_option("--delta-theta", delta_theta,
                   "Rotation step in degrees; must divide 360 (default 10)")
        ->capture_default_str();
    app.add_option("--mu", mu, "Filter height: std-dev along the filter (default 6)")
        ->capture_default_str();
    app.add_option("--lambda1", lambda1, "Narrow filter width (default 2)")->capture_default_str();
    app.add_option("--lambda2", lambda2, "Wide filter width (default 2*sqrt(2) = 2.8284271...)")
        ->capture_default_str();
    app.add_option("--method", method, "Smoothing pipeline: rotate (rotate the image) or direct "
                                       "(rotated kernels, slower)")
        ->check(CLI::IsMember({"rotate", "direct"}))
        ->capture_default_str();
    if (with_scales) {
      app.add_option("--lambda3", lambda3, "Third filter width, three-scale mode (default 4)")
          ->capture_default_str();
      app.add_option("--scales", scales, "2 -> 256-d descriptor, 3 -> 512-d descriptor")
          ->check(CLI::IsMember({2, 3}))
          ->capture_default_str();
    }
  }

  DescriptorParams descriptor() const {
    DescriptorParams p;
    p.delta_theta = delta_theta;
    p.mu = mu;
    p.lambda1 = lambda1;
    p.lambda2 = lambda2;
    p.lambda3 = lambda3;
    p.scales = scales == 3 ? Scales::Three : Scales::Two;
    p.method = parse_smooth_method(method);
    validate(p);
    return p;
  }
};

}  // namespace

int run_cli(int argc, const char* const* argv) {
  CLI::App app{"RSD-DOG local descriptor: detection, extraction and matching evaluation"};
  app.require_subcommand(1);

  // detect
  auto* detect = app.add_subcommand("detect", "Harris corners written as an Oxford region file");
  std::string detect_in, detect_out;
  HarrisParams harris;
  detect->add_option("--input", detect_in, "Input PGM/PPM image")->required();
  detect->add_option("--output", detect_out, "Output region file")->required();
  detect->add_option("--sigma-d", harris.sigma_d, "Derivative scale (default 1.0)")
      ->capture_default_str();
  detect->add_option("--sigma-i", harris.sigma_i,
                     "Integration scale; region radius is 3*sigma-i (default 2.0)")
      ->capture_default_str();
  detect->add_option("--k", harris.k, "Harris sensitivity (default 0.04)")->capture_default_str();
  detect->add_option("--threshold", harris.threshold,
                     "Minimum response as a fraction of the strongest (default 0.01)")
      ->capture_default_str();
  detect->add_option("--max", harris.max_regions, "Keep at most this many regions (default 1000)")
      ->capture_default_str();

  // extract
  auto* extract = app.add_subcommand("extract", "Describe regions with RSD-DOG");
  std::string ex_image, ex_regions, ex_out, ex_orientation = "on";
  int ex_jobs = 0;
  FilterFlags ex_filter;
  extract->add_option("--image", ex_image, "Input PGM/PPM image")->required();
  extract->add_option("--regions", ex_regions, "Oxford region file")->required();
  extract->add_option("--output", ex_out, "Output descriptor file")->required();
  ex_filter.add_to(*extract, true);
  extract->add_option("--orientation", ex_orientation,
                      "Rotate patches to the dominant gradient orientation")
      ->check(CLI::IsMember({"on", "off"}))
      ->capture_default_str();
  extract->add_option("--jobs", ex_jobs, "Worker threads; 0 uses every core (default 0)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();

  // curve
  auto* curve_cmd = app.add_subcommand("curve", "Recall vs 1-precision curve as CSV");
  std::string cv_da, cv_db, cv_ra, cv_rb, cv_h, cv_out, cv_gt = "center";
  double cv_param = 0.0;
  int cv_count = 64;
  curve_cmd->add_option("--desc-a", cv_da, "Descriptor file of image A")->required();
  curve_cmd->add_option("--desc-b", cv_db, "Descriptor file of image B")->required();
  curve_cmd->add_option("--regions-a", cv_ra, "Region file of image A")->required();
  curve_cmd->add_option("--regions-b", cv_rb, "Region file of image B")->required();
  curve_cmd->add_option("--homography", cv_h, "3x3 homography mapping A to B")->required();
  curve_cmd->add_option("--output", cv_out, "Output CSV")->required();
  curve_cmd->add_option("--gt", cv_gt, "Ground-truth criterion")
      ->check(CLI::IsMember({"center", "overlap"}))
      ->capture_default_str();
  curve_cmd->add_option("--gt-param", cv_param,
                        "Center distance in pixels (default 2.5) or overlap error (default 0.5)");
  curve_cmd->add_option("--thresholds", cv_count, "Number of distance thresholds (default 64)")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  // signal
  auto* signal = app.add_subcommand("signal", "Dump the directional signal D(theta) of a pixel");
  std::string sg_image, sg_out = "-";
  int sg_x = 0, sg_y = 0;
  FilterFlags sg_filter;
  signal->add_option("--image", sg_image, "Input PGM/PPM image")->required();
  signal->add_option("--x", sg_x, "Pixel column")->required();
  signal->add_option("--y", sg_y, "Pixel row")->required();
  signal->add_option("--output", sg_out, "Output CSV, '-' for stdout")->capture_default_str();
  sg_filter.add_to(*signal, false);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate a synthetic crest-line image");
  std::string sy_kind, sy_out;
  double sy_angle = 0.0, sy_amp = 200.0, sy_width = 2.0;
  int sy_size = 128;
  synth->add_option("--kind", sy_kind, "ridge, valley, junction or constant")->required();
  synth->add_option("--angle", sy_angle, "Line angle in degrees, counter-clockwise")
      ->capture_default_str();
  synth->add_option("--output", sy_out, "Output PGM")->required();
  synth->add_option("--size", sy_size, "Image side in pixels, >= 32")->capture_default_str();
  synth->add_option("--amplitude", sy_amp, "Crest amplitude")->capture_default_str();
  synth->add_option("--width", sy_width, "Gaussian profile std-dev in pixels")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*detect) {
      const GrayImage image = load_image(detect_in);
      RegionFile file;
      file.dimension = 1;
      file.regions = harris_detect(image, harris);
      write_atomically(detect_out, [&](std::ostream& out) { write_regions(out, file); });
    } else if (*extract) {
      const DescriptorParams params = ex_filter.descriptor();
      const GrayImage image = load_image(ex_image);
      RegionFile regions = read_regions(ex_regions);
      if (regions.dimension > 1) {
        std::clog << "warning: " << ex_regions << " carries " << regions.dimension
                  << "-d descriptors; they are replaced\n";
      }
      PatchParams patch;
      patch.assign_orientation = ex_orientation == "on";
      RegionFile out;
      out.dimension = params.length();
      out.regions = regions.regions;
      out.descriptors = extract_descriptors(image, out.regions, params, patch, ex_jobs);
      write_atomically(ex_out, [&](std::ostream& os) { write_regions(os, out); });
    } else if (*curve_cmd) {
      const RegionFile da = read_regions(cv_da);
      const RegionFile db = read_regions(cv_db);
      const auto ra = read_regions(cv_ra).regions;
      const auto rb = read_regions(cv_rb).regions;
      if (da.regions.size() != ra.size() || db.regions.size() != rb.size()) {
        std::clog << "warning: descriptor and region files list different region counts\n";
      }
      const Homography h = read_homography(cv_h);
      const GtCriterion criterion = parse_gt_criterion(cv_gt);
      const double param = cv_param > 0.0 ? cv_param : default_gt_parameter(criterion);
      const auto gt = ground_truth(ra, rb, h, criterion, param);
      const auto thresholds = default_thresholds(da.descriptors, db.descriptors, cv_count);
      const MatchCurve c = curve(da.descriptors, db.descriptors, gt, thresholds);
      write_atomically(cv_out, [&](std::ostream& out) { write_curve_csv(out, c); });
    } else if (*signal) {
      const DescriptorParams p = sg_filter.descriptor();
      const GrayImage image = load_image(sg_image);
      if (!image.contains(sg_x, sg_y)) {
        throw BoundsError("pixel (" + std::to_string(sg_x) + ", " + std::to_string(sg_y) +
                          ") outside the " + std::to_string(image.width()) + "x" +
                          std::to_string(image.height()) + " image");
      }
      const auto stack = dhsf_stack(image, p.mu, p.lambda1, p.lambda2, p.delta_theta, p.method);
      const PixelSignal s = pixel_signal(stack, sg_x, sg_y);
      write_atomically(sg_out, [&](std::ostream& out) {
        out << "theta_deg,D\n";
        char buf[64];
        for (std::size_t k = 0; k < s.values.size(); ++k) {
          std::snprintf(buf, sizeof buf, "%.6g,%.6g\n", double(k) * s.delta_theta, s.values[k]);
          out << buf;
        }
      });
    } else if (*synth) {
      const GrayImage image =
          synth_image(parse_synth_kind(sy_kind), sy_angle, sy_amp, sy_width, sy_size);
      const auto bytes = encode_pgm(image);
      write_atomically(sy_out, [&](std::ostream& out) {
        out.write(reinterpret_cast<const char*>(bytes.data()), std::streamsize(bytes.size()));
      });
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace rsddog
