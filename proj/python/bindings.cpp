#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cmath>
#include <numbers>

#include "rsddog/descriptor.hpp"
#include "rsddog/dirsignal.hpp"
#include "rsddog/eval.hpp"
#include "rsddog/pipeline.hpp"
#include "rsddog/regions.hpp"

namespace py = pybind11;
using namespace rsddog;

namespace {

using Array = py::array_t<double, py::array::c_style | py::array::forcecast>;

GrayImage to_image(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("expected a 2-D array");
  const auto h = int(a.shape(0)), w = int(a.shape(1));
  return GrayImage(w, h, std::vector<double>(a.data(), a.data() + a.size()));
}

Array to_array(const GrayImage& img) {
  Array out({img.height(), img.width()});
  std::copy(img.samples().begin(), img.samples().end(), out.mutable_data());
  return out;
}

Array to_array(const std::vector<double>& v) {
  Array out(py::ssize_t(v.size()));
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

Array stack_array(const std::vector<GrayImage>& slices) {
  if (slices.empty()) return Array(std::vector<py::ssize_t>{0, 0, 0});
  const auto w = slices[0].width(), h = slices[0].height();
  Array out({py::ssize_t(slices.size()), py::ssize_t(h), py::ssize_t(w)});
  double* dst = out.mutable_data();
  for (const auto& s : slices) dst = std::copy(s.samples().begin(), s.samples().end(), dst);
  return out;
}

DescriptorParams make_params(int scales, double delta_theta, double mu, double lambda1, double lambda2,
                             double lambda3, const std::string& method) {
  DescriptorParams p;
  p.delta_theta = delta_theta;
  p.mu = mu;
  p.lambda1 = lambda1;
  p.lambda2 = lambda2;
  p.lambda3 = lambda3;
  if (scales != 2 && scales != 3) throw py::value_error("scales must be 2 or 3");
  p.scales = scales == 3 ? Scales::Three : Scales::Two;
  p.method = parse_smooth_method(method);
  validate(p);
  return p;
}

AffineRegion to_region(const py::sequence& s) {
  if (s.size() != 5 && s.size() != 6) throw py::value_error("region must be (x, y, a, b, c[, orientation])");
  AffineRegion r{s[0].cast<double>(), s[1].cast<double>(), s[2].cast<double>(), s[3].cast<double>(),
                 s[4].cast<double>(), std::nullopt};
  if (s.size() == 6 && !s[5].is_none()) r.orientation = s[5].cast<double>();
  return r;
}

std::vector<AffineRegion> to_regions(const py::iterable& items) {
  std::vector<AffineRegion> out;
  for (auto item : items) out.push_back(to_region(item.cast<py::sequence>()));
  return out;
}

py::tuple from_region(const AffineRegion& r) { return py::make_tuple(r.x, r.y, r.a, r.b, r.c); }

Homography to_homography(const Array& h) {
  if (h.size() != 9) throw py::value_error("homography must have 9 entries");
  std::array<double, 9> m{};
  std::copy(h.data(), h.data() + 9, m.begin());
  return Homography(m);
}

DescriptorList to_descriptors(const Array& a) {
  if (a.ndim() != 2) throw py::value_error("descriptors must be a 2-D array");
  DescriptorList out(std::size_t(a.shape(0)));
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].assign(a.data() + i * a.shape(1), a.data() + (i + 1) * a.shape(1));
  }
  return out;
}

const double kLambda2 = 2.0 * std::numbers::sqrt2;

}  // namespace

PYBIND11_MODULE(_rsddog, m) {
  m.doc() = "RSD-DOG descriptor core";

  m.def("load_image", [](const std::string& path) { return to_array(load_image(path)); }, py::arg("path"));
  m.def("save_pgm", [](const Array& img, const std::string& path) { save_pgm(to_image(img), path); },
        py::arg("image"), py::arg("path"));
  m.def(
      "synth_image",
      [](const std::string& kind, double angle, double amplitude, double width, int size) {
        return to_array(synth_image(parse_synth_kind(kind), angle, amplitude, width, size));
      },
      py::arg("kind"), py::arg("angle") = 0.0, py::arg("amplitude") = 200.0, py::arg("width") = 2.0,
      py::arg("size") = 128);
  m.def(
      "rotate_image", [](const Array& img, double angle) { return to_array(rotate_image(to_image(img), angle)); },
      py::arg("image"), py::arg("angle"));

  m.def(
      "half_gaussian_kernel",
      [](double mu, double lambda, double theta, double truncation) {
        const auto k = build_kernel({mu, lambda, theta, truncation});
        Array taps({k.height, k.width});
        std::copy(k.taps.begin(), k.taps.end(), taps.mutable_data());
        return py::make_tuple(taps, k.anchor_x, k.anchor_y);
      },
      py::arg("mu") = 6.0, py::arg("lambda_") = 2.0, py::arg("theta") = 0.0, py::arg("truncation") = 3.0);
  m.def(
      "dhsf_stack",
      [](const Array& img, double mu, double lambda1, double lambda2, double delta_theta, const std::string& method) {
        return stack_array(dhsf_stack(to_image(img), mu, lambda1, lambda2, delta_theta, parse_smooth_method(method)).slices);
      },
      py::arg("image"), py::arg("mu") = 6.0, py::arg("lambda1") = 2.0, py::arg("lambda2") = kLambda2,
      py::arg("delta_theta") = 10.0, py::arg("method") = "rotate");

  m.def(
      "extract_peaks",
      [](const std::vector<double>& values, double delta_theta) {
        PixelSignal s;
        s.values = values;
        s.delta_theta = delta_theta;
        const auto p = extract_peaks(s);
        py::dict d;
        d["theta_max"] = py::make_tuple(p.theta_max1, p.theta_max2);
        d["theta_min"] = py::make_tuple(p.theta_min1, p.theta_min2);
        d["mag_max"] = py::make_tuple(p.mag_max1, p.mag_max2);
        d["mag_min"] = py::make_tuple(p.mag_min1, p.mag_min2);
        d["max_count"] = p.max_count;
        d["min_count"] = p.min_count;
        return d;
      },
      py::arg("values"), py::arg("delta_theta") = 10.0);
  m.def("circular_midpoint", &circular_midpoint, py::arg("a"), py::arg("b"));
  m.def(
      "orientation_field",
      [](const Array& img, double mu, double lambda1, double lambda2, double delta_theta, const std::string& method) {
        const auto f = orientation_field(
            dhsf_stack(to_image(img), mu, lambda1, lambda2, delta_theta, parse_smooth_method(method)));
        auto grid = [&](const std::vector<double>& v) {
          Array a({f.height, f.width});
          std::copy(v.begin(), v.end(), a.mutable_data());
          return a;
        };
        py::array_t<bool> valid({f.height, f.width});
        std::copy(f.valid.begin(), f.valid.end(), valid.mutable_data());
        py::dict d;
        d["eta1"] = grid(f.eta1);
        d["delta1"] = grid(f.delta1);
        d["eta2"] = grid(f.eta2);
        d["delta2"] = grid(f.delta2);
        d["valid"] = valid;
        return d;
      },
      py::arg("image"), py::arg("mu") = 6.0, py::arg("lambda1") = 2.0, py::arg("lambda2") = kLambda2,
      py::arg("delta_theta") = 10.0, py::arg("method") = "rotate");

  m.def(
      "describe_patch",
      [](const Array& patch, int scales, double delta_theta, double mu, double lambda1, double lambda2,
         double lambda3, const std::string& method) {
        return to_array(
            describe_patch(to_image(patch), make_params(scales, delta_theta, mu, lambda1, lambda2, lambda3, method))
                .values);
      },
      py::arg("patch"), py::arg("scales") = 2, py::arg("delta_theta") = 10.0, py::arg("mu") = 6.0,
      py::arg("lambda1") = 2.0, py::arg("lambda2") = kLambda2, py::arg("lambda3") = 4.0,
      py::arg("method") = "rotate");

  m.def(
      "harris_detect",
      [](const Array& img, double sigma_d, double sigma_i, double k, double threshold, int max_regions) {
        py::list out;
        for (const auto& r : harris_detect(to_image(img), {sigma_d, sigma_i, k, threshold, max_regions})) {
          out.append(from_region(r));
        }
        return out;
      },
      py::arg("image"), py::arg("sigma_d") = 1.0, py::arg("sigma_i") = 2.0, py::arg("k") = 0.04,
      py::arg("threshold") = 0.01, py::arg("max_regions") = 1000);
  m.def(
      "normalize_patch",
      [](const Array& img, const py::sequence& region, int patch_size, double magnification, bool assign_orientation) {
        return to_array(normalize_patch(to_image(img), to_region(region),
                                        {patch_size, magnification, assign_orientation}));
      },
      py::arg("image"), py::arg("region"), py::arg("patch_size") = 41, py::arg("magnification") = 3.0,
      py::arg("assign_orientation") = false);
  m.def(
      "extract_descriptors",
      [](const Array& img, const py::iterable& regions, int scales, bool assign_orientation, const std::string& method,
         int jobs) {
        const auto params = make_params(scales, 10.0, 6.0, 2.0, kLambda2, 4.0, method);
        const auto rs = to_regions(regions);
        const GrayImage image = to_image(img);
        PatchParams patch;
        patch.assign_orientation = assign_orientation;
        DescriptorList d;
        {
          py::gil_scoped_release release;
          d = extract_descriptors(image, rs, params, patch, jobs);
        }
        Array out({py::ssize_t(d.size()), py::ssize_t(params.length())});
        double* dst = out.mutable_data();
        for (const auto& v : d) dst = std::copy(v.begin(), v.end(), dst);
        return out;
      },
      py::arg("image"), py::arg("regions"), py::arg("scales") = 2, py::arg("assign_orientation") = true,
      py::arg("method") = "rotate", py::arg("jobs") = 0);

  m.def(
      "ground_truth",
      [](const py::iterable& a, const py::iterable& b, const Array& h, const std::string& criterion, double parameter) {
        const auto c = parse_gt_criterion(criterion);
        return ground_truth(to_regions(a), to_regions(b), to_homography(h), c,
                            parameter > 0.0 ? parameter : default_gt_parameter(c))
            .pairs;
      },
      py::arg("regions_a"), py::arg("regions_b"), py::arg("homography"), py::arg("criterion") = "center",
      py::arg("parameter") = 0.0);
  m.def(
      "curve",
      [](const Array& a, const Array& b, const std::vector<std::pair<int, int>>& pairs,
         std::optional<std::vector<double>> thresholds, int count) {
        const auto da = to_descriptors(a), db = to_descriptors(b);
        CorrespondenceSet c;
        c.pairs = pairs;
        std::sort(c.pairs.begin(), c.pairs.end());
        const auto t = thresholds ? *thresholds : default_thresholds(da, db, count);
        const auto cv = curve(da, db, c, t);
        Array out({py::ssize_t(cv.samples.size()), py::ssize_t(5)});
        double* dst = out.mutable_data();
        for (const auto& s : cv.samples) {
          *dst++ = s.threshold;
          *dst++ = s.recall;
          *dst++ = s.one_minus_precision;
          *dst++ = double(s.correct);
          *dst++ = double(s.false_matches);
        }
        return out;
      },
      py::arg("desc_a"), py::arg("desc_b"), py::arg("correspondences"), py::arg("thresholds") = py::none(),
      py::arg("count") = 64);
}
