#include "rsddog/regions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rsddog/error.hpp"
#include "rsddog/geometry.hpp"

namespace rsddog {

// ---------------------------------------------------------------------------
// Oxford region files

RegionFile parse_regions(std::istream& in, const std::string& origin) {
  RegionFile file;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& what) -> void {
    throw FormatError(origin + ":" + std::to_string(line_no) + ": " + what);
  };
  auto next_line = [&]() -> bool {
    while (std::getline(in, line)) {
      ++line_no;
      if (line.find_first_not_of(" \t\r") != std::string::npos) return true;
    }
    return false;
  };

  if (!next_line()) fail("missing descriptor dimension line");
  {
    std::istringstream ss(line);
    if (!(ss >> file.dimension) || file.dimension < 0) fail("invalid descriptor dimension");
  }
  if (!next_line()) fail("missing region count line");
  long count = 0;
  {
    std::istringstream ss(line);
    if (!(ss >> count) || count < 0) fail("invalid region count");
  }
  const int values = file.dimension > 1 ? file.dimension : 0;
  for (long i = 0; i < count; ++i) {
    if (!next_line()) fail("expected " + std::to_string(count) + " regions, found " + std::to_string(i));
    std::istringstream ss(line);
    AffineRegion r;
    if (!(ss >> r.x >> r.y >> r.a >> r.b >> r.c)) fail("expected 'x y a b c'");
    std::vector<double> desc(values);
    for (double& v : desc) {
      if (!(ss >> v)) fail("expected " + std::to_string(values) + " descriptor values");
    }
    double extra;
    if (ss >> extra) fail("unexpected trailing values");
    if (!std::isfinite(r.x) || !std::isfinite(r.y) || !std::isfinite(r.a) ||
        !std::isfinite(r.b) || !std::isfinite(r.c)) {
      fail("non-finite region field");
    }
    if (!r.positive_definite()) {
      warn(origin + ":" + std::to_string(line_no) + ": ellipse not positive definite, skipped");
      continue;
    }
    file.regions.push_back(r);
    if (values > 0) file.descriptors.push_back(std::move(desc));
  }
  return file;
}

RegionFile read_regions(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open region file '" + path + "'");
  return parse_regions(in, path);
}

void write_regions(std::ostream& out, const RegionFile& file) {
  if (!file.descriptors.empty() && file.descriptors.size() != file.regions.size()) {
    throw ContractError("descriptor count does not match region count");
  }
  out << file.dimension << '\n' << file.regions.size() << '\n';
  char buf[128];
  for (std::size_t i = 0; i < file.regions.size(); ++i) {
    const auto& r = file.regions[i];
    std::snprintf(buf, sizeof buf, "%.10g %.10g %.10g %.10g %.10g", r.x, r.y, r.a, r.b, r.c);
    out << buf;
    if (!file.descriptors.empty()) {
      const auto& d = file.descriptors[i];
      if (int(d.size()) != file.dimension) throw ContractError("descriptor length mismatch");
      for (double v : d) {
        std::snprintf(buf, sizeof buf, " %.6g", v);
        out << buf;
      }
    }
    out << '\n';
  }
}

void write_regions(const std::string& path, const RegionFile& file) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  write_regions(out, file);
  out.flush();
  if (!out) throw IoError("error writing '" + path + "'");
}

// ---------------------------------------------------------------------------
// Homography

Homography::Homography() : h_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Homography::Homography(const std::array<double, 9>& h) : h_(h) {
  for (double v : h_) {
    if (!std::isfinite(v)) throw ContractError("homography has non-finite entries");
  }
  if (h_[8] != 0.0) {
    const double s = h_[8];
    for (double& v : h_) v /= s;
  }
  if (!(std::abs(determinant()) > 1e-12)) throw ContractError("homography is singular");
}

double Homography::determinant() const {
  const auto& h = h_;
  return h[0] * (h[4] * h[8] - h[5] * h[7]) - h[1] * (h[3] * h[8] - h[5] * h[6]) +
         h[2] * (h[3] * h[7] - h[4] * h[6]);
}

std::array<double, 2> Homography::apply(double x, double y) const {
  const auto& h = h_;
  const double w = h[6] * x + h[7] * y + h[8];
  return {(h[0] * x + h[1] * y + h[2]) / w, (h[3] * x + h[4] * y + h[5]) / w};
}

std::array<double, 4> Homography::jacobian(double x, double y) const {
  const auto& h = h_;
  const double w = h[6] * x + h[7] * y + h[8];
  const auto [u, v] = apply(x, y);
  return {(h[0] - u * h[6]) / w, (h[1] - u * h[7]) / w, (h[3] - v * h[6]) / w,
          (h[4] - v * h[7]) / w};
}

Homography Homography::rotation(double angle_deg, double cx, double cy) {
  const Frame f(angle_deg);
  // p - c = [[c, s], [-s, c]] (q - c)
  return Homography({f.c, f.s, cx - f.c * cx - f.s * cy, -f.s, f.c, cy + f.s * cx - f.c * cy, 0,
                     0, 1});
}

Homography parse_homography(std::istream& in, const std::string& origin) {
  std::array<double, 9> h{};
  for (std::size_t i = 0; i < 9; ++i) {
    if (!(in >> h[i])) {
      throw FormatError(origin + ": expected 9 homography entries, read " + std::to_string(i));
    }
  }
  std::string extra;
  if (in >> extra) throw FormatError(origin + ": trailing content after 9 homography entries");
  return Homography(h);
}

Homography read_homography(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open homography file '" + path + "'");
  return parse_homography(in, path);
}

// ---------------------------------------------------------------------------
// Harris

namespace {

std::vector<double> gaussian_taps(double sigma) {
  const int r = std::max(1, int(std::ceil(3.0 * sigma)));
  std::vector<double> w(2 * r + 1);
  double sum = 0.0;
  for (int i = -r; i <= r; ++i) sum += w[i + r] = std::exp(-double(i) * i / (2.0 * sigma * sigma));
  for (double& v : w) v /= sum;
  return w;
}

// Separable Gaussian, replicated border, anchor-relative so flat regions stay
// bit-exact.
GrayImage gaussian_blur(const GrayImage& src, double sigma) {
  const auto w = gaussian_taps(sigma);
  const int r = int(w.size() / 2);
  GrayImage tmp(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const double anchor = src.at(x, y);
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) {
        if (k != 0) acc += w[k + r] * (src.clamped(x + k, y) - anchor);
      }
      tmp.at(x, y) = anchor + acc;
    }
  }
  GrayImage out(src.width(), src.height());
  for (int y = 0; y < src.height(); ++y) {
    for (int x = 0; x < src.width(); ++x) {
      const double anchor = tmp.at(x, y);
      double acc = 0.0;
      for (int k = -r; k <= r; ++k) {
        if (k != 0) acc += w[k + r] * (tmp.clamped(x, y + k) - anchor);
      }
      out.at(x, y) = anchor + acc;
    }
  }
  return out;
}

}  // namespace

GrayImage harris_response(const GrayImage& image, const HarrisParams& params) {
  if (!(params.sigma_d > 0.0) || !(params.sigma_i > 0.0)) {
    throw ParameterError("Harris scales must be positive");
  }
  const GrayImage smooth = gaussian_blur(image, params.sigma_d);
  const int w = image.width();
  const int h = image.height();
  GrayImage ixx(w, h), iyy(w, h), ixy(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double gx = 0.5 * (smooth.clamped(x + 1, y) - smooth.clamped(x - 1, y));
      const double gy = 0.5 * (smooth.clamped(x, y + 1) - smooth.clamped(x, y - 1));
      ixx.at(x, y) = gx * gx;
      iyy.at(x, y) = gy * gy;
      ixy.at(x, y) = gx * gy;
    }
  }
  const GrayImage sxx = gaussian_blur(ixx, params.sigma_i);
  const GrayImage syy = gaussian_blur(iyy, params.sigma_i);
  const GrayImage sxy = gaussian_blur(ixy, params.sigma_i);
  GrayImage response(w, h);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double a = sxx.at(x, y), b = sxy.at(x, y), c = syy.at(x, y);
      const double tr = a + c;
      response.at(x, y) = a * c - b * b - params.k * tr * tr;
    }
  }
  return response;
}

std::vector<AffineRegion> harris_detect(const GrayImage& image, const HarrisParams& params) {
  const GrayImage r = harris_response(image, params);
  const auto samples = r.samples();
  const double peak = *std::max_element(samples.begin(), samples.end());
  if (!(peak > 0.0) || params.max_regions <= 0) return {};
  const double floor_value = params.threshold * peak;

  struct Candidate {
    double response;
    int x, y;
  };
  std::vector<Candidate> found;
  for (int y = 0; y < r.height(); ++y) {
    for (int x = 0; x < r.width(); ++x) {
      const double v = r.at(x, y);
      if (!(v > 0.0) || !(v > floor_value)) continue;
      bool is_max = true;
      for (int dy = -1; dy <= 1 && is_max; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0) continue;
          if (!r.contains(x + dx, y + dy)) continue;
          const double n = r.at(x + dx, y + dy);
          // plateaus keep their first pixel in raster order
          const bool earlier = dy < 0 || (dy == 0 && dx < 0);
          if (n > v || (earlier && n == v)) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) found.push_back({v, x, y});
    }
  }
  std::stable_sort(found.begin(), found.end(),
                   [](const Candidate& a, const Candidate& b) { return a.response > b.response; });
  if (int(found.size()) > params.max_regions) found.resize(std::size_t(params.max_regions));

  std::vector<AffineRegion> out;
  out.reserve(found.size());
  for (const auto& c : found) out.push_back(AffineRegion::circle(c.x, c.y, 3.0 * params.sigma_i));
  return out;
}

// ---------------------------------------------------------------------------
// Patch normalization

namespace {

// E^(-1/2) for symmetric positive definite [[a, b], [b, c]].
std::array<double, 4> inverse_sqrt(double a, double b, double c) {
  const double det = a * c - b * b;
  if (!(a > 0.0) || !(det > 0.0)) throw ContractError("ellipse is not positive definite");
  const double sd = std::sqrt(det);
  const double t = std::sqrt(a + c + 2.0 * sd);
  // sqrt(E) = (E + sd·I) / t
  const double s00 = (a + sd) / t, s01 = b / t, s11 = (c + sd) / t;
  const double sdet = s00 * s11 - s01 * s01;
  return {s11 / sdet, -s01 / sdet, -s01 / sdet, s00 / sdet};
}

GrayImage sample_patch(const GrayImage& image, const AffineRegion& region, int size,
                       double magnification, double phi_deg) {
  if (size < 1) throw ParameterError("patch size must be positive");
  if (!(magnification > 0.0)) throw ParameterError("magnification must be positive");
  const auto m = inverse_sqrt(region.a, region.b, region.c);
  const double k = 2.0 * magnification / size;
  const Frame f(phi_deg);
  const double center = 0.5 * (size - 1);
  GrayImage patch(size, size);
  for (int j = 0; j < size; ++j) {
    for (int i = 0; i < size; ++i) {
      const double px = i - center;
      const double py = j - center;
      const double rx = f.to_dx(px, py);
      const double ry = f.to_dy(px, py);
      const double ix = region.x + k * (m[0] * rx + m[1] * ry);
      const double iy = region.y + k * (m[2] * rx + m[3] * ry);
      patch.at(i, j) = image.bilinear(ix, iy);
    }
  }
  return patch;
}

}  // namespace

double dominant_orientation(const GrayImage& image, const AffineRegion& region,
                            const PatchParams& params) {
  const GrayImage patch =
      sample_patch(image, region, params.patch_size, params.magnification, 0.0);
  constexpr int kBins = 36;
  std::array<double, kBins> hist{};
  const int n = params.patch_size;
  const double center = 0.5 * (n - 1);
  const double radius = 0.5 * n;
  const double sigma = 0.5 * n;
  for (int y = 1; y + 1 < n; ++y) {
    for (int x = 1; x + 1 < n; ++x) {
      const double dx = x - center, dy = y - center;
      const double r2 = dx * dx + dy * dy;
      if (r2 > radius * radius) continue;
      const double gx = 0.5 * (patch.at(x + 1, y) - patch.at(x - 1, y));
      const double gy = 0.5 * (patch.at(x, y + 1) - patch.at(x, y - 1));
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      const double angle = wrap_degrees(rad2deg(std::atan2(-gy, gx)));
      const int bin = int(std::lround(angle / 10.0)) % kBins;
      hist[std::size_t(bin)] += mag * std::exp(-r2 / (2.0 * sigma * sigma));
    }
  }
  int best = 0;
  for (int i = 1; i < kBins; ++i) {
    if (hist[std::size_t(i)] > hist[std::size_t(best)]) best = i;
  }
  if (hist[std::size_t(best)] == 0.0) return 0.0;
  const double left = hist[std::size_t((best + kBins - 1) % kBins)];
  const double mid = hist[std::size_t(best)];
  const double right = hist[std::size_t((best + 1) % kBins)];
  const double denom = left - 2.0 * mid + right;
  const double offset = denom < 0.0 ? 0.5 * (left - right) / denom : 0.0;
  return wrap_degrees((best + offset) * 10.0);
}

GrayImage normalize_patch(const GrayImage& image, const AffineRegion& region,
                          const PatchParams& params) {
  if (!region.positive_definite()) throw ContractError("ellipse is not positive definite");
  const double phi = params.assign_orientation ? dominant_orientation(image, region, params)
                                               : region.orientation.value_or(0.0);
  return sample_patch(image, region, params.patch_size, params.magnification, phi);
}

}  // namespace rsddog
