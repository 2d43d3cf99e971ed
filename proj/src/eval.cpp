#include "rsddog/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <set>
#include <tuple>

#include "rsddog/error.hpp"

namespace rsddog {

GtCriterion parse_gt_criterion(const std::string& name) {
  if (name == "center") return GtCriterion::Center;
  if (name == "overlap") return GtCriterion::Overlap;
  throw UsageError("unknown ground-truth criterion '" + name + "' (expected center or overlap)");
}

double default_gt_parameter(GtCriterion criterion) {
  return criterion == GtCriterion::Center ? 2.5 : 0.5;
}

bool CorrespondenceSet::contains(int a, int b) const {
  return std::binary_search(pairs.begin(), pairs.end(), std::make_pair(a, b));
}

namespace {

struct EllipseBox {
  double x0, x1, y0, y1;
};

EllipseBox bounding_box(const AffineRegion& r) {
  const double det = r.a * r.c - r.b * r.b;
  // half extents are sqrt of the diagonal of E^-1
  const double hx = std::sqrt(r.c / det);
  const double hy = std::sqrt(r.a / det);
  return {r.x - hx, r.x + hx, r.y - hy, r.y + hy};
}

bool inside(const AffineRegion& r, double u, double v) {
  const double du = u - r.x, dv = v - r.y;
  return r.a * du * du + 2.0 * r.b * du * dv + r.c * dv * dv <= 1.0;
}

}  // namespace

double ellipse_overlap_error(const AffineRegion& first, const AffineRegion& second, double cell) {
  if (!first.positive_definite() || !second.positive_definite()) {
    throw ContractError("overlap requires positive definite ellipses");
  }
  const EllipseBox a = bounding_box(first), b = bounding_box(second);
  if (a.x1 < b.x0 || b.x1 < a.x0 || a.y1 < b.y0 || b.y1 < a.y0) return 1.0;
  const double x0 = std::min(a.x0, b.x0), x1 = std::max(a.x1, b.x1);
  const double y0 = std::min(a.y0, b.y0), y1 = std::max(a.y1, b.y1);
  const long nx = long(std::ceil((x1 - x0) / cell));
  const long ny = long(std::ceil((y1 - y0) / cell));
  long inter = 0, uni = 0;
  for (long j = 0; j < ny; ++j) {
    const double v = y0 + (j + 0.5) * cell;
    for (long i = 0; i < nx; ++i) {
      const double u = x0 + (i + 0.5) * cell;
      const bool in_a = inside(first, u, v);
      const bool in_b = inside(second, u, v);
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  }
  if (uni == 0) return 1.0;
  return 1.0 - double(inter) / double(uni);
}

AffineRegion project_region(const AffineRegion& a, const Homography& h) {
  const auto [x, y] = h.apply(a.x, a.y);
  const auto j = h.jacobian(a.x, a.y);
  // E' = J^-T E J^-1
  const double det = j[0] * j[3] - j[1] * j[2];
  const double i00 = j[3] / det, i01 = -j[1] / det, i10 = -j[2] / det, i11 = j[0] / det;
  // E J^-1
  const double m00 = a.a * i00 + a.b * i10, m01 = a.a * i01 + a.b * i11;
  const double m10 = a.b * i00 + a.c * i10, m11 = a.b * i01 + a.c * i11;
  AffineRegion out;
  out.x = x;
  out.y = y;
  out.a = i00 * m00 + i10 * m10;
  out.b = i00 * m01 + i10 * m11;
  out.c = i01 * m01 + i11 * m11;
  out.orientation = a.orientation;
  return out;
}

CorrespondenceSet ground_truth(const std::vector<AffineRegion>& regions_a,
                               const std::vector<AffineRegion>& regions_b, const Homography& h,
                               GtCriterion criterion, double parameter) {
  if (!(std::abs(h.determinant()) > 1e-12)) throw ContractError("homography is singular");
  if (!(parameter > 0.0)) throw ParameterError("ground-truth parameter must be positive");

  struct Candidate {
    double error;
    int a, b;
  };
  std::vector<Candidate> candidates;
  std::vector<AffineRegion> projected;
  projected.reserve(regions_a.size());
  for (const auto& r : regions_a) projected.push_back(project_region(r, h));

  for (int i = 0; i < int(regions_a.size()); ++i) {
    const auto& p = projected[std::size_t(i)];
    for (int j = 0; j < int(regions_b.size()); ++j) {
      const auto& q = regions_b[std::size_t(j)];
      double error;
      if (criterion == GtCriterion::Center) {
        error = std::hypot(p.x - q.x, p.y - q.y);
      } else {
        error = ellipse_overlap_error(p, q);
      }
      if (error < parameter) candidates.push_back({error, i, j});
    }
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& l, const Candidate& r) {
    return std::tie(l.error, l.a, l.b) < std::tie(r.error, r.a, r.b);
  });

  CorrespondenceSet set;
  set.criterion = criterion;
  set.parameter = parameter;
  std::vector<char> used_a(regions_a.size(), 0), used_b(regions_b.size(), 0);
  for (const auto& c : candidates) {
    if (used_a[std::size_t(c.a)] || used_b[std::size_t(c.b)]) continue;
    used_a[std::size_t(c.a)] = used_b[std::size_t(c.b)] = 1;
    set.pairs.emplace_back(c.a, c.b);
  }
  std::sort(set.pairs.begin(), set.pairs.end());
  return set;
}

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw ContractError("descriptor lengths differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {

void check_lengths(const DescriptorList& a, const DescriptorList& b) {
  std::size_t len = 0;
  bool first = true;
  for (const auto* list : {&a, &b}) {
    for (const auto& d : *list) {
      if (first) {
        len = d.size();
        first = false;
      } else if (d.size() != len) {
        throw ContractError("descriptors have mixed lengths");
      }
    }
  }
}

}  // namespace

std::vector<MatchPair> threshold_match(const DescriptorList& a, const DescriptorList& b,
                                       double threshold) {
  check_lengths(a, b);
  std::vector<MatchPair> out;
  for (int i = 0; i < int(a.size()); ++i) {
    for (int j = 0; j < int(b.size()); ++j) {
      const double d = euclidean_distance(a[std::size_t(i)], b[std::size_t(j)]);
      if (d < threshold) out.push_back({i, j, d, false});
    }
  }
  return out;
}

Score score(std::vector<MatchPair>& matches, const CorrespondenceSet& correspondences) {
  Score s;
  for (auto& m : matches) {
    m.correct = correspondences.contains(m.index_a, m.index_b);
    if (m.correct) {
      ++s.correct;
    } else {
      ++s.false_matches;
    }
  }
  const auto total = correspondences.pairs.size();
  s.recall = total > 0 ? double(s.correct) / double(total) : 0.0;
  const long matched = s.correct + s.false_matches;
  s.one_minus_precision = matched > 0 ? double(s.false_matches) / double(matched) : 0.0;
  return s;
}

std::vector<double> default_thresholds(const DescriptorList& a, const DescriptorList& b,
                                       int count) {
  if (count < 1) throw ParameterError("threshold count must be positive");
  check_lengths(a, b);
  std::vector<double> d;
  d.reserve(a.size() * b.size());
  for (const auto& x : a) {
    for (const auto& y : b) d.push_back(euclidean_distance(x, y));
  }
  double m = 1.0;
  if (!d.empty()) {
    std::sort(d.begin(), d.end());
    const std::size_t n = d.size();
    m = n % 2 ? d[n / 2] : 0.5 * (d[n / 2 - 1] + d[n / 2]);
    if (!(m > 0.0)) m = d.back();
    if (!(m > 0.0)) m = 1.0;
  }
  const double lo = 0.01 * m, hi = 2.0 * m;
  std::vector<double> t(static_cast<std::size_t>(count));
  if (count == 1) {
    t[0] = hi;
    return t;
  }
  for (int i = 0; i < count; ++i) {
    t[std::size_t(i)] = lo * std::pow(hi / lo, double(i) / (count - 1));
  }
  t.back() = hi;
  return t;
}

MatchCurve curve(const DescriptorList& a, const DescriptorList& b,
                 const CorrespondenceSet& correspondences, const std::vector<double>& thresholds) {
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) {
      throw ParameterError("thresholds must be strictly increasing");
    }
  }
  check_lengths(a, b);
  // Distances split by correctness, sorted; a threshold then counts by
  // binary search, which selects exactly the pairs threshold_match would.
  std::vector<double> good, bad;
  for (int i = 0; i < int(a.size()); ++i) {
    for (int j = 0; j < int(b.size()); ++j) {
      const double d = euclidean_distance(a[std::size_t(i)], b[std::size_t(j)]);
      (correspondences.contains(i, j) ? good : bad).push_back(d);
    }
  }
  std::sort(good.begin(), good.end());
  std::sort(bad.begin(), bad.end());

  MatchCurve c;
  c.correspondences = long(correspondences.pairs.size());
  for (double t : thresholds) {
    CurveSample s;
    s.threshold = t;
    s.correct = long(std::lower_bound(good.begin(), good.end(), t) - good.begin());
    s.false_matches = long(std::lower_bound(bad.begin(), bad.end(), t) - bad.begin());
    s.recall = c.correspondences > 0 ? double(s.correct) / double(c.correspondences) : 0.0;
    const long matched = s.correct + s.false_matches;
    s.one_minus_precision = matched > 0 ? double(s.false_matches) / double(matched) : 0.0;
    c.samples.push_back(s);
  }
  return c;
}

void write_curve_csv(std::ostream& out, const MatchCurve& curve) {
  out << "threshold,recall,one_minus_precision,correct,false,correspondences\n";
  char buf[160];
  for (const auto& s : curve.samples) {
    std::snprintf(buf, sizeof buf, "%.6g,%.6g,%.6g,%ld,%ld,%ld\n", s.threshold, s.recall,
                  s.one_minus_precision, s.correct, s.false_matches, curve.correspondences);
    out << buf;
  }
}

}  // namespace rsddog
