#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "rsddog/regions.hpp"

namespace rsddog {

struct MatchPair {
  int index_a = 0;
  int index_b = 0;
  double distance = 0.0;
  bool correct = false;
};

enum class GtCriterion { Center, Overlap };

GtCriterion parse_gt_criterion(const std::string& name);
double default_gt_parameter(GtCriterion criterion);

struct CorrespondenceSet {
  std::vector<std::pair<int, int>> pairs;  // one-to-one (index_a, index_b)
  GtCriterion criterion = GtCriterion::Center;
  double parameter = 2.5;

  bool contains(int a, int b) const;
};

/// 1 - |A ∩ B| / |A ∪ B| for two ellipses given as centre plus [[a,b],[b,c]],
/// rasterized on `cell`-sized cells over the joint bounding box.
double ellipse_overlap_error(const AffineRegion& first, const AffineRegion& second,
                             double cell = 0.1);

/// Region `a` from image A mapped into image B through the local affine
/// approximation of H at its centre.
AffineRegion project_region(const AffineRegion& a, const Homography& h);

/// Center: reprojection distance < parameter pixels. Overlap: overlap error
/// of the projected ellipse < parameter. Candidates are accepted greedily by
/// ascending error, ties by (index_a, index_b), each index used once.
CorrespondenceSet ground_truth(const std::vector<AffineRegion>& regions_a,
                               const std::vector<AffineRegion>& regions_b, const Homography& h,
                               GtCriterion criterion, double parameter);

using DescriptorList = std::vector<std::vector<double>>;

double euclidean_distance(const std::vector<double>& a, const std::vector<double>& b);

/// Every (i, j) with distance < threshold, ordered by (i, j).
std::vector<MatchPair> threshold_match(const DescriptorList& a, const DescriptorList& b,
                                       double threshold);

struct Score {
  double recall = 0.0;
  double one_minus_precision = 0.0;
  long correct = 0;
  long false_matches = 0;
};

/// Marks each match against the correspondences and applies
/// recall = correct / |corr|, 1-precision = false / (correct + false), with
/// empty denominators giving 0.
Score score(std::vector<MatchPair>& matches, const CorrespondenceSet& correspondences);

struct CurveSample {
  double threshold = 0.0;
  double recall = 0.0;
  double one_minus_precision = 0.0;
  long correct = 0;
  long false_matches = 0;
};

struct MatchCurve {
  std::vector<CurveSample> samples;
  long correspondences = 0;
};

/// `count` thresholds spaced geometrically from 0.01·m to 2·m, m being the
/// median distance over all cross pairs (the maximum if the median is 0,
/// and 1 if every distance is 0).
std::vector<double> default_thresholds(const DescriptorList& a, const DescriptorList& b,
                                       int count = 64);

MatchCurve curve(const DescriptorList& a, const DescriptorList& b,
                 const CorrespondenceSet& correspondences, const std::vector<double>& thresholds);

/// "threshold,recall,one_minus_precision,correct,false,correspondences",
/// reals with 6 significant digits, LF endings.
void write_curve_csv(std::ostream& out, const MatchCurve& curve);

}  // namespace rsddog
