#pragma once

#include "gseg/types.hpp"

#include <span>
#include <utility>
#include <vector>

namespace gseg::metrics {

/// Fraction of pixels where the two binary masks disagree.
double pixel_error(const Mask& truth, const Mask& prediction);

/// Instance-recognition cost: 1 - (matched predictions / K). A predicted
/// region counts as matched when a one-to-one greedy assignment by
/// descending IoU pairs it with a ground-truth instance at IoU >= threshold
/// (inclusive). Requires at least one ground-truth instance.
double instance_recognition_cost(const InstanceMap& truth, const InstanceMap& prediction,
                                 const MetricConfig& cfg = {});

struct MatchResult {
  int tp = 0;
  int fp = 0;
  int fn = 0;
  std::vector<std::pair<std::int32_t, std::int32_t>> pairs;  // (pred_id, gt_id)
};

struct DetectionScore {
  double precision = 0;
  double recall = 0;
  double f1 = 0;
  MatchResult matches;
};

/// Object detection F1. Each predicted object claims its maximally
/// overlapping unclaimed ground-truth object and is a TP when the overlap
/// rule passes (default: shares strictly more than `iou_threshold` of the
/// ground-truth object's area). Unmatched predictions are FP, unclaimed
/// ground-truth objects FN.
DetectionScore detection_f1(const InstanceMap& truth, const InstanceMap& prediction,
                            const MetricConfig& cfg = {});

/// Dice overlap of two pixel sets; 1 when both are empty.
double dice(std::span<const Pixel> a, std::span<const Pixel> b);

/// Exact Euclidean Hausdorff distance between two nonempty pixel sets.
double hausdorff(std::span<const Pixel> a, std::span<const Pixel> b);

/// Object-level Dice: both directions of maximal-overlap counterpart
/// pairing, each object weighted by its own area share; objects overlapping
/// nothing contribute 0. Requires an object on at least one side.
double object_dice(const InstanceMap& truth, const InstanceMap& prediction);

/// Object-level Hausdorff with the same pairing and weights as object_dice;
/// an object overlapping nothing is paired with the counterpart minimizing
/// the plain Hausdorff distance. Requires objects on both sides.
double object_hausdorff(const InstanceMap& truth, const InstanceMap& prediction);

}  // namespace gseg::metrics
