#include "gseg/metrics.hpp"

#include "gseg/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

namespace gseg::metrics {
namespace {

using Eigen::Index;

// Pairwise overlap pixel counts between nonzero IDs of two maps, plus
// per-side areas, from one joint pass.
struct Contingency {
  std::map<std::int32_t, Index> truth_area;
  std::map<std::int32_t, Index> pred_area;
  std::map<std::pair<std::int32_t, std::int32_t>, Index> overlap;  // (gt, pred)

  Index overlap_of(std::int32_t gt, std::int32_t pred) const {
    const auto it = overlap.find({gt, pred});
    return it == overlap.end() ? 0 : it->second;
  }
};

Contingency contingency(const InstanceMap& truth, const InstanceMap& prediction) {
  Contingency c;
  for (Index y = 0; y < truth.rows(); ++y) {
    for (Index x = 0; x < truth.cols(); ++x) {
      const std::int32_t g = truth(y, x), p = prediction(y, x);
      if (g != 0) ++c.truth_area[g];
      if (p != 0) ++c.pred_area[p];
      if (g != 0 && p != 0) ++c.overlap[{g, p}];
    }
  }
  return c;
}

void validate_pair(const InstanceMap& truth, const InstanceMap& prediction, const char* what) {
  require_same_shape(truth, prediction, what);
  validate_instance_map(truth);
  validate_instance_map(prediction);
}

// Maximal-overlap counterpart of `id` on the other side; ties take the
// smaller counterpart ID. Returns 0 when nothing overlaps.
std::int32_t max_overlap_counterpart(const Contingency& c, std::int32_t id, bool id_is_pred) {
  std::int32_t best = 0;
  Index best_overlap = 0;
  const auto& others = id_is_pred ? c.truth_area : c.pred_area;
  for (const auto& [other_id, area] : others) {
    const Index ov = id_is_pred ? c.overlap_of(other_id, id) : c.overlap_of(id, other_id);
    if (ov > best_overlap) {
      best_overlap = ov;
      best = other_id;
    }
  }
  return best;
}

double hausdorff_between(const InstanceMap& truth, std::int32_t gt_id, const InstanceMap& pred,
                         std::int32_t pred_id);

}  // namespace

double pixel_error(const Mask& truth, const Mask& prediction) {
  require_same_shape(truth, prediction, "pixel_error");
  validate_mask(truth, "pixel_error truth");
  validate_mask(prediction, "pixel_error prediction");
  if (truth.size() == 0) return 0.0;
  const Index disagreements = (truth != prediction).count();
  return double(disagreements) / double(truth.size());
}

double instance_recognition_cost(const InstanceMap& truth, const InstanceMap& prediction,
                                 const MetricConfig& cfg) {
  validate_pair(truth, prediction, "instance_recognition_cost");
  validate_metric_config(cfg);
  const Contingency c = contingency(truth, prediction);
  const Index k = static_cast<Index>(c.truth_area.size());
  if (k == 0)
    throw ValidationError("instance_recognition_cost: ground truth has no instances");

  struct Candidate {
    double iou;
    std::int32_t pred, gt;
  };
  std::vector<Candidate> candidates;
  for (const auto& [key, inter] : c.overlap) {
    const auto [gt, pred] = key;
    const double uni = double(c.truth_area.at(gt) + c.pred_area.at(pred) - inter);
    const double iou = double(inter) / uni;
    if (iou >= cfg.iou_threshold) candidates.push_back({iou, pred, gt});
  }
  std::sort(candidates.begin(), candidates.end(), [](const Candidate& a, const Candidate& b) {
    if (a.iou != b.iou) return a.iou > b.iou;
    if (a.pred != b.pred) return a.pred < b.pred;
    return a.gt < b.gt;
  });

  std::map<std::int32_t, bool> pred_used, gt_used;
  Index matched = 0;
  for (const Candidate& cand : candidates) {
    if (pred_used[cand.pred] || gt_used[cand.gt]) continue;
    pred_used[cand.pred] = gt_used[cand.gt] = true;
    ++matched;
  }
  return 1.0 - double(matched) / double(k);
}

DetectionScore detection_f1(const InstanceMap& truth, const InstanceMap& prediction,
                            const MetricConfig& cfg) {
  validate_pair(truth, prediction, "detection_f1");
  validate_metric_config(cfg);
  const Contingency c = contingency(truth, prediction);

  DetectionScore score;
  std::map<std::int32_t, bool> claimed;
  for (const auto& [pred_id, pred_area] : c.pred_area) {
    // Maximal overlap among ground-truth objects not yet claimed.
    std::int32_t best_gt = 0;
    Index best_overlap = 0;
    for (const auto& [gt_id, gt_area] : c.truth_area) {
      if (claimed[gt_id]) continue;
      const Index ov = c.overlap_of(gt_id, pred_id);
      if (ov > best_overlap) {
        best_overlap = ov;
        best_gt = gt_id;
      }
    }
    bool matched = false;
    if (best_gt != 0) {
      if (cfg.detection_rule == DetectionRule::kIntersectionOverGt) {
        matched = double(best_overlap) / double(c.truth_area.at(best_gt)) > cfg.iou_threshold;
      } else {
        const double uni =
            double(c.truth_area.at(best_gt) + c.pred_area.at(pred_id) - best_overlap);
        matched = double(best_overlap) / uni >= cfg.iou_threshold;
      }
    }
    if (matched) {
      claimed[best_gt] = true;
      ++score.matches.tp;
      score.matches.pairs.emplace_back(pred_id, best_gt);
    } else {
      ++score.matches.fp;
    }
  }
  score.matches.fn = static_cast<int>(c.truth_area.size()) - score.matches.tp;

  const int tp = score.matches.tp, fp = score.matches.fp, fn = score.matches.fn;
  score.precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
  score.recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
  score.f1 = score.precision + score.recall > 0
                 ? 2.0 * score.precision * score.recall / (score.precision + score.recall)
                 : 0.0;
  return score;
}

double dice(std::span<const Pixel> a, std::span<const Pixel> b) {
  if (a.empty() && b.empty()) return 1.0;
  std::vector<Pixel> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  std::sort(sa.begin(), sa.end());
  std::sort(sb.begin(), sb.end());
  Index inter = 0;
  auto ia = sa.begin();
  auto ib = sb.begin();
  while (ia != sa.end() && ib != sb.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  return 2.0 * double(inter) / double(sa.size() + sb.size());
}

double hausdorff(std::span<const Pixel> a, std::span<const Pixel> b) {
  if (a.empty() || b.empty())
    throw ValidationError("hausdorff: undefined for an empty pixel set");

  // Small inputs: direct max-min over all pairs with an early exit.
  if (a.size() * b.size() <= (std::size_t(1) << 22)) {
    const auto directed = [](std::span<const Pixel> from, std::span<const Pixel> to) {
      double worst = 0.0;
      for (const Pixel& p : from) {
        double best = std::numeric_limits<double>::infinity();
        for (const Pixel& q : to) {
          const double dy = double(p.y - q.y), dx = double(p.x - q.x);
          const double d2 = dy * dy + dx * dx;
          if (d2 < best) {
            best = d2;
            if (best <= worst) break;  // cannot raise the max any more
          }
        }
        worst = std::max(worst, best);
      }
      return worst;
    };
    return std::sqrt(std::max(directed(a, b), directed(b, a)));
  }

  // Large inputs: exact distance transforms over the joint bounding box.
  Index y0 = a[0].y, y1 = a[0].y, x0 = a[0].x, x1 = a[0].x;
  for (std::span<const Pixel> s : {a, b})
    for (const Pixel& p : s) {
      y0 = std::min(y0, p.y);
      y1 = std::max(y1, p.y);
      x0 = std::min(x0, p.x);
      x1 = std::max(x1, p.x);
    }
  const Index h = y1 - y0 + 1, w = x1 - x0 + 1;
  Mask ma = Mask::Zero(h, w), mb = Mask::Zero(h, w);
  for (const Pixel& p : a) ma(p.y - y0, p.x - x0) = 1;
  for (const Pixel& p : b) mb(p.y - y0, p.x - x0) = 1;
  const PlaneD da = squared_distance_transform(ma);
  const PlaneD db = squared_distance_transform(mb);
  double worst = 0.0;
  for (const Pixel& p : a) worst = std::max(worst, db(p.y - y0, p.x - x0));
  for (const Pixel& p : b) worst = std::max(worst, da(p.y - y0, p.x - x0));
  return std::sqrt(worst);
}

namespace {

double hausdorff_between(const InstanceMap& truth, std::int32_t gt_id, const InstanceMap& pred,
                         std::int32_t pred_id) {
  std::vector<Pixel> g, s;
  for (Index y = 0; y < truth.rows(); ++y)
    for (Index x = 0; x < truth.cols(); ++x) {
      if (truth(y, x) == gt_id) g.push_back({y, x});
      if (pred(y, x) == pred_id) s.push_back({y, x});
    }
  return hausdorff(g, s);
}

}  // namespace

double object_dice(const InstanceMap& truth, const InstanceMap& prediction) {
  validate_pair(truth, prediction, "object_dice");
  const Contingency c = contingency(truth, prediction);
  if (c.truth_area.empty() && c.pred_area.empty())
    throw ValidationError("object_dice: both maps have no objects");

  const auto side_sum = [&](bool over_pred) {
    const auto& own = over_pred ? c.pred_area : c.truth_area;
    const auto& other = over_pred ? c.truth_area : c.pred_area;
    if (own.empty()) return 0.0;
    double total_area = 0;
    for (const auto& [id, area] : own) total_area += double(area);
    double sum = 0;
    for (const auto& [id, area] : own) {
      const std::int32_t mate = max_overlap_counterpart(c, id, over_pred);
      double d = 0.0;
      if (mate != 0) {
        const Index inter = over_pred ? c.overlap_of(mate, id) : c.overlap_of(id, mate);
        d = 2.0 * double(inter) / double(area + other.at(mate));
      }
      sum += double(area) / total_area * d;
    }
    return sum;
  };
  return 0.5 * (side_sum(true) + side_sum(false));
}

double object_hausdorff(const InstanceMap& truth, const InstanceMap& prediction) {
  validate_pair(truth, prediction, "object_hausdorff");
  const Contingency c = contingency(truth, prediction);
  if (c.truth_area.empty() || c.pred_area.empty())
    throw ValidationError("object_hausdorff: both maps must contain objects");

  const auto side_sum = [&](bool over_pred) {
    const auto& own = over_pred ? c.pred_area : c.truth_area;
    const auto& other = over_pred ? c.truth_area : c.pred_area;
    double total_area = 0;
    for (const auto& [id, area] : own) total_area += double(area);
    double sum = 0;
    for (const auto& [id, area] : own) {
      std::int32_t mate = max_overlap_counterpart(c, id, over_pred);
      double h;
      if (mate != 0) {
        h = over_pred ? hausdorff_between(truth, mate, prediction, id)
                      : hausdorff_between(truth, id, prediction, mate);
      } else {
        // No overlap anywhere: fall back to the nearest counterpart by
        // plain Hausdorff distance.
        h = std::numeric_limits<double>::infinity();
        for (const auto& [cand, cand_area] : other) {
          const double hc = over_pred ? hausdorff_between(truth, cand, prediction, id)
                                      : hausdorff_between(truth, id, prediction, cand);
          if (hc < h) h = hc;
        }
      }
      sum += double(area) / total_area * h;
    }
    return sum;
  };
  return 0.5 * (side_sum(true) + side_sum(false));
}

}  // namespace gseg::metrics
