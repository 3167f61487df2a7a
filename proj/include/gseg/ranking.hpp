#pragma once

#include "gseg/types.hpp"

#include <array>
#include <string>
#include <vector>

namespace gseg {

/// One method's six challenge scores (F1 / object Dice / object Hausdorff,
/// each on test parts A and B).
struct ScoreRow {
  std::string method;
  double f1_a = 0, f1_b = 0;
  double dice_a = 0, dice_b = 0;
  double haus_a = 0, haus_b = 0;
};
using ScoreTable = std::vector<ScoreRow>;

void validate_scores(const ScoreTable& scores);

// How equal scores within a column are ranked. The published challenge table
// ranks from full-precision scores, so equal rounded scores carry distinct
// consecutive ranks in listing order; kInputOrder reproduces that table from
// the rounded values. kSharedRank is classic competition ranking (1,2,2,4).
enum class TieRule { kInputOrder, kSharedRank };

/// Per-column ranks in ScoreRow field order: f1_a, f1_b, dice_a, dice_b,
/// haus_a, haus_b. Higher F1/Dice rank better, lower Hausdorff ranks better.
struct RankedRow {
  ScoreRow scores;
  std::array<int, 6> ranks{};
  int rank_sum = 0;
  double weighted_rank_sum = 0;
};
using RankedTable = std::vector<RankedRow>;

/// Competition ranking of all six score columns plus the rank sum and the
/// weighted rank sum (weight_a over part-A ranks, weight_b over part-B).
RankedTable rank_table(const ScoreTable& scores, double weight_a = 0.75, double weight_b = 0.25,
                       TieRule ties = TieRule::kInputOrder);

}  // namespace gseg
