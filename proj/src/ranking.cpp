#include "gseg/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace gseg {
namespace {

double column_value(const ScoreRow& row, int column) {
  switch (column) {
    case 0: return row.f1_a;
    case 1: return row.f1_b;
    case 2: return row.dice_a;
    case 3: return row.dice_b;
    case 4: return row.haus_a;
    default: return row.haus_b;
  }
}

}  // namespace

void validate_scores(const ScoreTable& scores) {
  for (const ScoreRow& row : scores) {
    for (int c = 0; c < 6; ++c)
      if (!std::isfinite(column_value(row, c)))
        throw ValidationError("score table: non-finite score for method '" + row.method + "'");
    for (double v : {row.f1_a, row.f1_b, row.dice_a, row.dice_b})
      if (v < 0.0 || v > 1.0)
        throw ValidationError("score table: F1/Dice outside [0,1] for method '" + row.method + "'");
    if (row.haus_a < 0.0 || row.haus_b < 0.0)
      throw ValidationError("score table: negative Hausdorff for method '" + row.method + "'");
  }
}

RankedTable rank_table(const ScoreTable& scores, double weight_a, double weight_b, TieRule ties) {
  if (scores.empty()) throw ValidationError("rank_table: score table is empty");
  validate_scores(scores);

  const std::size_t n = scores.size();
  RankedTable out(n);
  for (std::size_t i = 0; i < n; ++i) out[i].scores = scores[i];

  for (int c = 0; c < 6; ++c) {
    const bool lower_is_better = c >= 4;  // Hausdorff columns
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      const double va = column_value(scores[a], c), vb = column_value(scores[b], c);
      return lower_is_better ? va < vb : va > vb;
    });
    for (std::size_t pos = 0; pos < n; ++pos) {
      int rank = static_cast<int>(pos) + 1;
      if (ties == TieRule::kSharedRank && pos > 0 &&
          column_value(scores[order[pos]], c) == column_value(scores[order[pos - 1]], c))
        rank = out[order[pos - 1]].ranks[c];
      out[order[pos]].ranks[c] = rank;
    }
  }

  for (RankedRow& row : out) {
    row.rank_sum = std::accumulate(row.ranks.begin(), row.ranks.end(), 0);
    const int part_a = row.ranks[0] + row.ranks[2] + row.ranks[4];
    const int part_b = row.ranks[1] + row.ranks[3] + row.ranks[5];
    row.weighted_rank_sum = weight_a * part_a + weight_b * part_b;
  }
  return out;
}

}  // namespace gseg
