#pragma once

#include "gseg/ranking.hpp"
#include "gseg/types.hpp"

#include <filesystem>
#include <span>

namespace gseg {

// Bounding boxes: JSON array of {"id","x_min","x_max","y_min","y_max"}.
std::vector<BoundingBox> load_boxes_json(const std::filesystem::path& path);
void save_boxes_json(const std::filesystem::path& path, std::span<const BoundingBox> boxes);

// Score table: CSV with header method,f1_a,f1_b,dice_a,dice_b,haus_a,haus_b.
ScoreTable load_scores_csv(const std::filesystem::path& path);
void save_scores_csv(const std::filesystem::path& path, const ScoreTable& scores);

// Ranked table: scores interleaved with per-column ranks, then rank_sum and
// weighted_rank_sum.
void save_ranked_csv(const std::filesystem::path& path, const RankedTable& table);

}  // namespace gseg
