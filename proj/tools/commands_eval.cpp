#include "commands.hpp"

#include "gseg/formats.hpp"
#include "gseg/metrics.hpp"
#include "gseg/parallel.hpp"
#include "gseg/png_io.hpp"
#include "gseg/version.hpp"

#include <cmath>
#include <iostream>

namespace gseg::cli {
namespace {

namespace fs = std::filesystem;

struct ImageRow {
  std::string name;
  Eigen::Index gt_objects = 0, pred_objects = 0;
  metrics::DetectionScore detection;
  std::optional<double> object_dice, object_hausdorff, recognition_cost;
  double pixel_error = 0;
};

json to_json(const ImageRow& row) {
  const auto opt = [](const std::optional<double>& v) {
    return v ? json(*v) : json(nullptr);
  };
  return {{"name", row.name},
          {"gt_objects", row.gt_objects},
          {"pred_objects", row.pred_objects},
          {"tp", row.detection.matches.tp},
          {"fp", row.detection.matches.fp},
          {"fn", row.detection.matches.fn},
          {"precision", row.detection.precision},
          {"recall", row.detection.recall},
          {"f1", row.detection.f1},
          {"object_dice", opt(row.object_dice)},
          {"object_hausdorff", opt(row.object_hausdorff)},
          {"instance_recognition_cost", opt(row.recognition_cost)},
          {"pixel_error", row.pixel_error}};
}

struct EvaluateOpts {
  std::string gt_dir, pred_dir, out_path, config_path;
  double iou_threshold = 0.5;
  std::string rule = "gt-area";
};

void run_evaluate(const EvaluateOpts& opts, const CLI::App& cmd, const GlobalOpts& global) {
  EvaluateOpts o = opts;
  if (!o.config_path.empty()) {
    const json cfg = load_json_file(o.config_path);
    config_default(cmd, cfg, "--iou-threshold", "iou_threshold", o.iou_threshold);
    config_default(cmd, cfg, "--rule", "rule", o.rule);
  }
  MetricConfig mc;
  mc.iou_threshold = o.iou_threshold;
  if (o.rule == "gt-area") mc.detection_rule = DetectionRule::kIntersectionOverGt;
  else if (o.rule == "iou") mc.detection_rule = DetectionRule::kIou;
  else throw ValidationError("evaluate: --rule must be gt-area or iou");
  validate_metric_config(mc);

  std::vector<fs::path> pred_files;
  if (!fs::is_directory(o.pred_dir)) throw IoError(o.pred_dir + " is not a directory");
  for (const fs::directory_entry& e : fs::directory_iterator(o.pred_dir))
    if (e.is_regular_file() && e.path().extension() == ".png") pred_files.push_back(e.path());
  std::sort(pred_files.begin(), pred_files.end());
  if (pred_files.empty()) throw ValidationError("evaluate: no .png predictions in " + o.pred_dir);

  std::vector<ImageRow> rows(pred_files.size());
  parallel_for(pred_files.size(), global.jobs, [&](std::size_t i) {
    const fs::path gt_path = fs::path(o.gt_dir) / pred_files[i].filename();
    if (!fs::exists(gt_path))
      throw IoError("evaluate: missing ground truth " + gt_path.string());
    const InstanceMap gt = load_instance_png(gt_path);
    const InstanceMap pred = load_instance_png(pred_files[i]);

    ImageRow& row = rows[i];
    row.name = pred_files[i].filename().string();
    row.gt_objects = instance_count(gt);
    row.pred_objects = instance_count(pred);
    row.detection = metrics::detection_f1(gt, pred, mc);
    if (row.gt_objects > 0 || row.pred_objects > 0)
      row.object_dice = metrics::object_dice(gt, pred);
    if (row.gt_objects > 0 && row.pred_objects > 0)
      row.object_hausdorff = metrics::object_hausdorff(gt, pred);
    if (row.gt_objects > 0)
      row.recognition_cost = metrics::instance_recognition_cost(gt, pred, mc);
    row.pixel_error = metrics::pixel_error((gt != 0).cast<std::uint8_t>(),
                                           (pred != 0).cast<std::uint8_t>());
  });

  // Challenge-style aggregation: detection counts pool over the whole split,
  // object scores average per image with equal weight.
  long tp = 0, fp = 0, fn = 0;
  double dice_sum = 0, haus_sum = 0, err_sum = 0, cost_sum = 0;
  long dice_n = 0, haus_n = 0, cost_n = 0;
  for (const ImageRow& row : rows) {
    tp += row.detection.matches.tp;
    fp += row.detection.matches.fp;
    fn += row.detection.matches.fn;
    err_sum += row.pixel_error;
    if (row.object_dice) { dice_sum += *row.object_dice; ++dice_n; }
    if (row.object_hausdorff) { haus_sum += *row.object_hausdorff; ++haus_n; }
    if (row.recognition_cost) { cost_sum += *row.recognition_cost; ++cost_n; }
  }
  const double precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
  const double recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
  const double f1 = precision + recall > 0 ? 2 * precision * recall / (precision + recall) : 0.0;

  json images = json::array();
  for (const ImageRow& row : rows) images.push_back(to_json(row));
  const json report = {
      {"tool", "gseg"},
      {"version", kVersion},
      {"config", {{"iou_threshold", mc.iou_threshold}, {"rule", o.rule}}},
      {"images", images},
      {"aggregate",
       {{"images", rows.size()},
        {"tp", tp},
        {"fp", fp},
        {"fn", fn},
        {"precision", precision},
        {"recall", recall},
        {"f1", f1},
        {"object_dice", dice_n ? json(dice_sum / dice_n) : json(nullptr)},
        {"object_hausdorff", haus_n ? json(haus_sum / haus_n) : json(nullptr)},
        {"instance_recognition_cost", cost_n ? json(cost_sum / cost_n) : json(nullptr)},
        {"pixel_error", err_sum / double(rows.size())}}}};

  const fs::path out_path = o.out_path;
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  write_json_atomic(out_path, report);

  RunManifest manifest("evaluate",
                       {{"gt", o.gt_dir},
                        {"pred", o.pred_dir},
                        {"iou_threshold", mc.iou_threshold},
                        {"rule", o.rule}},
                       0);
  manifest.add_input(o.gt_dir);
  manifest.add_input(o.pred_dir);
  manifest.add_output(out_path);
  manifest.write(out_path.has_parent_path() ? out_path.parent_path() : fs::current_path());
  if (global.verbose)
    std::cerr << "evaluate: " << rows.size() << " images, F1=" << f1 << "\n";
}

struct RankOpts {
  std::string scores_path, out_path, config_path;
  double weight_a = 0.75, weight_b = 0.25;
  std::string ties = "input-order";
};

void run_rank(const RankOpts& opts, const CLI::App& cmd, const GlobalOpts& global) {
  RankOpts o = opts;
  if (!o.config_path.empty()) {
    const json cfg = load_json_file(o.config_path);
    config_default(cmd, cfg, "--weight-a", "weight_a", o.weight_a);
    config_default(cmd, cfg, "--weight-b", "weight_b", o.weight_b);
    config_default(cmd, cfg, "--ties", "ties", o.ties);
  }
  TieRule ties;
  if (o.ties == "input-order") ties = TieRule::kInputOrder;
  else if (o.ties == "shared") ties = TieRule::kSharedRank;
  else throw ValidationError("rank: --ties must be input-order or shared");

  const ScoreTable scores = load_scores_csv(o.scores_path);
  const RankedTable ranked = rank_table(scores, o.weight_a, o.weight_b, ties);
  const fs::path out_path = o.out_path;
  if (out_path.has_parent_path()) fs::create_directories(out_path.parent_path());
  save_ranked_csv(out_path, ranked);

  RunManifest manifest("rank",
                       {{"scores", o.scores_path},
                        {"weight_a", o.weight_a},
                        {"weight_b", o.weight_b},
                        {"ties", o.ties}},
                       0);
  manifest.add_input(o.scores_path);
  manifest.add_output(out_path);
  manifest.write(out_path.has_parent_path() ? out_path.parent_path() : fs::current_path());
  if (global.verbose) std::cerr << "rank: " << ranked.size() << " methods ranked\n";
}

}  // namespace

void register_evaluate(CLI::App& app, const GlobalOpts& global) {
  auto opts = std::make_shared<EvaluateOpts>();
  CLI::App* cmd = app.add_subcommand(
      "evaluate", "Score predicted instance maps against ground truth");
  cmd->add_option("--gt", opts->gt_dir, "Directory of ground-truth instance PNGs")->required();
  cmd->add_option("--pred", opts->pred_dir, "Directory of predicted instance PNGs")->required();
  cmd->add_option("--out", opts->out_path, "Report JSON path")->required();
  cmd->add_option("--iou-threshold", opts->iou_threshold, "Match threshold");
  cmd->add_option("--rule", opts->rule, "Detection match rule: gt-area or iou");
  cmd->add_option("--config", opts->config_path, "JSON config (flags win)");
  cmd->callback([opts, cmd, &global] { run_evaluate(*opts, *cmd, global); });
}

void register_rank(CLI::App& app, const GlobalOpts& global) {
  auto opts = std::make_shared<RankOpts>();
  CLI::App* cmd = app.add_subcommand("rank", "Rank a score table and emit rank sums");
  cmd->add_option("--scores", opts->scores_path, "Input scores CSV")->required();
  cmd->add_option("--out", opts->out_path, "Output ranked CSV")->required();
  cmd->add_option("--weight-a", opts->weight_a, "Part A weight in the weighted rank sum");
  cmd->add_option("--weight-b", opts->weight_b, "Part B weight in the weighted rank sum");
  cmd->add_option("--ties", opts->ties, "Tie handling: input-order or shared");
  cmd->add_option("--config", opts->config_path, "JSON config (flags win)");
  cmd->callback([opts, cmd, &global] { run_rank(*opts, *cmd, global); });
}

}  // namespace gseg::cli
