#include "gseg/formats.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>

namespace gseg {
namespace {

using nlohmann::json;

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
  return j;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

double parse_score(const std::string& s, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ValidationError(path.string() + ": malformed score '" + s + "'");
  }
}

}  // namespace

std::vector<BoundingBox> load_boxes_json(const std::filesystem::path& path) {
  const json j = read_json_file(path);
  if (!j.is_array()) throw ValidationError(path.string() + ": expected a JSON array of boxes");
  std::vector<BoundingBox> boxes;
  boxes.reserve(j.size());
  for (const json& item : j) {
    BoundingBox b;
    try {
      b.id = item.at("id").get<std::int32_t>();
      b.x_min = item.at("x_min").get<Eigen::Index>();
      b.x_max = item.at("x_max").get<Eigen::Index>();
      b.y_min = item.at("y_min").get<Eigen::Index>();
      b.y_max = item.at("y_max").get<Eigen::Index>();
    } catch (const json::exception& e) {
      throw ValidationError(path.string() + ": " + e.what());
    }
    if (b.id <= 0) throw ValidationError(path.string() + ": box id must be positive");
    if (b.x_min > b.x_max || b.y_min > b.y_max || b.x_min < 0 || b.y_min < 0)
      throw ValidationError(path.string() + ": degenerate box extents for id " +
                            std::to_string(b.id));
    boxes.push_back(b);
  }
  return boxes;
}

void save_boxes_json(const std::filesystem::path& path, std::span<const BoundingBox> boxes) {
  json j = json::array();
  for (const BoundingBox& b : boxes)
    j.push_back({{"id", b.id},
                 {"x_min", b.x_min},
                 {"x_max", b.x_max},
                 {"y_min", b.y_min},
                 {"y_max", b.y_max}});
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << j.dump(2) << "\n";
}

ScoreTable load_scores_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path.string() + ": empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "method,f1_a,f1_b,dice_a,dice_b,haus_a,haus_b")
    throw ValidationError(path.string() + ": unexpected CSV header '" + line + "'");

  ScoreTable table;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_csv_line(line);
    if (fields.size() != 7)
      throw ValidationError(path.string() + ": expected 7 fields, got " +
                            std::to_string(fields.size()) + " in '" + line + "'");
    ScoreRow row;
    row.method = fields[0];
    row.f1_a = parse_score(fields[1], path);
    row.f1_b = parse_score(fields[2], path);
    row.dice_a = parse_score(fields[3], path);
    row.dice_b = parse_score(fields[4], path);
    row.haus_a = parse_score(fields[5], path);
    row.haus_b = parse_score(fields[6], path);
    table.push_back(std::move(row));
  }
  validate_scores(table);
  return table;
}

void save_scores_csv(const std::filesystem::path& path, const ScoreTable& scores) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "method,f1_a,f1_b,dice_a,dice_b,haus_a,haus_b\n";
  for (const ScoreRow& r : scores)
    out << r.method << ',' << r.f1_a << ',' << r.f1_b << ',' << r.dice_a << ',' << r.dice_b << ','
        << r.haus_a << ',' << r.haus_b << '\n';
}

void save_ranked_csv(const std::filesystem::path& path, const RankedTable& table) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << "method,f1_a,rank_f1_a,f1_b,rank_f1_b,dice_a,rank_dice_a,dice_b,rank_dice_b,"
         "haus_a,rank_haus_a,haus_b,rank_haus_b,rank_sum,weighted_rank_sum\n";
  for (const RankedRow& r : table) {
    const ScoreRow& s = r.scores;
    out << s.method << ',' << s.f1_a << ',' << r.ranks[0] << ',' << s.f1_b << ',' << r.ranks[1]
        << ',' << s.dice_a << ',' << r.ranks[2] << ',' << s.dice_b << ',' << r.ranks[3] << ','
        << s.haus_a << ',' << r.ranks[4] << ',' << s.haus_b << ',' << r.ranks[5] << ','
        << r.rank_sum << ',' << r.weighted_rank_sum << '\n';
  }
}

}  // namespace gseg
