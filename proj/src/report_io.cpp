#include "prosabx/report_io.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "prosabx/error.hpp"

namespace prosabx {

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

Json report_to_json(const EvaluationReport& report, const Json& run_config) {
  Json doc;
  doc["config"] = run_config;
  Json settings;
  settings["metric"] = to_string(report.settings.metric);
  settings["context"] = to_string(report.settings.context);
  settings["layer"] = report.settings.layer ? Json(*report.settings.layer) : Json(nullptr);
  settings["ordered_speaker_pairs"] = report.settings.aggregation.ordered_speaker_pairs;
  settings["directions_in_cell"] = report.settings.aggregation.directions_in_cell;
  doc["settings"] = settings;
  doc["score"] = report.score;
  doc["error_rate"] = report.error_rate;
  doc["triplets"] = report.triplets;
  doc["contrasts"] = Json::array();
  for (const auto& c : report.contrasts) {
    Json e;
    e["contrast_id"] = c.contrast_id;
    e["score"] = c.score;
    e["error_rate"] = 1.0 - c.score;
    e["cells"] = c.cells;
    e["count"] = c.count;
    doc["contrasts"].push_back(std::move(e));
  }
  doc["pairs"] = Json::array();
  for (const auto& p : report.pairs) {
    Json e;
    e["contrast_id"] = p.contrast_id;
    e["speaker_a"] = p.speaker_ab;
    e["speaker_x"] = p.speaker_x;
    e["score"] = p.score;
    e["cells"] = p.cells;
    e["count"] = p.count;
    doc["pairs"].push_back(std::move(e));
  }
  doc["cells"] = Json::array();
  for (const auto& c : report.cells) {
    Json e;
    e["contrast_id"] = c.contrast_id;
    e["speaker_a"] = c.speaker_ab;
    e["speaker_x"] = c.speaker_x;
    e["category_a"] = c.category_a;
    e["score"] = c.score;
    e["count"] = c.count;
    doc["cells"].push_back(std::move(e));
  }
  return doc;
}

EvaluationReport report_from_json(const Json& doc) {
  try {
    EvaluationReport r;
    r.score = doc.at("score").get<double>();
    r.error_rate = doc.at("error_rate").get<double>();
    r.triplets = doc.at("triplets").get<std::size_t>();
    if (doc.contains("settings")) {
      const auto& s = doc["settings"];
      if (auto m = parse_metric(s.value("metric", "angular"))) r.settings.metric = *m;
      if (auto c = parse_context(s.value("context", "out_of_context"))) r.settings.context = *c;
      if (s.contains("layer") && !s["layer"].is_null()) r.settings.layer = s["layer"].get<int>();
      r.settings.aggregation.ordered_speaker_pairs = s.value("ordered_speaker_pairs", true);
      r.settings.aggregation.directions_in_cell = s.value("directions_in_cell", false);
    }
    for (const auto& e : doc.at("contrasts"))
      r.contrasts.push_back({e.at("contrast_id").get<std::string>(), e.at("score").get<double>(),
                             e.at("cells").get<std::size_t>(), e.at("count").get<std::size_t>()});
    if (doc.contains("pairs"))
      for (const auto& e : doc["pairs"])
        r.pairs.push_back({e.at("contrast_id").get<std::string>(),
                           e.at("speaker_a").get<std::string>(),
                           e.at("speaker_x").get<std::string>(), e.at("score").get<double>(),
                           e.at("cells").get<std::size_t>(), e.at("count").get<std::size_t>()});
    if (doc.contains("cells"))
      for (const auto& e : doc["cells"])
        r.cells.push_back({e.at("contrast_id").get<std::string>(),
                           e.at("speaker_a").get<std::string>(),
                           e.at("speaker_x").get<std::string>(),
                           e.at("category_a").get<std::string>(), e.at("score").get<double>(),
                           e.at("count").get<std::size_t>()});
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw Error(std::string("malformed report JSON: ") + e.what());
  }
}

std::string report_to_csv(const EvaluationReport& report) {
  std::string out = "level,contrast_id,speaker_a,speaker_x,score,count\n";
  for (const auto& p : report.pairs)
    out += "pair," + p.contrast_id + "," + p.speaker_ab + "," + p.speaker_x + "," +
           format_number(p.score) + "," + std::to_string(p.count) + "\n";
  for (const auto& c : report.contrasts)
    out += "contrast," + c.contrast_id + ",,," + format_number(c.score) + "," +
           std::to_string(c.count) + "\n";
  out += "overall,,,," + format_number(report.score) + "," + std::to_string(report.triplets) +
         "\n";
  return out;
}

void write_text_file(const std::string& path, const std::string& text) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  out << text;
  if (!out) throw Error("write failed for '" + path + "'");
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace prosabx
