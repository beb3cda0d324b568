#pragma once

#include <string>

#include <json.hpp>

#include "prosabx/abx.hpp"

namespace prosabx {

using Json = nlohmann::ordered_json;

// Shortest round-trip decimal form.
std::string format_number(double v);

// Full nested report. `run_config` is embedded verbatim under "config".
Json report_to_json(const EvaluationReport& report, const Json& run_config = Json::object());
EvaluationReport report_from_json(const Json& doc);

// Flat CSV: level,contrast_id,speaker_a,speaker_x,score,count with one
// "pair" row per speaker pair, one "contrast" row per contrast and a final
// "overall" row.
std::string report_to_csv(const EvaluationReport& report);

// Writes text to a file, creating parent directories.
void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace prosabx
