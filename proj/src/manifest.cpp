#include "prosabx/manifest.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "prosabx/error.hpp"

namespace prosabx {

namespace {

const std::vector<std::string> kColumns = {"item_id",  "contrast_id", "category",
                                           "speaker_id", "phonemic_seq", "audio_path",
                                           "start_s",  "end_s",       "take"};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Splits one CSV record. Supports double-quoted fields with "" escapes.
std::vector<std::string> split_csv_row(std::string_view row, std::size_t line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  bool was_quoted = false;
  for (std::size_t i = 0; i < row.size(); ++i) {
    char c = row[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < row.size() && row[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"' && field.empty() && !was_quoted) {
      quoted = true;
      was_quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
      was_quoted = false;
    } else {
      field.push_back(c);
    }
  }
  if (quoted) throw ParseError(line, "unterminated quoted field");
  fields.push_back(std::move(field));
  return fields;
}

std::optional<double> parse_optional_seconds(const std::string& s, std::size_t line,
                                             const char* column) {
  if (s.empty()) return std::nullopt;
  double v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || !std::isfinite(v))
    throw ParseError(line, std::string("invalid ") + column + " '" + s + "'");
  return v;
}

int parse_take(const std::string& s, std::size_t line) {
  if (s.empty()) return 0;
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || v < 0)
    throw ParseError(line, "invalid take '" + s + "'");
  return v;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  out += '"';
  return out;
}

std::string format_seconds(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

// speaker -> category -> item indices sorted by take
using CellMap = std::map<std::string, std::map<std::string, std::vector<std::size_t>>>;

std::map<std::string, CellMap> group_by_contrast(const Dataset& dataset) {
  std::map<std::string, CellMap> groups;
  for (const auto& c : dataset.contrasts()) groups[c.contrast_id];
  for (std::size_t i = 0; i < dataset.items().size(); ++i) {
    const Item& it = dataset.items()[i];
    groups[it.contrast_id][it.speaker_id][it.category].push_back(i);
  }
  for (auto& [cid, speakers] : groups)
    for (auto& [spk, cats] : speakers)
      for (auto& [cat, idx] : cats)
        std::sort(idx.begin(), idx.end(), [&](std::size_t l, std::size_t r) {
          return dataset.items()[l].take < dataset.items()[r].take;
        });
  return groups;
}

const std::vector<std::size_t>& cell(const CellMap& m, const std::string& speaker,
                                     const std::string& category) {
  static const std::vector<std::size_t> empty;
  auto s = m.find(speaker);
  if (s == m.end()) return empty;
  auto c = s->second.find(category);
  return c == s->second.end() ? empty : c->second;
}

template <typename Visit>
void for_each_triplet(const Contrast& contrast, const CellMap& cells, Visit&& visit) {
  for (const auto& [s_ab, cats_ab] : cells) {
    for (const auto& [s_x, cats_x] : cells) {
      if (s_x == s_ab) continue;
      for (int dir = 0; dir < 2; ++dir) {
        const std::string& cat_a = dir == 0 ? contrast.category_a : contrast.category_b;
        const std::string& cat_b = dir == 0 ? contrast.category_b : contrast.category_a;
        const auto& as = cell(cells, s_ab, cat_a);
        const auto& bs = cell(cells, s_ab, cat_b);
        const auto& xs = cell(cells, s_x, cat_a);
        for (std::size_t a : as)
          for (std::size_t b : bs)
            for (std::size_t x : xs) visit(Triplet{a, b, x});
      }
    }
  }
}

}  // namespace

Dataset::Dataset(std::vector<Item> items, std::vector<Contrast> contrasts, DatasetMeta meta)
    : Dataset(std::move(items), std::move(contrasts), std::move(meta), {}) {}

Dataset::Dataset(std::vector<Item> items, std::vector<Contrast> contrasts, DatasetMeta meta,
                 const std::vector<std::size_t>& source_lines)
    : items_(std::move(items)), contrasts_(std::move(contrasts)), meta_(std::move(meta)) {
  for (std::size_t i = 0; i < contrasts_.size(); ++i) {
    const Contrast& c = contrasts_[i];
    if (c.category_a == c.category_b)
      throw ParseError(0, "contrast '" + c.contrast_id + "' has identical categories");
    if (!contrast_index_.emplace(c.contrast_id, i).second)
      throw ParseError(0, "duplicate contrast '" + c.contrast_id + "'");
  }
  std::set<std::tuple<std::string, std::string, std::string, int>> identities;
  for (std::size_t i = 0; i < items_.size(); ++i) {
    const Item& it = items_[i];
    const std::size_t line = i < source_lines.size() ? source_lines[i] : 0;
    if (it.item_id.empty()) throw ParseError(line, "empty item_id");
    if (!item_index_.emplace(it.item_id, i).second)
      throw ParseError(line, "duplicate item_id '" + it.item_id + "'");
    const Contrast* c = find_contrast(it.contrast_id);
    if (!c)
      throw ParseError(line, "item '" + it.item_id + "' references unknown contrast '" +
                                 it.contrast_id + "'");
    if (it.category != c->category_a && it.category != c->category_b)
      throw ParseError(line, "item '" + it.item_id + "' has category '" + it.category +
                                 "' not in contrast '" + c->contrast_id + "' {" +
                                 c->category_a + ", " + c->category_b + "}");
    if (it.phonemic_seq != c->phonemic_seq)
      throw ParseError(line, "item '" + it.item_id + "' phonemic_seq '" + it.phonemic_seq +
                                 "' differs from contrast '" + c->phonemic_seq + "'");
    if (it.start_s.has_value() != it.end_s.has_value())
      throw ParseError(line, "item '" + it.item_id + "' has only one of start_s/end_s");
    if (it.start_s && !(*it.start_s >= 0.0 && *it.start_s < *it.end_s))
      throw ParseError(line, "item '" + it.item_id + "' requires 0 <= start_s < end_s");
    if (!identities.emplace(it.contrast_id, it.category, it.speaker_id, it.take).second)
      throw ParseError(line, "duplicate (contrast, category, speaker, take) for item '" +
                                 it.item_id + "'");
  }
}

std::optional<std::size_t> Dataset::find_item(std::string_view item_id) const {
  auto it = item_index_.find(item_id);
  if (it == item_index_.end()) return std::nullopt;
  return it->second;
}

const Contrast* Dataset::find_contrast(std::string_view contrast_id) const {
  auto it = contrast_index_.find(contrast_id);
  return it == contrast_index_.end() ? nullptr : &contrasts_[it->second];
}

std::vector<Contrast> parse_contrasts(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("contrast sidecar: ") + e.what());
  }
  if (!doc.is_array()) throw ParseError(0, "contrast sidecar must be a JSON array");
  std::vector<Contrast> out;
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const auto& e = doc[i];
    try {
      const auto& cats = e.at("categories");
      if (!cats.is_array() || cats.size() != 2)
        throw ParseError(0, "contrast entry " + std::to_string(i) +
                                " must list exactly two categories");
      Contrast c;
      c.contrast_id = e.at("contrast_id").get<std::string>();
      c.phonemic_seq = e.at("phonemic_seq").get<std::string>();
      c.category_a = cats[0].get<std::string>();
      c.category_b = cats[1].get<std::string>();
      c.language = e.value("language", std::string{});
      out.push_back(std::move(c));
    } catch (const nlohmann::json::exception& ex) {
      throw ParseError(0, "contrast entry " + std::to_string(i) + ": " + ex.what());
    }
  }
  return out;
}

Dataset parse_manifest(std::string_view csv_text, std::vector<Contrast> contrasts,
                       DatasetMeta meta) {
  std::vector<Item> items;
  std::vector<std::size_t> lines;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::size_t pos = 0;
  while (pos <= csv_text.size()) {
    std::size_t nl = csv_text.find('\n', pos);
    std::string_view line =
        csv_text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? csv_text.size() + 1 : nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    auto fields = split_csv_row(line, line_no);
    if (!header_seen) {
      if (line_no == 1 && line.size() >= 3 && line.substr(0, 3) == "\xEF\xBB\xBF") {
        fields = split_csv_row(line.substr(3), line_no);
      }
      if (fields != kColumns) {
        std::string expected;
        for (const auto& c : kColumns) expected += (expected.empty() ? "" : ",") + c;
        throw ParseError(line_no, "manifest header must be '" + expected + "'");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != kColumns.size())
      throw ParseError(line_no, "expected " + std::to_string(kColumns.size()) + " fields, got " +
                                    std::to_string(fields.size()));
    Item it;
    it.item_id = fields[0];
    it.contrast_id = fields[1];
    it.category = fields[2];
    it.speaker_id = fields[3];
    it.phonemic_seq = fields[4];
    it.audio_path = fields[5];
    it.start_s = parse_optional_seconds(fields[6], line_no, "start_s");
    it.end_s = parse_optional_seconds(fields[7], line_no, "end_s");
    it.take = parse_take(fields[8], line_no);
    items.push_back(std::move(it));
    lines.push_back(line_no);
  }
  if (!header_seen) throw ParseError(1, "manifest is empty");
  return Dataset(std::move(items), std::move(contrasts), std::move(meta), lines);
}

std::string default_contrasts_path(const std::string& manifest_path) {
  std::filesystem::path p(manifest_path);
  if (p.extension() == ".csv") p.replace_extension();
  return p.string() + ".contrasts.json";
}

Dataset load_dataset(const std::string& manifest_path, const std::string& contrasts_path) {
  const std::string sidecar =
      contrasts_path.empty() ? default_contrasts_path(manifest_path) : contrasts_path;
  auto contrasts = parse_contrasts(read_file(sidecar));
  DatasetMeta meta;
  meta.name = std::filesystem::path(manifest_path).stem().string();
  if (!contrasts.empty()) meta.language = contrasts.front().language;
  meta.source = manifest_path;
  return parse_manifest(read_file(manifest_path), std::move(contrasts), std::move(meta));
}

std::string write_manifest_csv(const Dataset& dataset) {
  std::string out;
  for (std::size_t i = 0; i < kColumns.size(); ++i) out += (i ? "," : "") + kColumns[i];
  out += '\n';
  for (const Item& it : dataset.items()) {
    out += csv_field(it.item_id) + ',' + csv_field(it.contrast_id) + ',' +
           csv_field(it.category) + ',' + csv_field(it.speaker_id) + ',' +
           csv_field(it.phonemic_seq) + ',' + csv_field(it.audio_path) + ',' +
           (it.start_s ? format_seconds(*it.start_s) : "") + ',' +
           (it.end_s ? format_seconds(*it.end_s) : "") + ',' + std::to_string(it.take) + '\n';
  }
  return out;
}

std::string write_contrasts_json(const std::vector<Contrast>& contrasts) {
  nlohmann::ordered_json doc = nlohmann::ordered_json::array();
  for (const auto& c : contrasts) {
    nlohmann::ordered_json e;
    e["contrast_id"] = c.contrast_id;
    e["phonemic_seq"] = c.phonemic_seq;
    e["categories"] = {c.category_a, c.category_b};
    e["language"] = c.language;
    doc.push_back(std::move(e));
  }
  return doc.dump(1) + "\n";
}

ValidationReport validate_speaker_coverage(const Dataset& dataset, std::size_t min_speakers) {
  ValidationReport report;
  report.min_speakers = min_speakers;
  auto groups = group_by_contrast(dataset);
  for (const auto& [cid, cells] : groups) {
    const Contrast& c = *dataset.find_contrast(cid);
    for (const std::string* cat : {&c.category_a, &c.category_b}) {
      std::size_t n = 0;
      for (const auto& [spk, cats] : cells)
        if (cats.count(*cat)) ++n;
      if (n < min_speakers)
        report.issues.push_back({CoverageIssue::Kind::too_few_speakers, cid, *cat, n});
    }
    std::size_t count = 0;
    for_each_triplet(c, cells, [&](const Triplet&) { ++count; });
    if (count == 0) report.issues.push_back({CoverageIssue::Kind::zero_triplets, cid, {}, 0});
  }
  return report;
}

std::vector<Triplet> enumerate_triplets(const Dataset& dataset) {
  std::vector<Triplet> out;
  auto groups = group_by_contrast(dataset);
  for (const auto& [cid, cells] : groups)
    for_each_triplet(*dataset.find_contrast(cid), cells,
                     [&](const Triplet& t) { out.push_back(t); });
  return out;
}

std::size_t count_triplets(const Dataset& dataset, std::string_view contrast_id) {
  const Contrast* c = dataset.find_contrast(contrast_id);
  if (!c) return 0;
  auto groups = group_by_contrast(dataset);
  std::size_t n = 0;
  for_each_triplet(*c, groups[c->contrast_id], [&](const Triplet&) { ++n; });
  return n;
}

}  // namespace prosabx
