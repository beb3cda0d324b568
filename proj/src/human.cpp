#include "prosabx/human.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "prosabx/error.hpp"

namespace prosabx {

std::vector<HumanResponse> parse_responses(std::string_view jsonl) {
  std::vector<HumanResponse> out;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos < jsonl.size()) {
    std::size_t nl = jsonl.find('\n', pos);
    std::string_view line = jsonl.substr(pos, nl == std::string_view::npos ? jsonl.npos : nl - pos);
    pos = nl == std::string_view::npos ? jsonl.size() : nl + 1;
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      const auto doc = nlohmann::json::parse(line);
      HumanResponse r;
      r.participant_id = doc.at("participant_id").get<std::string>();
      const auto& t = doc.at("triplet");
      r.a = t.at("a").get<std::string>();
      r.b = t.at("b").get<std::string>();
      r.x = t.at("x").get<std::string>();
      const auto order = doc.at("presented_order").get<std::string>();
      if (order != "AB" && order != "BA")
        throw ParseError(line_no, "presented_order must be \"AB\" or \"BA\"");
      r.a_first = order == "AB";
      const auto choice = doc.at("choice").get<std::string>();
      if (choice != "A" && choice != "B") throw ParseError(line_no, "choice must be \"A\" or \"B\"");
      r.choice = choice[0];
      r.is_catch = doc.at("is_catch").get<bool>();
      r.response_ms = doc.value("response_ms", 0.0);
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, e.what());
    }
  }
  return out;
}

std::string write_responses(const std::vector<HumanResponse>& responses) {
  std::string out;
  for (const auto& r : responses) {
    nlohmann::ordered_json doc;
    doc["participant_id"] = r.participant_id;
    doc["triplet"] = {{"a", r.a}, {"b", r.b}, {"x", r.x}};
    doc["presented_order"] = r.a_first ? "AB" : "BA";
    doc["choice"] = std::string(1, r.choice);
    doc["is_catch"] = r.is_catch;
    doc["response_ms"] = r.response_ms;
    out += doc.dump() + "\n";
  }
  return out;
}

HumanReport human_error(const std::vector<HumanResponse>& responses, const Dataset& dataset,
                        const HumanConfig& config) {
  HumanReport out;
  out.responses = responses.size();
  std::map<std::string, ParticipantSummary> participants;

  struct Resolved {
    Triplet triplet;
    bool correct;
  };
  std::vector<std::pair<std::string, Resolved>> scored;

  for (const HumanResponse& r : responses) {
    auto find = [&](const std::string& id) {
      auto idx = dataset.find_item(id);
      if (!idx) throw Error("response references unknown item '" + id + "'");
      return *idx;
    };
    const std::size_t a = find(r.a), b = find(r.b), x = find(r.x);
    // Slot holding the item that matches X.
    bool target_is_a = true;
    if (r.is_catch) {
      const auto& ia = dataset.item(a);
      const auto& ib = dataset.item(b);
      const auto& ix = dataset.item(x);
      if (x == a || ia.audio_path == ix.audio_path) target_is_a = true;
      else if (x == b || ib.audio_path == ix.audio_path) target_is_a = false;
      else
        throw Error("catch trial X '" + r.x + "' matches neither A nor B");
    }
    const char target_slot = (target_is_a == r.a_first) ? 'A' : 'B';
    const bool correct = r.choice == target_slot;

    auto& p = participants[r.participant_id];
    p.participant_id = r.participant_id;
    ++p.trials;
    if (r.is_catch) {
      ++out.catch_responses;
      ++p.catch_trials;
      if (!correct) ++p.catch_errors;
      continue;
    }
    const Item& ia = dataset.item(a);
    const Item& ib = dataset.item(b);
    const Item& ix = dataset.item(x);
    const bool valid = ia.contrast_id == ib.contrast_id && ia.contrast_id == ix.contrast_id &&
                       ia.speaker_id == ib.speaker_id && ia.category != ib.category &&
                       ix.category == ia.category && ix.speaker_id != ia.speaker_id;
    if (!valid)
      throw Error("response references unknown triplet (" + r.a + ", " + r.b + ", " + r.x + ")");
    scored.push_back({r.participant_id, {Triplet{a, b, x}, correct}});
  }

  for (auto& [id, p] : participants) {
    if (p.catch_trials > 0) {
      p.catch_error_rate =
          static_cast<double>(p.catch_errors) / static_cast<double>(p.catch_trials);
      p.flagged = *p.catch_error_rate > config.catch_error_threshold;
    }
    out.participants.push_back(p);
  }

  std::vector<TripletScore> scores;
  for (const auto& [pid, res] : scored) {
    if (config.exclude_flagged && participants[pid].flagged) continue;
    TripletScore s;
    s.triplet = res.triplet;
    s.score = res.correct ? 1.0 : 0.0;
    scores.push_back(s);
  }
  out.report = aggregate(scores, dataset, config.aggregation);
  return out;
}

WordLevelComparison compare_word_level(const EvaluationReport& human,
                                       const EvaluationReport& model) {
  WordLevelComparison out;
  for (const auto& h : human.contrasts) {
    if (const ContrastScore* m = model.find_contrast(h.contrast_id)) {
      out.contrast_ids.push_back(h.contrast_id);
      out.human_error.push_back(1.0 - h.score);
      out.model_error.push_back(1.0 - m->score);
    }
  }
  try {
    out.pearson = stats::pearson(out.human_error, out.model_error);
  } catch (const Error& e) {
    out.skipped = e.what();
  }
  return out;
}

}  // namespace prosabx
