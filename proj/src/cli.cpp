#include "prosabx/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <set>
#include <thread>

#include <CLI11.hpp>

#include "prosabx/abx.hpp"
#include "prosabx/curves.hpp"
#include "prosabx/dsp.hpp"
#include "prosabx/error.hpp"
#include "prosabx/human.hpp"
#include "prosabx/manifest.hpp"
#include "prosabx/parallel.hpp"
#include "prosabx/report_io.hpp"
#include "prosabx/stats.hpp"
#include "prosabx/svg.hpp"

namespace prosabx::cli {

namespace fs = std::filesystem;

namespace {

// Speaker pairs are ordered by default: (speaker of A/B, speaker of X).
constexpr bool kDefaultOrderedSpeakerPairs = true;

class UsageError : public Error {
 public:
  using Error::Error;
};

struct IO {
  std::ostream& out;
  std::ostream& err;
};

unsigned resolve_workers(int flag) {
  if (flag > 0) return static_cast<unsigned>(flag);
  if (flag == 0 || flag < -1) throw UsageError("--workers must be >= 1");
  if (const char* env = std::getenv("PROSABX_WORKERS")) {
    try {
      const int v = std::stoi(env);
      if (v >= 1) return static_cast<unsigned>(v);
    } catch (const std::exception&) {
    }
    throw UsageError(std::string("PROSABX_WORKERS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

Metric metric_or_throw(const std::string& name) {
  auto m = parse_metric(name);
  if (!m) throw UsageError("unknown metric '" + name + "'");
  return *m;
}

ContextMode context_or_throw(const std::string& name) {
  auto c = parse_context(name);
  if (!c) throw UsageError("unknown context mode '" + name + "'");
  return *c;
}

void require_file(const std::string& path, const char* what) {
  if (!fs::exists(path)) throw Error(std::string(what) + " '" + path + "' does not exist");
}

Dataset load(const std::string& manifest, const std::string& contrasts) {
  require_file(manifest, "manifest");
  return load_dataset(manifest, contrasts);
}

void emit(IO& io, const Json& summary) { io.out << summary.dump() << "\n"; }

FrameSpec resolve_frame_spec(const std::string& root, double stride, double offset,
                             std::string* model_id) {
  if (stride > 0) return {stride, offset >= 0 ? offset : stride / 2};
  if (auto idx = read_layer_index(root)) {
    if (model_id && model_id->empty()) *model_id = idx->model_id;
    FrameSpec spec = idx->frame_spec;
    if (offset >= 0) spec.offset_s = offset;
    return spec;
  }
  FrameSpec spec = FrameSpec::with_default_offset(0.02);
  if (offset >= 0) spec.offset_s = offset;
  return spec;
}

Json frame_spec_json(const FrameSpec& s) {
  Json j;
  j["stride_s"] = s.stride_s;
  j["offset_s"] = s.offset_s;
  return j;
}

// ---------------------------------------------------------------- validate

struct ValidateOptions {
  std::string manifest, contrasts, features, layers, out;
  std::size_t min_speakers = 2;
};

int cmd_validate(const ValidateOptions& o, IO& io) {
  const Dataset ds = load(o.manifest, o.contrasts);
  const auto report = validate_speaker_coverage(ds, o.min_speakers);
  const auto triplets = enumerate_triplets(ds);

  Json issues = Json::array();
  for (const auto& is : report.issues) {
    Json j;
    j["contrast_id"] = is.contrast_id;
    if (is.kind == CoverageIssue::Kind::too_few_speakers) {
      j["kind"] = "too_few_speakers";
      j["category"] = is.category;
      j["speakers"] = is.speakers;
      io.err << "contrast '" << is.contrast_id << "' category '" << is.category << "' has "
             << is.speakers << " speaker(s), need " << o.min_speakers << "\n";
    } else {
      j["kind"] = "zero_triplets";
      io.err << "contrast '" << is.contrast_id << "' has zero cross-speaker triplets\n";
    }
    issues.push_back(std::move(j));
  }

  Json missing = Json::array();
  if (!o.features.empty()) {
    const auto layers = parse_layer_spec(o.layers.empty() ? "0" : o.layers);
    for (int layer : layers) {
      FeatureSource src{o.features, layer, {}};
      for (const auto& it : ds.items()) {
        const auto path = src.path_for(it.item_id);
        if (!fs::is_regular_file(path)) {
          io.err << "missing features for item '" << it.item_id << "' (" << path << ")\n";
          missing.push_back({{"item_id", it.item_id}, {"layer", layer}});
        }
      }
    }
  }

  Json config;
  config["command"] = "validate";
  config["manifest"] = o.manifest;
  config["contrasts"] = o.contrasts.empty() ? default_contrasts_path(o.manifest) : o.contrasts;
  config["min_speakers"] = o.min_speakers;
  config["features"] = o.features;
  config["layers"] = o.layers;

  const bool ok = report.ok() && missing.empty();
  if (!o.out.empty()) {
    Json doc;
    doc["config"] = config;
    doc["ok"] = ok;
    doc["items"] = ds.items().size();
    doc["contrasts"] = ds.contrasts().size();
    doc["triplets"] = triplets.size();
    doc["issues"] = issues;
    doc["missing_features"] = missing;
    write_text_file(o.out, doc.dump(2) + "\n");
  }
  Json summary;
  summary["ok"] = ok;
  summary["items"] = ds.items().size();
  summary["contrasts"] = ds.contrasts().size();
  summary["triplets"] = triplets.size();
  summary["issues"] = issues.size();
  summary["missing_features"] = missing.size();
  emit(io, summary);
  return ok ? kExitOk : kExitFailure;
}

// ---------------------------------------------------------------- baseline

struct BaselineOptions {
  std::string manifest, contrasts, audio_root, out, kind = "mel", context = "out_of_context";
  dsp::DspConfig dsp;
  bool float64 = false;
  int workers = -1;
};

int cmd_baseline(const BaselineOptions& o, IO& io) {
  const Dataset ds = load(o.manifest, o.contrasts);
  if (o.kind != "mel" && o.kind != "mfcc") throw UsageError("--kind must be mel or mfcc");
  const ContextMode context = context_or_throw(o.context);
  const unsigned workers = resolve_workers(o.workers);
  const std::string audio_root =
      o.audio_root.empty() ? fs::path(o.manifest).parent_path().string() : o.audio_root;

  const FeatureSource dest{o.out, 0, {o.dsp.hop_s, o.dsp.window_s / 2}};
  fs::create_directories(fs::path(dest.path_for("x")).parent_path());
  const auto& items = ds.items();
  for (const auto& it : items) {
    const auto path = (fs::path(audio_root) / it.audio_path).string();
    if (!fs::is_regular_file(path))
      throw Error("missing audio for item '" + it.item_id + "' (" + path + ")");
  }
  parallel_for(items.size(), workers, [&](std::size_t i) {
    const Item& it = items[i];
    dsp::Waveform w = dsp::read_wav((fs::path(audio_root) / it.audio_path).string());
    if (context == ContextMode::out_of_context && it.has_timestamps()) {
      const auto n = w.samples.size();
      const auto from = std::min(n, static_cast<std::size_t>(std::lround(*it.start_s * w.sample_rate_hz)));
      const auto to = std::min(n, static_cast<std::size_t>(std::lround(*it.end_s * w.sample_rate_hz)));
      w.samples = std::vector<double>(w.samples.begin() + static_cast<std::ptrdiff_t>(from),
                                      w.samples.begin() + static_cast<std::ptrdiff_t>(to));
    }
    try {
      const FeatureSequence seq = o.kind == "mel" ? dsp::mel_spectrogram(w, o.dsp) : dsp::mfcc(w, o.dsp);
      save_feature_sequence(dest.path_for(it.item_id), seq, !o.float64);
    } catch (const Error& e) {
      throw Error("item '" + it.item_id + "': " + e.what());
    }
  });
  write_layer_index(o.out, {o.kind, dest.frame_spec, {0}});

  Json summary;
  summary["kind"] = o.kind;
  summary["items"] = items.size();
  summary["out"] = o.out;
  summary["context"] = to_string(context);
  emit(io, summary);
  return kExitOk;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateOptions {
  std::string manifest, contrasts, features, layers, out, model_id;
  std::string metric = "angular", context = "out_of_context";
  double stride = -1, offset = -1;
  bool unordered_pairs = false, pool_directions = false, svg = false;
  int workers = -1;
};

int cmd_evaluate(const EvaluateOptions& o, IO& io) {
  const Dataset ds = load(o.manifest, o.contrasts);
  const auto layers = parse_layer_spec(o.layers);
  if (!fs::is_directory(o.features)) throw Error("feature root '" + o.features + "' does not exist");
  EvalConfig cfg;
  cfg.metric = metric_or_throw(o.metric);
  cfg.context = context_or_throw(o.context);
  cfg.workers = resolve_workers(o.workers);
  cfg.aggregation.ordered_speaker_pairs = !o.unordered_pairs && kDefaultOrderedSpeakerPairs;
  cfg.aggregation.directions_in_cell = o.pool_directions;
  std::string model_id = o.model_id;
  const FrameSpec spec = resolve_frame_spec(o.features, o.stride, o.offset, &model_id);
  if (model_id.empty()) model_id = fs::path(o.features).lexically_normal().filename().string();
  if (model_id.empty()) model_id = "model";

  Json config;
  config["command"] = "evaluate";
  config["manifest"] = o.manifest;
  config["contrasts"] = o.contrasts.empty() ? default_contrasts_path(o.manifest) : o.contrasts;
  config["features"] = o.features;
  config["model_id"] = model_id;
  config["layers"] = layers;
  config["metric"] = to_string(cfg.metric);
  config["context"] = to_string(cfg.context);
  config["frame_spec"] = frame_spec_json(spec);
  config["ordered_speaker_pairs"] = cfg.aggregation.ordered_speaker_pairs;
  config["directions_in_cell"] = cfg.aggregation.directions_in_cell;

  stats::LayerCurve curve{model_id, {}};
  for (int layer : layers) {
    const FeatureSource src{o.features, layer, spec};
    const EvaluationReport report = evaluate(ds, src, cfg);
    const std::string stem = (fs::path(o.out) / ("layer" + std::to_string(layer))).string();
    write_text_file(stem + ".json", report_to_json(report, config).dump(2) + "\n");
    write_text_file(stem + ".csv", report_to_csv(report));
    curve.points.emplace_back(layer, report.error_rate);
    io.err << "layer " << layer << ": error " << format_number(report.error_rate) << " over "
           << report.triplets << " triplets\n";
  }
  write_text_file((fs::path(o.out) / "curve.csv").string(), write_curves_csv({curve}));
  if (o.svg) {
    svg::Series s{model_id, {}};
    for (auto [l, e] : curve.points) s.points.emplace_back(l, e);
    write_text_file((fs::path(o.out) / "curve.svg").string(),
                    svg::line_plot({s}, {"ABX error by layer", "layer", "error rate"}));
  }

  const int best = stats::best_layer(curve);
  Json summary;
  summary["model_id"] = model_id;
  summary["layers"] = layers;
  Json errs = Json::array();
  for (auto [l, e] : curve.points) errs.push_back(e);
  summary["error_rates"] = errs;
  summary["best_layer"] = best;
  summary["best_error"] = *curve.error_at(best);
  emit(io, summary);
  return kExitOk;
}

// ---------------------------------------------------------------- trace

struct TraceOptions {
  std::string manifest, contrasts, features, a, b, x, out, svg_path;
  std::string metric = "angular", context = "out_of_context";
  int layer = 0;
  double stride = -1, offset = -1;
};

int cmd_trace(const TraceOptions& o, IO& io) {
  const Dataset ds = load(o.manifest, o.contrasts);
  const Metric metric = metric_or_throw(o.metric);
  const ContextMode context = context_or_throw(o.context);
  const FeatureSource src{o.features, o.layer, resolve_frame_spec(o.features, o.stride, o.offset, nullptr)};
  auto fetch = [&](const std::string& id) {
    auto idx = ds.find_item(id);
    if (!idx) throw Error("unknown item '" + id + "'");
    const Item& it = ds.item(*idx);
    const auto path = src.path_for(id);
    if (!fs::is_regular_file(path)) throw MissingFeatureError(id, path);
    FeatureSequence seq = load_feature_sequence(path, src.frame_spec);
    if (context == ContextMode::in_context) {
      if (!it.has_timestamps()) throw Error("item '" + id + "' has no timestamps");
      seq = slice_frames(seq, *it.start_s, *it.end_s);
    }
    return seq;
  };
  const FeatureSequence ra = fetch(o.a), rb = fetch(o.b), rx = fetch(o.x);
  const Alignment ax = dtw_align(ra, rx, metric);
  const Alignment bx = dtw_align(rb, rx, metric);
  const auto rows = local_trace(ax, bx);
  write_text_file(o.out, trace_csv(rows));
  if (!o.svg_path.empty()) {
    svg::Series diff{"b_local - a_local", {}};
    svg::Series a{"a_local", {}}, b{"b_local", {}};
    for (const auto& r : rows) {
      diff.points.emplace_back(static_cast<double>(r.x_frame), r.b_local - r.a_local);
      a.points.emplace_back(static_cast<double>(r.x_frame), r.a_local);
      b.points.emplace_back(static_cast<double>(r.x_frame), r.b_local);
    }
    write_text_file(o.svg_path, svg::line_plot({diff, a, b}, {"Local DTW distance along X",
                                                              "X frame", "local distance"}));
  }
  Json summary;
  summary["d_ax"] = ax.d;
  summary["d_bx"] = bx.d;
  summary["score"] = abx_score(ax.d, bx.d);
  summary["x_frames"] = rows.size();
  emit(io, summary);
  return kExitOk;
}

// ---------------------------------------------------------------- correlate

struct CorrelateOptions {
  std::vector<std::string> curves;
  std::string stat = "all", out;
  std::uint64_t seed = 0;
  std::size_t resamples = 10000;
  double level = 0.95;
  int workers = -1;
};

Json per_model_json(const std::vector<PerModel>& v) {
  Json j = Json::object();
  for (const auto& m : v) j[m.model_id] = m.value;
  return j;
}

Json stat_json(const stats::StatResult& r) {
  Json j;
  j["value"] = r.value;
  j["n"] = r.n;
  if (r.ci) j["ci"] = {r.ci->lo, r.ci->hi};
  if (r.ci) j["level"] = r.ci->level;
  if (r.p_value) j["p"] = *r.p_value;
  return j;
}

int cmd_correlate(const CorrelateOptions& o, IO& io) {
  if (o.curves.size() != 2) throw UsageError("--curves takes exactly two files");
  for (const auto& c : o.curves) require_file(c, "curve file");
  const auto first = parse_curves_csv(read_text_file(o.curves[0]));
  const auto second = parse_curves_csv(read_text_file(o.curves[1]));
  std::vector<Analysis> analyses;
  if (o.stat == "all") {
    analyses = {Analysis::layer_pearson, Analysis::regret, Analysis::model_spearman,
                Analysis::partial, Analysis::depth_wilcoxon, Analysis::pooled};
  } else {
    auto a = parse_analysis(o.stat);
    if (!a) throw UsageError("unknown --stat '" + o.stat + "'");
    analyses = {*a};
  }
  stats::BootstrapOptions boot;
  boot.seed = o.seed;
  boot.resamples = o.resamples;
  boot.level = o.level;
  boot.workers = resolve_workers(o.workers);
  const auto cmp = compare_curves(first, second, analyses, boot);
  if (cmp.models.empty()) throw Error("the two curve files share no model ids");

  Json summary = Json::object();
  Json detail;
  Json config;
  config["command"] = "correlate";
  config["curves"] = o.curves;
  config["stat"] = o.stat;
  config["seed"] = o.seed;
  config["resamples"] = o.resamples;
  config["level"] = o.level;
  detail["config"] = config;
  detail["models"] = cmp.models;
  if (cmp.layer_r_median) {
    summary["r"] = *cmp.layer_r_median;
    detail["layer_r"] = per_model_json(cmp.layer_r);
    detail["r_median"] = *cmp.layer_r_median;
  }
  if (cmp.regret_median) {
    summary["regret"] = *cmp.regret_median;
    detail["regret"] = per_model_json(cmp.regret);
    detail["regret_median"] = *cmp.regret_median;
  }
  if (cmp.model_rho) {
    summary["rho"] = cmp.model_rho->value;
    if (cmp.model_rho->ci) summary["ci"] = {cmp.model_rho->ci->lo, cmp.model_rho->ci->hi};
    detail["model_rho"] = stat_json(*cmp.model_rho);
  }
  if (cmp.partial_r_median) {
    summary["partial_r"] = *cmp.partial_r_median;
    detail["partial_r"] = per_model_json(cmp.partial_r);
    detail["partial_r_median"] = *cmp.partial_r_median;
  }
  if (cmp.best_delta_median) {
    summary["delta_median"] = *cmp.best_delta_median;
    detail["best_delta"] = per_model_json(cmp.best_delta);
    detail["best_delta_median"] = *cmp.best_delta_median;
  }
  if (cmp.depth_rho_median) {
    summary["depth_rho_median"] = *cmp.depth_rho_median;
    detail["depth_rho"] = per_model_json(cmp.depth_rho);
    detail["depth_rho_median"] = *cmp.depth_rho_median;
  }
  if (cmp.depth_wilcoxon) {
    summary["wilcoxon_p"] = *cmp.depth_wilcoxon->p_value;
    detail["depth_wilcoxon"] = stat_json(*cmp.depth_wilcoxon);
  }
  if (cmp.pooled_r) {
    summary["cross_r"] = cmp.pooled_r->value;
    detail["pooled_r"] = stat_json(*cmp.pooled_r);
  }
  Json skipped = Json::object();
  for (const auto& [k, why] : cmp.skipped) {
    skipped[k] = why;
    io.err << "skipped " << k << ": " << why << "\n";
  }
  detail["skipped"] = skipped;
  if (!o.out.empty()) write_text_file(o.out, detail.dump(2) + "\n");
  emit(io, summary);
  // A single requested analysis that could not run is a failure.
  if (o.stat != "all" && summary.empty()) return kExitFailure;
  return kExitOk;
}

// ---------------------------------------------------------------- human

struct HumanOptions {
  std::string responses, manifest, contrasts, model_report, out;
  double catch_threshold = 0.25;
  bool keep_flagged = false, svg = false;
};

int cmd_human(const HumanOptions& o, IO& io) {
  const Dataset ds = load(o.manifest, o.contrasts);
  require_file(o.responses, "responses file");
  const auto responses = parse_responses(read_text_file(o.responses));
  HumanConfig cfg;
  cfg.catch_error_threshold = o.catch_threshold;
  cfg.exclude_flagged = !o.keep_flagged;
  const HumanReport hr = human_error(responses, ds, cfg);

  Json config;
  config["command"] = "human";
  config["responses"] = o.responses;
  config["manifest"] = o.manifest;
  config["contrasts"] = o.contrasts.empty() ? default_contrasts_path(o.manifest) : o.contrasts;
  config["catch_threshold"] = o.catch_threshold;
  config["exclude_flagged"] = cfg.exclude_flagged;
  config["model_report"] = o.model_report;

  Json doc = report_to_json(hr.report, config);
  Json parts = Json::array();
  std::size_t flagged = 0;
  for (const auto& p : hr.participants) {
    Json j;
    j["participant_id"] = p.participant_id;
    j["trials"] = p.trials;
    j["catch_trials"] = p.catch_trials;
    j["catch_errors"] = p.catch_errors;
    j["catch_error_rate"] = p.catch_error_rate ? Json(*p.catch_error_rate) : Json(nullptr);
    j["flagged"] = p.flagged;
    if (p.flagged) {
      ++flagged;
      io.err << "participant '" << p.participant_id << "' flagged: catch error "
             << format_number(*p.catch_error_rate) << "\n";
    }
    parts.push_back(std::move(j));
  }
  doc["participants"] = parts;
  doc["responses"] = hr.responses;
  doc["catch_responses"] = hr.catch_responses;

  Json summary;
  summary["error_rate"] = hr.report.error_rate;
  summary["participants"] = hr.participants.size();
  summary["flagged"] = flagged;
  summary["responses"] = hr.responses;
  summary["catch_responses"] = hr.catch_responses;

  if (!o.model_report.empty()) {
    require_file(o.model_report, "model report");
    const auto model = report_from_json(Json::parse(read_text_file(o.model_report)));
    const auto cmp = compare_word_level(hr.report, model);
    std::string csv = "contrast_id,human_error,model_error\n";
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < cmp.contrast_ids.size(); ++i) {
      csv += cmp.contrast_ids[i] + "," + format_number(cmp.human_error[i]) + "," +
             format_number(cmp.model_error[i]) + "\n";
      pts.emplace_back(cmp.human_error[i], cmp.model_error[i]);
    }
    write_text_file((fs::path(o.out) / "word_level.csv").string(), csv);
    if (o.svg)
      write_text_file((fs::path(o.out) / "word_level.svg").string(),
                      svg::scatter_plot(pts, cmp.contrast_ids,
                                        {"Word-level ABX error", "human error", "model error"},
                                        true));
    if (cmp.pearson) {
      doc["word_level_r"] = stat_json(*cmp.pearson);
      summary["word_r"] = cmp.pearson->value;
    } else {
      doc["word_level_r"] = nullptr;
      io.err << "skipped word-level r: " << cmp.skipped << "\n";
    }
  }
  write_text_file((fs::path(o.out) / "human.json").string(), doc.dump(2) + "\n");
  write_text_file((fs::path(o.out) / "human.csv").string(), report_to_csv(hr.report));
  emit(io, summary);
  return kExitOk;
}

// ---------------------------------------------------------------- report

struct ReportOptions {
  std::vector<std::string> inputs;
  std::string out, markdown;
};

int cmd_report(const ReportOptions& o, IO& io) {
  std::string csv = "condition,r_m,regret_m,rho_model,ci_lo,ci_hi\n";
  std::string md = "| condition | r_m | regret_m (%) | rho_model [95% CI] |\n|---|---|---|---|\n";
  auto cell = [](const Json& doc, const char* key) -> std::optional<double> {
    if (doc.contains(key) && doc[key].is_number()) return doc[key].get<double>();
    return std::nullopt;
  };
  auto fmt = [](std::optional<double> v) { return v ? format_number(*v) : std::string{}; };
  auto fixed = [](std::optional<double> v, double scale) {
    if (!v) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", *v * scale);
    return std::string(buf);
  };
  for (const auto& spec : o.inputs) {
    const auto eq = spec.find('=');
    if (eq == std::string::npos) throw UsageError("--input expects LABEL=path, got '" + spec + "'");
    const std::string label = spec.substr(0, eq), path = spec.substr(eq + 1);
    require_file(path, "correlate output");
    const Json doc = Json::parse(read_text_file(path));
    const auto r = cell(doc, "r_median");
    const auto regret = cell(doc, "regret_median");
    std::optional<double> rho, lo, hi;
    if (doc.contains("model_rho")) {
      rho = doc["model_rho"]["value"].get<double>();
      if (doc["model_rho"].contains("ci")) {
        lo = doc["model_rho"]["ci"][0].get<double>();
        hi = doc["model_rho"]["ci"][1].get<double>();
      }
    }
    csv += label + "," + fmt(r) + "," + fmt(regret) + "," + fmt(rho) + "," + fmt(lo) + "," +
           fmt(hi) + "\n";
    md += "| " + label + " | " + fixed(r, 1) + " | " + fixed(regret, 100) + " | " + fixed(rho, 1) +
          (lo ? " [" + fixed(lo, 1) + ", " + fixed(hi, 1) + "]" : std::string{}) + " |\n";
  }
  write_text_file(o.out, csv);
  if (!o.markdown.empty()) write_text_file(o.markdown, md);
  Json summary;
  summary["rows"] = o.inputs.size();
  summary["out"] = o.out;
  emit(io, summary);
  return kExitOk;
}

}  // namespace

std::vector<int> parse_layer_spec(const std::string& spec) {
  std::set<int> layers;
  std::size_t pos = 0;
  auto to_int = [&](const std::string& s) {
    std::size_t used = 0;
    int v = 0;
    try {
      v = std::stoi(s, &used);
    } catch (const std::exception&) {
      throw UsageError("invalid layer spec '" + spec + "'");
    }
    if (used != s.size() || v < 0) throw UsageError("invalid layer spec '" + spec + "'");
    return v;
  };
  while (pos <= spec.size()) {
    auto comma = spec.find(',', pos);
    const std::string part = spec.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
    pos = comma == std::string::npos ? spec.size() + 1 : comma + 1;
    if (part.empty()) throw UsageError("invalid layer spec '" + spec + "'");
    const auto dots = part.find("..");
    if (dots == std::string::npos) {
      layers.insert(to_int(part));
    } else {
      const int lo = to_int(part.substr(0, dots)), hi = to_int(part.substr(dots + 2));
      if (hi < lo) throw UsageError("invalid layer range '" + part + "'");
      for (int l = lo; l <= hi; ++l) layers.insert(l);
    }
  }
  return {layers.begin(), layers.end()};
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  IO io{out, err};
  CLI::App app{"Prosodic ABX evaluation engine", "prosabx"};
  app.require_subcommand(1);

  ValidateOptions vo;
  auto* validate = app.add_subcommand("validate", "Check a manifest and its speaker coverage");
  validate->add_option("--manifest", vo.manifest, "Manifest CSV")->required();
  validate->add_option("--contrasts", vo.contrasts, "Contrast sidecar JSON");
  validate->add_option("--min-speakers", vo.min_speakers, "Minimum speakers per category")
      ->capture_default_str();
  validate->add_option("--features", vo.features, "Feature root to check for completeness");
  validate->add_option("--layers", vo.layers, "Layers to check, e.g. 0..12");
  validate->add_option("--out", vo.out, "Write the validation report here");

  BaselineOptions bo;
  auto* baseline = app.add_subcommand("baseline", "Compute mel or MFCC features from WAV audio");
  baseline->add_option("--manifest", bo.manifest)->required();
  baseline->add_option("--contrasts", bo.contrasts);
  baseline->add_option("--audio-root", bo.audio_root, "Directory audio_path is relative to");
  baseline->add_option("--out", bo.out, "Feature root to write")->required();
  baseline->add_option("--kind", bo.kind, "mel or mfcc")->capture_default_str();
  baseline->add_option("--context", bo.context, "out_of_context clips to start_s/end_s")
      ->capture_default_str();
  baseline->add_option("--window", bo.dsp.window_s)->capture_default_str();
  baseline->add_option("--hop", bo.dsp.hop_s)->capture_default_str();
  baseline->add_option("--n-fft", bo.dsp.n_fft);
  baseline->add_option("--n-mels", bo.dsp.n_mels)->capture_default_str();
  baseline->add_option("--n-mfcc", bo.dsp.n_mfcc)->capture_default_str();
  baseline->add_option("--fmin", bo.dsp.fmin_hz)->capture_default_str();
  baseline->add_option("--fmax", bo.dsp.fmax_hz, "0 means Nyquist");
  baseline->add_option("--log-floor", bo.dsp.log_floor)->capture_default_str();
  baseline->add_flag("--float64", bo.float64, "Write float64 arrays");
  baseline->add_option("--workers", bo.workers);

  EvaluateOptions eo;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Run prosodic ABX for each layer");
  evaluate_cmd->add_option("--manifest", eo.manifest)->required();
  evaluate_cmd->add_option("--contrasts", eo.contrasts);
  evaluate_cmd->add_option("--features", eo.features, "Feature root")->required();
  evaluate_cmd->add_option("--layers", eo.layers, "e.g. 0..12")->required();
  evaluate_cmd->add_option("--out", eo.out, "Output directory")->required();
  evaluate_cmd->add_option("--model-id", eo.model_id);
  evaluate_cmd->add_option("--metric", eo.metric, "angular, cosine or euclidean")
      ->capture_default_str();
  evaluate_cmd->add_option("--context", eo.context, "out_of_context or in_context")
      ->capture_default_str();
  evaluate_cmd->add_option("--stride", eo.stride, "Frame stride in seconds");
  evaluate_cmd->add_option("--offset", eo.offset, "Centre of frame 0 in seconds");
  evaluate_cmd->add_flag("--unordered-pairs", eo.unordered_pairs);
  evaluate_cmd->add_flag("--pool-directions", eo.pool_directions);
  evaluate_cmd->add_flag("--svg", eo.svg);
  evaluate_cmd->add_option("--workers", eo.workers);

  TraceOptions to;
  auto* trace = app.add_subcommand("trace", "Local DTW distance trace for one triplet");
  trace->add_option("--manifest", to.manifest)->required();
  trace->add_option("--contrasts", to.contrasts);
  trace->add_option("--features", to.features)->required();
  trace->add_option("--layer", to.layer)->capture_default_str();
  trace->add_option("--a", to.a)->required();
  trace->add_option("--b", to.b)->required();
  trace->add_option("--x", to.x)->required();
  trace->add_option("--metric", to.metric)->capture_default_str();
  trace->add_option("--context", to.context)->capture_default_str();
  trace->add_option("--stride", to.stride);
  trace->add_option("--offset", to.offset);
  trace->add_option("--out", to.out, "Trace CSV")->required();
  trace->add_option("--svg", to.svg_path, "Trace SVG");

  CorrelateOptions co;
  auto* correlate = app.add_subcommand("correlate", "Compare layer curves of two conditions");
  correlate->add_option("--curves", co.curves, "Two curve CSVs")->required()->expected(2);
  correlate->add_option("--stat", co.stat,
                        "pearson, regret, spearman, partial, wilcoxon, cross or all")
      ->capture_default_str();
  correlate->add_option("--seed", co.seed)->capture_default_str();
  correlate->add_option("--resamples", co.resamples)->capture_default_str();
  correlate->add_option("--level", co.level)->capture_default_str();
  correlate->add_option("--out", co.out, "Detailed JSON output");
  correlate->add_option("--workers", co.workers);

  HumanOptions ho;
  auto* human = app.add_subcommand("human", "Score listening-test responses");
  human->add_option("--responses", ho.responses, "Response JSONL")->required();
  human->add_option("--manifest", ho.manifest)->required();
  human->add_option("--contrasts", ho.contrasts);
  human->add_option("--model-report", ho.model_report, "Layer report JSON to compare against");
  human->add_option("--catch-threshold", ho.catch_threshold)->capture_default_str();
  human->add_flag("--keep-flagged", ho.keep_flagged);
  human->add_option("--out", ho.out, "Output directory")->required();
  human->add_flag("--svg", ho.svg);

  ReportOptions ro;
  auto* report = app.add_subcommand("report", "Merge correlate outputs into one table");
  report->add_option("--input", ro.inputs, "LABEL=correlate.json")->required();
  report->add_option("--out", ro.out, "Table CSV")->required();
  report->add_option("--markdown", ro.markdown, "Also write a Markdown table");

  std::vector<std::string> argv_store{"prosabx"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<const char*> argv;
  for (const auto& a : argv_store) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*validate) return cmd_validate(vo, io);
    if (*baseline) return cmd_baseline(bo, io);
    if (*evaluate_cmd) return cmd_evaluate(eo, io);
    if (*trace) return cmd_trace(to, io);
    if (*correlate) return cmd_correlate(co, io);
    if (*human) return cmd_human(ho, io);
    if (*report) return cmd_report(ro, io);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const nlohmann::json::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace prosabx::cli
