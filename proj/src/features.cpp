#include "prosabx/features.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "prosabx/error.hpp"
#include "prosabx/npy.hpp"

namespace prosabx {

FeatureSequence::FeatureSequence(std::size_t rows, std::size_t cols, std::vector<double> data,
                                 FrameSpec frame_spec)
    : rows_(rows), cols_(cols), data_(std::move(data)), frame_spec_(frame_spec) {
  if (rows_ == 0 || cols_ == 0) throw Error("feature sequence must have T >= 1 and D >= 1");
  if (data_.size() != rows_ * cols_) throw Error("feature data size does not match T x D");
  if (!(frame_spec_.stride_s > 0) || !std::isfinite(frame_spec_.offset_s))
    throw Error("frame stride must be positive");
  for (std::size_t i = 0; i < data_.size(); ++i)
    if (!std::isfinite(data_[i]))
      throw Error("non-finite feature value at frame " + std::to_string(i / cols_));
}

FeatureSequence load_feature_sequence(const std::string& path, FrameSpec frame_spec) {
  npy::Array arr = npy::read(path);
  if (arr.shape.size() != 2)
    throw Error("npy '" + path + "': expected a 2-D array, got rank " +
                std::to_string(arr.shape.size()));
  try {
    return FeatureSequence(arr.shape[0], arr.shape[1], std::move(arr.values), frame_spec);
  } catch (const Error& e) {
    throw Error("npy '" + path + "': " + e.what());
  }
}

void save_feature_sequence(const std::string& path, const FeatureSequence& seq, bool as_float32) {
  npy::write(path, {seq.frames(), seq.dim()}, seq.data(),
             as_float32 ? npy::DType::float32 : npy::DType::float64);
}

std::vector<std::size_t> slice_indices(std::size_t frames, const FrameSpec& spec, double start_s,
                                       double end_s) {
  if (!(start_s >= 0.0) || !(start_s < end_s))
    throw Error("invalid slice interval [" + std::to_string(start_s) + ", " +
                std::to_string(end_s) + ")");
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < frames; ++i) {
    const double c = spec.center(i);
    if (c >= start_s && c < end_s) idx.push_back(i);
  }
  if (idx.empty()) {
    const double mid = 0.5 * (start_s + end_s);
    std::size_t best = 0;
    double best_gap = std::abs(spec.center(0) - mid);
    for (std::size_t i = 1; i < frames; ++i) {
      const double gap = std::abs(spec.center(i) - mid);
      if (gap < best_gap) {
        best_gap = gap;
        best = i;
      }
    }
    idx.push_back(best);
  }
  return idx;
}

FeatureSequence slice_frames(const FeatureSequence& seq, double start_s, double end_s) {
  const auto idx = slice_indices(seq.frames(), seq.frame_spec(), start_s, end_s);
  std::vector<double> data;
  data.reserve(idx.size() * seq.dim());
  for (std::size_t i : idx) {
    auto f = seq.frame(i);
    data.insert(data.end(), f.begin(), f.end());
  }
  // Sliced frames keep their original time stamps relative to the utterance.
  FrameSpec spec = seq.frame_spec();
  spec.offset_s = spec.center(idx.front());
  return FeatureSequence(idx.size(), seq.dim(), std::move(data), spec);
}

std::string FeatureSource::path_for(const std::string& item_id) const {
  return (std::filesystem::path(root) / ("layer" + std::to_string(layer)) / (item_id + ".npy"))
      .string();
}

std::optional<LayerIndex> read_layer_index(const std::string& root) {
  const auto path = std::filesystem::path(root) / "layers.json";
  std::ifstream in(path);
  if (!in) return std::nullopt;
  try {
    auto doc = nlohmann::json::parse(in);
    LayerIndex idx;
    idx.model_id = doc.value("model_id", std::string{});
    idx.frame_spec.stride_s = doc.at("stride_s").get<double>();
    idx.frame_spec.offset_s = doc.contains("offset_s") ? doc["offset_s"].get<double>()
                                                       : idx.frame_spec.stride_s / 2;
    if (doc.contains("layers")) idx.layers = doc["layers"].get<std::vector<int>>();
    if (!(idx.frame_spec.stride_s > 0)) throw Error("stride_s must be positive");
    return idx;
  } catch (const nlohmann::json::exception& e) {
    throw Error("'" + path.string() + "': " + e.what());
  }
}

void write_layer_index(const std::string& root, const LayerIndex& index) {
  nlohmann::ordered_json doc;
  doc["model_id"] = index.model_id;
  doc["stride_s"] = index.frame_spec.stride_s;
  doc["offset_s"] = index.frame_spec.offset_s;
  doc["layers"] = index.layers;
  std::filesystem::create_directories(root);
  std::ofstream out(std::filesystem::path(root) / "layers.json", std::ios::trunc);
  out << doc.dump(2) << "\n";
  if (!out) throw Error("cannot write layers.json under '" + root + "'");
}

}  // namespace prosabx
