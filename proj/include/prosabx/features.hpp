#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace prosabx {

// Time layout of a feature sequence: frame i is centred at offset_s + i * stride_s.
struct FrameSpec {
  double stride_s = 0.02;
  double offset_s = 0.01;

  static FrameSpec with_default_offset(double stride_s) { return {stride_s, stride_s / 2}; }
  double center(std::size_t frame) const { return offset_s + static_cast<double>(frame) * stride_s; }
  friend bool operator==(const FrameSpec&, const FrameSpec&) = default;
};

// An immutable T x D matrix of finite values, row i = frame i.
class FeatureSequence {
 public:
  // Throws prosabx::Error unless rows, cols >= 1, data.size() == rows*cols,
  // every value is finite and the stride is positive.
  FeatureSequence(std::size_t rows, std::size_t cols, std::vector<double> data,
                  FrameSpec frame_spec = {});

  std::size_t frames() const { return rows_; }
  std::size_t dim() const { return cols_; }
  const FrameSpec& frame_spec() const { return frame_spec_; }
  std::span<const double> frame(std::size_t i) const {
    return {data_.data() + i * cols_, cols_};
  }
  const std::vector<double>& data() const { return data_; }

  friend bool operator==(const FeatureSequence&, const FeatureSequence&) = default;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
  FrameSpec frame_spec_;
};

// Reads a 2-D float32/float64 .npy file.
FeatureSequence load_feature_sequence(const std::string& path, FrameSpec frame_spec = {});

void save_feature_sequence(const std::string& path, const FeatureSequence& seq,
                           bool as_float32 = true);

// Rows whose frame centre lies in [start_s, end_s). Never empty: when no
// centre falls inside, the frame nearest the interval midpoint is returned.
FeatureSequence slice_frames(const FeatureSequence& seq, double start_s, double end_s);

// Indices selected by slice_frames, exposed for testing the membership rule.
std::vector<std::size_t> slice_indices(std::size_t frames, const FrameSpec& spec, double start_s,
                                       double end_s);

// Per-layer feature directory: <root>/layer<L>/<item_id>.npy
struct FeatureSource {
  std::string root;
  int layer = 0;
  FrameSpec frame_spec;

  std::string path_for(const std::string& item_id) const;
};

// Sidecar written next to per-layer directories:
// {"model_id":..., "stride_s":..., "offset_s":..., "layers":[...]}
struct LayerIndex {
  std::string model_id;
  FrameSpec frame_spec;
  std::vector<int> layers;
};

std::optional<LayerIndex> read_layer_index(const std::string& root);
void write_layer_index(const std::string& root, const LayerIndex& index);

}  // namespace prosabx
