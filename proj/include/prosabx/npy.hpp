#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace prosabx::npy {

enum class DType { float32, float64 };

// A decoded .npy array, always widened to double. Shape is stored as written.
struct Array {
  std::vector<std::size_t> shape;
  DType dtype = DType::float64;
  std::vector<double> values;  // C order
};

// Reads the simple .npy format (versions 1.0 and 2.0, little-endian f4/f8,
// C order). Throws prosabx::Error with the path on any problem.
Array read(const std::string& path);
Array parse(const std::string& bytes, const std::string& label = "<memory>");

// Writes a version 1.0 file. The header is padded so the data starts on a
// 64-byte boundary, as numpy does.
std::string serialize(const std::vector<std::size_t>& shape, const std::vector<double>& values,
                      DType dtype);
void write(const std::string& path, const std::vector<std::size_t>& shape,
           const std::vector<double>& values, DType dtype);

}  // namespace prosabx::npy
