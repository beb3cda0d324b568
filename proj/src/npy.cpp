#include "prosabx/npy.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

#include "prosabx/error.hpp"

namespace prosabx::npy {

namespace {

static_assert(std::endian::native == std::endian::little, "little-endian host required");

constexpr char kMagic[] = "\x93NUMPY";

[[noreturn]] void fail(const std::string& label, const std::string& what) {
  throw Error("npy '" + label + "': " + what);
}

// Extracts the value text following `'key':` in the header dict.
std::string dict_value(const std::string& header, const std::string& key,
                       const std::string& label) {
  auto k = header.find("'" + key + "'");
  if (k == std::string::npos) fail(label, "header lacks '" + key + "'");
  auto colon = header.find(':', k);
  if (colon == std::string::npos) fail(label, "malformed header");
  std::size_t start = header.find_first_not_of(' ', colon + 1);
  std::size_t end = start;
  if (header[start] == '(') {
    end = header.find(')', start);
    if (end == std::string::npos) fail(label, "malformed shape");
    ++end;
  } else if (header[start] == '\'') {
    end = header.find('\'', start + 1);
    if (end == std::string::npos) fail(label, "malformed string");
    ++end;
  } else {
    end = header.find_first_of(",}", start);
  }
  return header.substr(start, end - start);
}

std::vector<std::size_t> parse_shape(const std::string& text, const std::string& label) {
  std::vector<std::size_t> shape;
  std::string inner = text.substr(1, text.size() - 2);
  std::stringstream ss(inner);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    auto b = tok.find_first_not_of(' ');
    if (b == std::string::npos) continue;
    auto e = tok.find_last_not_of(' ');
    tok = tok.substr(b, e - b + 1);
    std::size_t v = 0;
    try {
      std::size_t used = 0;
      v = std::stoull(tok, &used);
      if (used != tok.size()) throw std::invalid_argument(tok);
    } catch (const std::exception&) {
      fail(label, "bad shape entry '" + tok + "'");
    }
    shape.push_back(v);
  }
  return shape;
}

}  // namespace

Array parse(const std::string& bytes, const std::string& label) {
  if (bytes.size() < 10 || std::memcmp(bytes.data(), kMagic, 6) != 0)
    fail(label, "not an npy file");
  const auto major = static_cast<unsigned char>(bytes[6]);
  std::size_t header_len = 0;
  std::size_t prefix = 0;
  if (major == 1) {
    header_len = static_cast<unsigned char>(bytes[8]) |
                 (static_cast<std::size_t>(static_cast<unsigned char>(bytes[9])) << 8);
    prefix = 10;
  } else if (major == 2 || major == 3) {
    if (bytes.size() < 12) fail(label, "truncated header");
    std::uint32_t len = 0;
    std::memcpy(&len, bytes.data() + 8, 4);
    header_len = len;
    prefix = 12;
  } else {
    fail(label, "unsupported format version " + std::to_string(major));
  }
  if (bytes.size() < prefix + header_len) fail(label, "truncated header");
  const std::string header = bytes.substr(prefix, header_len);

  Array out;
  const std::string descr = dict_value(header, "descr", label);
  std::size_t width = 0;
  if (descr == "'<f4'") {
    out.dtype = DType::float32;
    width = 4;
  } else if (descr == "'<f8'") {
    out.dtype = DType::float64;
    width = 8;
  } else {
    fail(label, "unsupported dtype " + descr);
  }
  if (dict_value(header, "fortran_order", label) != "False")
    fail(label, "fortran_order arrays are not supported");
  out.shape = parse_shape(dict_value(header, "shape", label), label);

  std::size_t count = 1;
  for (auto d : out.shape) count *= d;
  const std::size_t data_off = prefix + header_len;
  if (bytes.size() - data_off < count * width) fail(label, "truncated data");
  out.values.resize(count);
  const char* p = bytes.data() + data_off;
  for (std::size_t i = 0; i < count; ++i) {
    if (width == 4) {
      float f;
      std::memcpy(&f, p + i * 4, 4);
      out.values[i] = f;
    } else {
      std::memcpy(&out.values[i], p + i * 8, 8);
    }
  }
  return out;
}

Array read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path);
}

std::string serialize(const std::vector<std::size_t>& shape, const std::vector<double>& values,
                      DType dtype) {
  std::string shape_text = "(";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    shape_text += std::to_string(shape[i]);
    if (i + 1 < shape.size() || shape.size() == 1) shape_text += ",";
    if (i + 1 < shape.size()) shape_text += " ";
  }
  shape_text += ")";
  std::string header = std::string("{'descr': '") + (dtype == DType::float32 ? "<f4" : "<f8") +
                       "', 'fortran_order': False, 'shape': " + shape_text + ", }";
  std::size_t total = 10 + header.size() + 1;
  header.append((64 - total % 64) % 64, ' ');
  header.push_back('\n');
  if (header.size() > 0xFFFF) throw Error("npy header too long");

  std::string out(kMagic, 6);
  out.push_back('\x01');
  out.push_back('\x00');
  out.push_back(static_cast<char>(header.size() & 0xFF));
  out.push_back(static_cast<char>((header.size() >> 8) & 0xFF));
  out += header;
  for (double v : values) {
    if (dtype == DType::float32) {
      float f = static_cast<float>(v);
      out.append(reinterpret_cast<const char*>(&f), 4);
    } else {
      out.append(reinterpret_cast<const char*>(&v), 8);
    }
  }
  return out;
}

void write(const std::string& path, const std::vector<std::size_t>& shape,
           const std::vector<double>& values, DType dtype) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write '" + path + "'");
  const std::string bytes = serialize(shape, values, dtype);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("write failed for '" + path + "'");
}

}  // namespace prosabx::npy
