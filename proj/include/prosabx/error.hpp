#pragma once

#include <stdexcept>
#include <string>

namespace prosabx {

// Base for every recoverable failure raised by the library. The CLI maps
// these to exit code 1.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed input text (manifest rows, JSON sidecars, response files).
// `line` is 1-based; 0 when the error is not tied to a line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : Error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A dataset item whose feature file could not be resolved.
class MissingFeatureError : public Error {
 public:
  MissingFeatureError(std::string item_id, const std::string& path)
      : Error("missing features for item '" + item_id + "' (" + path + ")"),
        item_id_(std::move(item_id)) {}
  const std::string& item_id() const noexcept { return item_id_; }

 private:
  std::string item_id_;
};

}  // namespace prosabx
