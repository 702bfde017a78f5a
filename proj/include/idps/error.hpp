#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace idps {

// Base of every error raised by the pipeline. Callers that only need a
// diagnostic can catch this; the subclasses exist so tests and the CLI can
// tell failure kinds apart.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ingestion
class FieldCountError : public Error {
 public:
  FieldCountError(std::size_t found, std::size_t expected);
  std::size_t found() const noexcept { return found_; }

 private:
  std::size_t found_;
};

class EmptyLabelError : public Error {
 public:
  EmptyLabelError() : Error("record label is empty") {}
};

class NumericParseError : public Error {
 public:
  NumericParseError(const std::string& feature, const std::string& text);
};

class UnknownSymbolError : public Error {
 public:
  UnknownSymbolError(const std::string& feature, const std::string& symbol);
};

class EmptyDatasetError : public Error {
 public:
  explicit EmptyDatasetError(const std::string& path)
      : Error("dataset is empty: " + path) {}
};

// Wraps a record-level error with the 1-based line number it came from.
class DatasetLineError : public Error {
 public:
  DatasetLineError(std::size_t line, const std::string& what);
  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class FormatError : public Error {
 public:
  using Error::Error;
};

// dataset
class DegenerateSplitError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

// mlp
class DimensionError : public Error {
 public:
  using Error::Error;
};

class TrainingDivergedError : public Error {
 public:
  explicit TrainingDivergedError(std::size_t epoch);
};

// eval
class DegenerateClassError : public Error {
 public:
  using Error::Error;
};

// fixedpoint
class RangeExceededError : public Error {
 public:
  RangeExceededError(std::size_t layer, double max_abs, double limit);
  std::size_t layer() const noexcept { return layer_; }
  double max_abs() const noexcept { return max_abs_; }

 private:
  std::size_t layer_;
  double max_abs_;
};

}  // namespace idps
