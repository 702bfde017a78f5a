#include "idps/error.hpp"

#include <sstream>

namespace idps {

FieldCountError::FieldCountError(std::size_t found, std::size_t expected)
    : Error("expected " + std::to_string(expected) + " comma-separated fields, found " +
            std::to_string(found)),
      found_(found) {}

NumericParseError::NumericParseError(const std::string& feature, const std::string& text)
    : Error("feature '" + feature + "' is not a number: '" + text + "'") {}

UnknownSymbolError::UnknownSymbolError(const std::string& feature, const std::string& symbol)
    : Error("feature '" + feature + "' has no code for symbol '" + symbol + "'") {}

DatasetLineError::DatasetLineError(std::size_t line, const std::string& what)
    : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

TrainingDivergedError::TrainingDivergedError(std::size_t epoch)
    : Error("training diverged (non-finite loss or weights) at epoch " + std::to_string(epoch)) {}

namespace {
std::string range_message(std::size_t layer, double max_abs, double limit) {
  std::ostringstream os;
  os.precision(9);
  os << "layer " << layer << " has parameter magnitude " << max_abs
     << " outside the fixed-point range (limit " << limit << ")";
  return os.str();
}
}  // namespace

RangeExceededError::RangeExceededError(std::size_t layer, double max_abs, double limit)
    : Error(range_message(layer, max_abs, limit)), layer_(layer), max_abs_(max_abs) {}

}  // namespace idps
