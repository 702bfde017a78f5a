#pragma once

// End-to-end commands behind the `idps` executable: prep, train, eval, roc,
// quantize, compare and detect.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "idps/dataset.hpp"
#include "idps/error.hpp"
#include "idps/fixedpoint.hpp"
#include "idps/train.hpp"

namespace idps {

struct RunConfig {
  std::string command;
  std::filesystem::path data;  // raw KDD file, prep output directory, or "-" for detect
  std::filesystem::path schema;
  std::filesystem::path taxonomy;
  std::filesystem::path model;
  std::filesystem::path out;
  std::filesystem::path config_file;  // recorded in the manifest only

  std::uint64_t seed = 1;
  SplitSpec split;
  std::vector<std::size_t> hidden{20};
  TrainConfig train;
  FixedFormat format;
  bool strict = false;
  std::size_t sample = 0;
  std::string partition = "test";
};

// An error annotated with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what);
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// "0.70,0.15,0.15" into the three fractions.
void parse_split(std::string_view text, SplitSpec& spec);
std::vector<std::size_t> parse_hidden(std::string_view text);

/// Sorted key=value lines describing the run, with digests of every input.
/// Output locations are not part of it.
std::string run_manifest(const RunConfig& cfg);

/// Executes one command. Diagnostics go to `err` as "idps: <stage>: ...".
/// Returns the process exit status.
int run(const RunConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err);

inline constexpr const char* kCommands[] = {"prep",     "train",   "eval",  "roc",
                                            "quantize", "compare", "detect"};

}  // namespace idps
