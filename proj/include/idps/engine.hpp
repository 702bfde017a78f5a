#pragma once

// In-line prevention: classify a stream of connection records and map each
// predicted class to an allow/alert/block action.

#include <array>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "idps/eval.hpp"
#include "idps/model_io.hpp"

namespace idps {

enum class Action { allow, alert, block };

std::string_view action_name(Action a);

struct Policy {
  std::array<Action, kClassCount> action_of{};

  /// allow normal traffic, block the four attack families, alert on other.
  static Policy standard();
};

Action decide(ClassId predicted, const Policy& policy);

struct Verdict {
  std::size_t record_index = 0;
  std::uint64_t sequence = 0;
  std::optional<ClassId> predicted;  // empty for malformed input
  Action action = Action::alert;
  std::array<double, kClassCount> scores{};
  std::optional<ClassId> actual;  // from the record label, when present
  std::string error;
};

/// `index,predicted_class,action,score0..score5`; malformed records are
/// written with class -1 and nan scores.
std::string format_verdict(const Verdict& v);

struct StreamSummary {
  std::size_t records = 0;
  std::size_t malformed = 0;
  std::array<std::size_t, 3> actions{};  // by Action
  std::array<std::size_t, kClassCount> predicted{};
  std::size_t labelled = 0;
  std::size_t correct = 0;
  AlarmTally alarms;  // labelled, well-formed records only

  std::string to_text() const;
};

using VerdictSink = std::function<void(const Verdict&)>;

/// Processes lines in arrival order. Each non-blank line yields exactly one
/// verdict; a line that fails to parse or encode yields an alert verdict and
/// processing continues.
StreamSummary process_stream(std::istream& in, const TrainedModel& model, const Policy& policy,
                             const VerdictSink& sink);

}  // namespace idps
