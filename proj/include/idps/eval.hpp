#pragma once

// Evaluation artifacts: confusion matrices, success/failure rates, ROC
// curves with trapezoidal AUC, and the four alarm outcomes of an IDS.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "idps/data.hpp"
#include "idps/mlp.hpp"

namespace idps {

// Rows are the actual class, columns the predicted class.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int k = kClassCount);

  int classes() const noexcept { return k_; }
  std::uint64_t operator()(int actual, int predicted) const;
  void add(int actual, int predicted, std::uint64_t n = 1);

  std::uint64_t total() const;
  std::uint64_t trace() const;

  ConfusionMatrix& operator+=(const ConfusionMatrix& other);
  friend ConfusionMatrix operator+(ConfusionMatrix a, const ConfusionMatrix& b) { return a += b; }
  friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;

 private:
  int k_;
  std::vector<std::uint64_t> counts_;
};

ConfusionMatrix confusion(std::span<const ClassId> predicted, std::span<const ClassId> actual,
                          int k = kClassCount);

struct Rates {
  double success = 0.0;
  double failure = 0.0;
};

/// success = trace / total, failure = 1 - success.
Rates accuracy(const ConfusionMatrix& cm);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
  double threshold = 0.0;  // +inf for the (0, 0) sentinel
};

struct RocCurve {
  std::vector<RocPoint> points;
  double auc = 0.0;
};

/// Sweeps the threshold down through the distinct scores: a sample is
/// flagged when score >= threshold. Equal scores switch together. AUC by
/// the trapezoid rule.
RocCurve roc(std::span<const double> scores, const std::vector<bool>& positives);

/// One-vs-rest curve for class `cls` using that class's softmax output.
RocCurve roc_one_vs_rest(const Matrix& outputs, std::span<const ClassId> labels, ClassId cls);

/// Attack-vs-normal curve scored by 1 - p(normal).
RocCurve roc_attack(const Matrix& outputs, std::span<const ClassId> labels);

enum class AlarmOutcome { true_positive, false_positive, false_negative, true_negative };

std::string_view alarm_outcome_name(AlarmOutcome a);

/// Binarizes both sides into attack (class != 0) vs normal.
AlarmOutcome alarm_outcome(ClassId predicted, ClassId actual);

struct AlarmTally {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  void add(AlarmOutcome a);
  std::uint64_t total() const { return tp + fp + fn + tn; }
  AlarmTally& operator+=(const AlarmTally& o);
  friend bool operator==(const AlarmTally&, const AlarmTally&) = default;
};

AlarmTally alarm_tally(std::span<const ClassId> predicted, std::span<const ClassId> actual);

struct EvaluationReport {
  std::string partition;
  std::size_t samples = 0;
  double mse = 0.0;
  ConfusionMatrix confusion;
  Rates rates;
  AlarmTally alarms;
  // Indexed by class; empty when the partition has no positives or no
  // negatives for that class.
  std::vector<std::optional<RocCurve>> class_roc;
  std::optional<RocCurve> attack_roc;
  std::vector<ClassId> predicted;
};

/// Runs the network over an already-scaled partition.
EvaluationReport evaluate(const Network& net, const Dataset& partition, int k = kClassCount,
                          std::string name = "");

/// Rows of several datasets stacked in order.
Dataset concat(std::span<const Dataset* const> parts);

}  // namespace idps
