#pragma once

#include <filesystem>
#include <span>
#include <string>

#include "idps/eval.hpp"

namespace idps {

/// K rows of K comma-separated counts (row = actual, column = predicted).
std::string confusion_csv(const ConfusionMatrix& cm);

/// `fpr,tpr,threshold` rows; the sentinel threshold is written as `inf`.
std::string roc_csv(const RocCurve& curve);

/// `partition,mse,success_rate,failure_rate,tp,fp,fn,tn`, one row per report.
std::string summary_csv(std::span<const EvaluationReport> reports);

/// Human-readable rendering of the same reports.
std::string evaluation_text(std::span<const EvaluationReport> reports);

/// Writes confusion_<partition>.csv for every report and summary.csv.
void write_evaluation(const std::filesystem::path& dir, std::span<const EvaluationReport> reports);

/// Writes roc_class<k>.csv for every class with a defined curve plus
/// roc_attack.csv, taken from `report`.
void write_roc(const std::filesystem::path& dir, const EvaluationReport& report);

}  // namespace idps
