#include "idps/eval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "idps/error.hpp"
#include "idps/kernels.hpp"

namespace idps {

ConfusionMatrix::ConfusionMatrix(int k) : k_(k), counts_(static_cast<std::size_t>(k * k), 0) {
  if (k <= 0) throw RangeError("confusion matrix needs at least one class");
}

std::uint64_t ConfusionMatrix::operator()(int actual, int predicted) const {
  if (actual < 0 || actual >= k_ || predicted < 0 || predicted >= k_)
    throw RangeError("confusion cell out of range");
  return counts_[static_cast<std::size_t>(actual * k_ + predicted)];
}

void ConfusionMatrix::add(int actual, int predicted, std::uint64_t n) {
  if (actual < 0 || actual >= k_ || predicted < 0 || predicted >= k_)
    throw RangeError("class id out of range: actual " + std::to_string(actual) + ", predicted " +
                     std::to_string(predicted));
  counts_[static_cast<std::size_t>(actual * k_ + predicted)] += n;
}

std::uint64_t ConfusionMatrix::total() const {
  return std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t t = 0;
  for (int i = 0; i < k_; ++i) t += counts_[static_cast<std::size_t>(i * k_ + i)];
  return t;
}

ConfusionMatrix& ConfusionMatrix::operator+=(const ConfusionMatrix& other) {
  if (other.k_ != k_) throw DimensionError("cannot add confusion matrices of different size");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
  return *this;
}

ConfusionMatrix confusion(std::span<const ClassId> predicted, std::span<const ClassId> actual,
                          int k) {
  if (predicted.size() != actual.size())
    throw DimensionError("confusion: " + std::to_string(predicted.size()) + " predictions vs " +
                         std::to_string(actual.size()) + " labels");
  ConfusionMatrix cm(k);
  for (std::size_t i = 0; i < predicted.size(); ++i) cm.add(actual[i], predicted[i]);
  return cm;
}

Rates accuracy(const ConfusionMatrix& cm) {
  const auto total = cm.total();
  if (total == 0) throw DegenerateClassError("accuracy of an empty confusion matrix");
  Rates r;
  r.success = static_cast<double>(cm.trace()) / static_cast<double>(total);
  r.failure = 1.0 - r.success;
  return r;
}

RocCurve roc(std::span<const double> scores, const std::vector<bool>& positives) {
  if (scores.size() != positives.size())
    throw DimensionError("roc: scores and labels differ in length");
  const auto pos = static_cast<std::size_t>(std::count(positives.begin(), positives.end(), true));
  const auto neg = positives.size() - pos;
  if (pos == 0 || neg == 0) throw DegenerateClassError("roc needs both positive and negative samples");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve c;
  c.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity()});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    while (i < order.size() && scores[order[i]] == s) {
      positives[order[i]] ? ++tp : ++fp;
      ++i;
    }
    const RocPoint p{static_cast<double>(fp) / static_cast<double>(neg),
                     static_cast<double>(tp) / static_cast<double>(pos), s};
    const auto& prev = c.points.back();
    c.auc += (p.fpr - prev.fpr) * (p.tpr + prev.tpr) / 2.0;
    c.points.push_back(p);
  }
  return c;
}

RocCurve roc_one_vs_rest(const Matrix& outputs, std::span<const ClassId> labels, ClassId cls) {
  std::vector<double> scores(outputs.rows());
  std::vector<bool> positive(outputs.rows());
  for (std::size_t r = 0; r < outputs.rows(); ++r) {
    scores[r] = outputs(r, static_cast<std::size_t>(cls));
    positive[r] = labels[r] == cls;
  }
  return roc(scores, positive);
}

RocCurve roc_attack(const Matrix& outputs, std::span<const ClassId> labels) {
  std::vector<double> scores(outputs.rows());
  std::vector<bool> positive(outputs.rows());
  for (std::size_t r = 0; r < outputs.rows(); ++r) {
    scores[r] = 1.0 - outputs(r, 0);
    positive[r] = labels[r] != 0;
  }
  return roc(scores, positive);
}

std::string_view alarm_outcome_name(AlarmOutcome a) {
  switch (a) {
    case AlarmOutcome::true_positive: return "true_positive";
    case AlarmOutcome::false_positive: return "false_positive";
    case AlarmOutcome::false_negative: return "false_negative";
    case AlarmOutcome::true_negative: return "true_negative";
  }
  return "unknown";
}

AlarmOutcome alarm_outcome(ClassId predicted, ClassId actual) {
  const bool alarm = predicted != 0;
  const bool attack = actual != 0;
  if (alarm) return attack ? AlarmOutcome::true_positive : AlarmOutcome::false_positive;
  return attack ? AlarmOutcome::false_negative : AlarmOutcome::true_negative;
}

void AlarmTally::add(AlarmOutcome a) {
  switch (a) {
    case AlarmOutcome::true_positive: ++tp; break;
    case AlarmOutcome::false_positive: ++fp; break;
    case AlarmOutcome::false_negative: ++fn; break;
    case AlarmOutcome::true_negative: ++tn; break;
  }
}

AlarmTally& AlarmTally::operator+=(const AlarmTally& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  tn += o.tn;
  return *this;
}

AlarmTally alarm_tally(std::span<const ClassId> predicted, std::span<const ClassId> actual) {
  if (predicted.size() != actual.size()) throw DimensionError("alarm_tally: length mismatch");
  AlarmTally t;
  for (std::size_t i = 0; i < predicted.size(); ++i) t.add(alarm_outcome(predicted[i], actual[i]));
  return t;
}

EvaluationReport evaluate(const Network& net, const Dataset& partition, int k, std::string name) {
  if (partition.empty()) throw DegenerateClassError("cannot evaluate an empty partition");
  if (static_cast<std::size_t>(k) != net.layout.output_size)
    throw DimensionError("class count does not match the network output width");
  EvaluationReport rep;
  rep.partition = std::move(name);
  rep.samples = partition.size();

  const Matrix outputs = kernels::parallel::batch_forward(net, partition.features);
  rep.predicted.resize(partition.size());
  double sq = 0.0;
  for (std::size_t r = 0; r < outputs.rows(); ++r) {
    const auto y = outputs.row(r);
    rep.predicted[r] = argmax(y);
    for (std::size_t c = 0; c < y.size(); ++c) {
      const double e = y[c] - (static_cast<ClassId>(c) == partition.labels[r] ? 1.0 : 0.0);
      sq += e * e;
    }
  }
  rep.mse = sq / static_cast<double>(outputs.rows() * outputs.cols());
  rep.confusion = confusion(rep.predicted, partition.labels, k);
  rep.rates = accuracy(rep.confusion);
  rep.alarms = alarm_tally(rep.predicted, partition.labels);

  rep.class_roc.resize(static_cast<std::size_t>(k));
  for (ClassId c = 0; c < k; ++c) {
    try {
      rep.class_roc[static_cast<std::size_t>(c)] = roc_one_vs_rest(outputs, partition.labels, c);
    } catch (const DegenerateClassError&) {
    }
  }
  try {
    rep.attack_roc = roc_attack(outputs, partition.labels);
  } catch (const DegenerateClassError&) {
  }
  return rep;
}

Dataset concat(std::span<const Dataset* const> parts) {
  Dataset out;
  std::size_t n = 0;
  for (const auto* p : parts) n += p->size();
  if (!parts.empty()) out.features = Matrix(0, parts.front()->dim());
  out.features.reserve_rows(n);
  out.labels.reserve(n);
  for (const auto* p : parts)
    for (std::size_t r = 0; r < p->size(); ++r) out.push_back(p->row(r), p->labels[r]);
  return out;
}

}  // namespace idps
