#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "idps/data.hpp"
#include "idps/mlp.hpp"

namespace idps {

struct TrainConfig {
  std::size_t max_epochs = 1000;
  std::size_t patience = 6;
  double goal_mse = 0.01;
  double learning_rate = 0.01;
  double momentum = 0.9;
  std::uint64_t seed = 1;
  std::size_t batch_size = 0;  // 0 = full batch

  /// Throws RangeError on patience < 1, learning_rate <= 0 or momentum
  /// outside [0, 1).
  void validate() const;
};

enum class StopReason { patience_exhausted, goal_reached, max_epochs };

std::string_view stop_reason_name(StopReason r);

// Index e of the MSE sequences is epoch e; epoch 0 holds the initial weights.
struct TrainHistory {
  std::vector<double> train_mse;
  std::vector<double> val_mse;
  std::size_t best_epoch = 0;
  double best_val_mse = 0.0;
  StopReason stop_reason = StopReason::max_epochs;

  std::size_t last_epoch() const { return val_mse.empty() ? 0 : val_mse.size() - 1; }
  std::string to_csv() const;

  friend bool operator==(const TrainHistory&, const TrainHistory&) = default;
};

struct TrainResult {
  Network network;  // weights from best_epoch
  TrainHistory history;
};

using ValidationFn = std::function<double(const Network&)>;
using EpochObserver = std::function<void(std::size_t epoch, const Network&)>;

/// Gradient descent with momentum on the training MSE.
///
/// After every epoch the validation loss is measured. An epoch whose loss is
/// above the best seen so far counts as a validation failure; training stops
/// once `patience` failures have accumulated since the best epoch, when the
/// training MSE reaches `goal_mse`, or after `max_epochs`. The returned
/// network always carries the best-epoch weights.
TrainResult train(Network net, const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& cfg, const EpochObserver& observer = {});

/// Same loop with a caller-supplied validation measure.
TrainResult train(Network net, const Dataset& train_set, const ValidationFn& validation,
                  const TrainConfig& cfg, const EpochObserver& observer = {});

}  // namespace idps
