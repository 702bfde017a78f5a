#include "idps/train.hpp"

#include <cmath>
#include <sstream>

#include "idps/error.hpp"
#include "idps/kernels.hpp"
#include "idps/random.hpp"
#include "idps/text_io.hpp"

namespace idps {

void TrainConfig::validate() const {
  if (patience < 1) throw RangeError("patience must be at least 1");
  if (!(learning_rate > 0.0)) throw RangeError("learning rate must be positive");
  if (!(momentum >= 0.0 && momentum < 1.0)) throw RangeError("momentum must lie in [0, 1)");
  if (!(goal_mse >= 0.0)) throw RangeError("goal MSE must be non-negative");
}

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::patience_exhausted: return "patience_exhausted";
    case StopReason::goal_reached: return "goal_reached";
    case StopReason::max_epochs: return "max_epochs";
  }
  return "unknown";
}

std::string TrainHistory::to_csv() const {
  std::ostringstream os;
  os << "epoch,train_mse,val_mse\n";
  for (std::size_t e = 0; e < val_mse.size(); ++e)
    os << e << ',' << text::format_double(train_mse[e]) << ',' << text::format_double(val_mse[e])
       << '\n';
  return os.str();
}

namespace {

void momentum_step(Network& net, Gradient& velocity, const Gradient& grad, double lr,
                   double momentum) {
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    auto w = net.layers[l].weights.values();
    auto vw = velocity.layers[l].weights.values();
    const auto gw = grad.layers[l].weights.values();
    for (std::size_t i = 0; i < w.size(); ++i) {
      vw[i] = momentum * vw[i] - lr * gw[i];
      w[i] += vw[i];
    }
    auto& b = net.layers[l].bias;
    auto& vb = velocity.layers[l].bias;
    const auto& gb = grad.layers[l].bias;
    for (std::size_t i = 0; i < b.size(); ++i) {
      vb[i] = momentum * vb[i] - lr * gb[i];
      b[i] += vb[i];
    }
  }
}

}  // namespace

TrainResult train(Network net, const Dataset& train_set, const ValidationFn& validation,
                  const TrainConfig& cfg, const EpochObserver& observer) {
  cfg.validate();
  if (train_set.empty()) throw DegenerateSplitError("training partition is empty");

  const bool full_batch = cfg.batch_size == 0 || cfg.batch_size >= train_set.size();
  Rng batch_rng(cfg.seed);
  auto velocity = Gradient::zeros_like(net);

  TrainResult result;
  auto& h = result.history;

  // Full batch: the gradient pass at the current weights also yields their
  // training loss, so one kernel call per epoch covers both.
  kernels::BatchGradient pending;
  auto measure_train = [&]() {
    if (full_batch) {
      pending = kernels::parallel::batch_gradient(net, train_set);
      return pending.loss;
    }
    return kernels::parallel::batch_mse(net, train_set);
  };

  std::size_t failures = 0;
  for (std::size_t epoch = 0;; ++epoch) {
    if (epoch > 0) {
      if (full_batch) {
        momentum_step(net, velocity, pending.grad, cfg.learning_rate, cfg.momentum);
      } else {
        const auto order = batch_rng.permutation(train_set.size());
        for (std::size_t start = 0; start < order.size(); start += cfg.batch_size) {
          const auto len = std::min(cfg.batch_size, order.size() - start);
          const auto g = kernels::parallel::batch_gradient(
              net, train_set, std::span<const std::size_t>(order.data() + start, len));
          momentum_step(net, velocity, g.grad, cfg.learning_rate, cfg.momentum);
        }
      }
    }

    const double train_mse = measure_train();
    const double val_mse = validation(net);
    if (!std::isfinite(train_mse) || !std::isfinite(val_mse) || !net.all_finite())
      throw TrainingDivergedError(epoch);
    h.train_mse.push_back(train_mse);
    h.val_mse.push_back(val_mse);
    if (observer) observer(epoch, net);

    if (epoch == 0 || val_mse < h.best_val_mse) {
      h.best_val_mse = val_mse;
      h.best_epoch = epoch;
      result.network = net;
      failures = 0;
    } else if (val_mse > h.best_val_mse) {
      ++failures;
    }

    if (train_mse <= cfg.goal_mse) {
      h.stop_reason = StopReason::goal_reached;
      break;
    }
    if (failures >= cfg.patience) {
      h.stop_reason = StopReason::patience_exhausted;
      break;
    }
    if (epoch >= cfg.max_epochs) {
      h.stop_reason = StopReason::max_epochs;
      break;
    }
  }
  return result;
}

TrainResult train(Network net, const Dataset& train_set, const Dataset& val_set,
                  const TrainConfig& cfg, const EpochObserver& observer) {
  if (val_set.empty()) throw DegenerateSplitError("validation partition is empty");
  return train(
      std::move(net), train_set,
      [&](const Network& n) { return kernels::parallel::batch_mse(n, val_set); }, cfg, observer);
}

}  // namespace idps
