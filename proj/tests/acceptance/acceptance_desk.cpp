// Desk-scale acceptance run: stratified 50,000-record sample of the KDD99 10%
// file, default training configuration, fixed seed. One PASS/FAIL line per
// criterion. Exits 77 (skipped) when the data file is absent.
//
//   acceptance_desk --data kddcup.data_10_percent
//   acceptance_desk --synthetic 120000     # generated surrogate records

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "idps/dataset.hpp"
#include "idps/eval.hpp"
#include "idps/fixedpoint.hpp"
#include "idps/kdd.hpp"
#include "idps/train.hpp"
#include "synthetic_kdd.hpp"

using namespace idps;
using Clock = std::chrono::steady_clock;

int main(int argc, char** argv) {
  CLI::App app{"desk-scale acceptance run"};
  std::string data;
  std::size_t synthetic = 0;
  std::size_t sample = 50000;
  std::uint64_t seed = 1;
  app.add_option("--data", data, "KDD99 10% file");
  app.add_option("--synthetic", synthetic, "use this many generated records instead");
  app.add_option("--sample", sample, "stratified sample size");
  app.add_option("--seed", seed, "split and training seed");
  CLI11_PARSE(app, argc, argv);

  const bool surrogate = synthetic > 0;
  if (!surrogate && (data.empty() || !std::filesystem::exists(data))) {
    std::cout << "SKIP desk-scale run: data file not found: " << data << '\n';
    return 77;
  }
  const std::string tag = surrogate ? "[synthetic surrogate] " : "";
  std::cout << "mode: "
            << (surrogate ? "synthetic surrogate records (not the KDD99 file)" : "KDD99 file " + data)
            << '\n';

  const auto t0 = Clock::now();
  FeatureSchema schema = FeatureSchema::kdd99();
  const auto taxonomy = AttackTaxonomy::kdd99();
  Dataset full;
  if (surrogate) {
    std::string text;
    for (const auto& l : synth::kdd_lines(synthetic, {seed, 0.02})) text += l + '\n';
    std::istringstream in(text);
    full = load_dataset(in, schema, taxonomy);
  } else {
    full = load_dataset(data, schema, taxonomy);
  }
  SplitSpec spec;
  spec.seed = seed;
  const auto picked = sample > 0 && sample < full.size() ? stratified_sample(full, sample, seed) : full;
  const auto split = split_dataset(picked, spec);
  const auto scaler = fit_scaler(split.train);
  const auto train_set = scaler.apply(split.train);
  const auto val_set = scaler.apply(split.val);
  const auto test_set = scaler.apply(split.test);

  TrainConfig cfg;
  cfg.seed = seed;
  const auto result = train(init_network(NetworkLayout{}, cfg.seed), train_set, val_set, cfg);
  const auto report = evaluate(result.network, test_set, kClassCount, "test");
  const auto q = quantize_network(result.network, FixedFormat{16, 12});
  const auto agreement = compare_paths(result.network, q, test_set).agreement();
  const double minutes = std::chrono::duration<double>(Clock::now() - t0).count() / 60.0;

  std::cout << "records " << full.size() << "  sample " << picked.size() << "  split "
            << split.train.size() << "/" << split.val.size() << "/" << split.test.size() << '\n'
            << "epochs " << result.history.last_epoch() << "  best_epoch "
            << result.history.best_epoch << "  stop "
            << stop_reason_name(result.history.stop_reason) << '\n';

  int failures = 0;
  auto line = [&](const std::string& name, bool ok, double value, const std::string& bound) {
    failures += !ok;
    std::cout << (ok ? "PASS " : "FAIL ") << tag << name << "  " << value << " (" << bound << ")\n";
  };
  const double auc = report.attack_roc ? report.attack_roc->auc : 0.0;
  line("desk_test_success_rate", report.rates.success >= 0.90, report.rates.success, ">= 0.90");
  line("desk_best_val_mse", result.history.best_val_mse <= 0.05, result.history.best_val_mse,
       "<= 0.05");
  line("desk_attack_auc", auc >= 0.95, auc, ">= 0.95");
  line("desk_fixed_point_agreement", agreement >= 0.99, agreement, ">= 0.99");
  line("desk_runtime_minutes", minutes < 15.0, minutes, "< 15");
  return failures == 0 ? 0 : 1;
}
