#include "idps/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "idps/digest.hpp"
#include "idps/engine.hpp"
#include "idps/eval.hpp"
#include "idps/kdd.hpp"
#include "idps/model_io.hpp"
#include "idps/report.hpp"
#include "idps/text_io.hpp"

namespace idps {

namespace fs = std::filesystem;

StageError::StageError(std::string stage, const std::string& what)
    : Error(stage + ": " + what), stage_(std::move(stage)) {}

void parse_split(std::string_view text, SplitSpec& spec) {
  const auto parts = text::split(text, ',');
  if (parts.size() != 3) throw RangeError("--split needs three comma-separated fractions");
  double f[3];
  for (int i = 0; i < 3; ++i) {
    const auto v = text::parse_double(parts[static_cast<std::size_t>(i)]);
    if (!v) throw RangeError("bad split fraction '" + std::string(parts[static_cast<std::size_t>(i)]) + "'");
    f[i] = *v;
  }
  spec.train_fraction = f[0];
  spec.val_fraction = f[1];
  spec.test_fraction = f[2];
  spec.validate();
}

std::vector<std::size_t> parse_hidden(std::string_view text) {
  std::vector<std::size_t> sizes;
  for (auto p : text::split(text, ',')) {
    const auto v = text::parse_int(p);
    if (!v || *v < 1) throw RangeError("bad hidden layer size '" + std::string(p) + "'");
    sizes.push_back(static_cast<std::size_t>(*v));
  }
  return sizes;
}

namespace {

constexpr const char* kPartitionFiles[] = {"train.csv", "val.csv", "test.csv"};

template <class F>
auto stage(const std::string& name, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(name, e.what());
  }
}

bool is_prep_dir(const fs::path& p) { return fs::is_directory(p); }

std::string data_digest(const fs::path& p) {
  if (!is_prep_dir(p)) return sha256_file(p);
  std::string all;
  for (const char* f : kPartitionFiles) all += sha256_file(p / f);
  return sha256_hex(all);
}

std::string join_sizes(const std::vector<std::size_t>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

struct Partitions {
  Split split;
  FeatureSchema schema = FeatureSchema::kdd99();
  AttackTaxonomy taxonomy = AttackTaxonomy::kdd99();
};

AttackTaxonomy taxonomy_from(const RunConfig& cfg) {
  return cfg.taxonomy.empty() ? AttackTaxonomy::kdd99() : AttackTaxonomy::load(cfg.taxonomy);
}

FeatureSchema schema_from(const RunConfig& cfg) {
  return cfg.schema.empty() ? FeatureSchema::kdd99() : FeatureSchema::load(cfg.schema);
}

void require_data(const RunConfig& cfg) {
  if (cfg.data.empty()) throw Error("--data is required");
  if (!fs::exists(cfg.data)) throw Error("no such input: " + cfg.data.string());
}

// Raw files are encoded, optionally subsampled and split; a prep directory
// is read back as-is.
Partitions load_partitions(const RunConfig& cfg, FeatureSchema schema, AttackTaxonomy taxonomy,
                           const SplitSpec& spec, std::size_t sample) {
  stage("load data", [&] { require_data(cfg); });
  Partitions p;
  p.taxonomy = std::move(taxonomy);
  if (is_prep_dir(cfg.data)) {
    stage("load data", [&] {
      p.split.train = read_dataset_csv(cfg.data / kPartitionFiles[0]);
      p.split.val = read_dataset_csv(cfg.data / kPartitionFiles[1]);
      p.split.test = read_dataset_csv(cfg.data / kPartitionFiles[2]);
      p.schema = fs::exists(cfg.data / "schema.txt") ? FeatureSchema::load(cfg.data / "schema.txt")
                                                      : std::move(schema);
    });
    return p;
  }
  p.schema = std::move(schema);
  const auto full = stage("load data", [&] {
    LoadOptions opts;
    opts.mode = cfg.strict ? EncodeMode::strict : EncodeMode::permissive;
    return load_dataset(cfg.data, p.schema, p.taxonomy, opts);
  });
  stage("split", [&] {
    p.split = split_dataset(sample > 0 ? stratified_sample(full, sample, spec.seed) : full, spec);
  });
  return p;
}

const Dataset& pick_partition(const Split& s, const std::string& name) {
  if (name == "train") return s.train;
  if (name == "val" || name == "validation") return s.val;
  if (name == "test") return s.test;
  throw RangeError("unknown partition '" + name + "' (train, validation or test)");
}

std::string canonical_partition(const std::string& name) {
  return name == "val" ? "validation" : name;
}

TrainedModel require_model(const RunConfig& cfg) {
  if (cfg.model.empty()) throw StageError("load model", "--model is required");
  return stage("load model", [&] { return load_model(cfg.model); });
}

void require_out(const RunConfig& cfg) {
  if (cfg.out.empty()) throw StageError("configure", "--out is required");
}

void write_manifest(const RunConfig& cfg) {
  stage("write manifest",
        [&] { text::write_file_atomic(cfg.out / "run_manifest.txt", run_manifest(cfg)); });
}

// Model-bound commands rebuild the model's partitions: same schema codes,
// taxonomy, subsample and split.
Partitions model_partitions(const RunConfig& cfg, const TrainedModel& m) {
  return load_partitions(cfg, m.schema, m.taxonomy, m.split, m.sample_size);
}

void cmd_prep(const RunConfig& cfg, std::ostream& out) {
  require_out(cfg);
  auto p = load_partitions(cfg, stage("load schema", [&] { return schema_from(cfg); }),
                           stage("load taxonomy", [&] { return taxonomy_from(cfg); }), cfg.split,
                           cfg.sample);
  stage("write outputs", [&] {
    for (int i = 0; i < 3; ++i) {
      const Dataset* parts[] = {&p.split.train, &p.split.val, &p.split.test};
      write_dataset_csv(cfg.out / kPartitionFiles[i], *parts[i]);
    }
    text::write_file_atomic(cfg.out / "schema.txt", p.schema.to_text());
    text::write_file_atomic(cfg.out / "taxonomy.txt", p.taxonomy.to_text());
    text::write_file_atomic(cfg.out / "split_report.txt", split_report_text(p.split));
    text::write_file_atomic(cfg.out / "split_report.csv", split_report_csv(p.split));
  });
  write_manifest(cfg);
  out << split_report_text(p.split);
}

void cmd_train(const RunConfig& cfg, std::ostream& out) {
  require_out(cfg);
  auto p = load_partitions(cfg, stage("load schema", [&] { return schema_from(cfg); }),
                           stage("load taxonomy", [&] { return taxonomy_from(cfg); }), cfg.split,
                           cfg.sample);
  TrainedModel model;
  model.schema = p.schema;
  model.taxonomy = p.taxonomy;
  model.split = cfg.split;
  model.sample_size = is_prep_dir(cfg.data) ? 0 : cfg.sample;
  model.train_config = cfg.train;

  const auto result = stage("train", [&] {
    model.scaler = fit_scaler(p.split.train);
    const auto train_set = model.scaler.apply(p.split.train);
    const auto val_set = model.scaler.apply(p.split.val);
    NetworkLayout layout;
    layout.input_size = train_set.dim();
    layout.hidden_sizes = cfg.hidden;
    layout.output_size = kClassCount;
    return train(init_network(layout, cfg.train.seed), train_set, val_set, cfg.train);
  });
  model.network = result.network;

  stage("write outputs", [&] {
    save_model(cfg.out / "model.txt", model);
    text::write_file_atomic(cfg.out / "history.csv", result.history.to_csv());
  });
  write_manifest(cfg);
  const auto& h = result.history;
  out << "epochs " << h.last_epoch() << "  best_epoch " << h.best_epoch << "  best_val_mse "
      << text::format_double(h.best_val_mse) << "  stop " << stop_reason_name(h.stop_reason)
      << '\n';
}

std::vector<EvaluationReport> evaluate_all(const TrainedModel& m, const Split& s) {
  std::vector<EvaluationReport> reports;
  reports.push_back(evaluate(m.network, m.scaler.apply(s.train), kClassCount, "train"));
  reports.push_back(evaluate(m.network, m.scaler.apply(s.val), kClassCount, "validation"));
  reports.push_back(evaluate(m.network, m.scaler.apply(s.test), kClassCount, "test"));
  return reports;
}

void cmd_eval(const RunConfig& cfg, std::ostream& out, bool roc_only) {
  require_out(cfg);
  const auto model = require_model(cfg);
  const auto p = model_partitions(cfg, model);
  const auto name = canonical_partition(cfg.partition);
  if (roc_only) {
    const auto report = stage("evaluate", [&] {
      return evaluate(model.network, model.scaler.apply(pick_partition(p.split, name)),
                      kClassCount, name);
    });
    stage("write outputs", [&] { write_roc(cfg.out, report); });
    write_manifest(cfg);
    if (report.attack_roc)
      out << "attack auc " << text::format_double(report.attack_roc->auc) << '\n';
    return;
  }
  const auto reports = stage("evaluate", [&] { return evaluate_all(model, p.split); });
  const auto& chosen =
      *std::find_if(reports.begin(), reports.end(), [&](const auto& r) { return r.partition == name; });
  stage("write outputs", [&] {
    write_evaluation(cfg.out, reports);
    text::write_file_atomic(cfg.out / "evaluation.txt", evaluation_text(reports));
    write_roc(cfg.out, chosen);
  });
  write_manifest(cfg);
  out << evaluation_text(reports);
}

void cmd_quantize(const RunConfig& cfg, std::ostream& out) {
  require_out(cfg);
  const auto model = require_model(cfg);
  const auto q = stage("quantize", [&] {
    return quantize_network(model.network, cfg.format, sha256_file(cfg.model));
  });
  stage("write outputs", [&] { save_qnetwork(cfg.out / "qmodel.txt", q); });
  write_manifest(cfg);
  out << "quantized " << q.layers.size() << " layers to " << q.format.name() << '\n';
}

void cmd_compare(const RunConfig& cfg, std::ostream& out) {
  require_out(cfg);
  const auto model = require_model(cfg);
  const auto q = stage("quantize", [&] {
    return quantize_network(model.network, cfg.format, sha256_file(cfg.model));
  });
  const auto p = model_partitions(cfg, model);
  const auto name = canonical_partition(cfg.partition);
  const auto report = stage("compare", [&] {
    return compare_paths(model.network, q, model.scaler.apply(pick_partition(p.split, name)));
  });
  std::ostringstream summary;
  summary << "partition " << name << '\n'
          << "format " << q.format.name() << '\n'
          << "samples " << report.float_class.size() << '\n'
          << "matches " << report.matches() << '\n'
          << "agreement " << std::fixed << std::setprecision(6) << report.agreement() << '\n';
  stage("write outputs", [&] {
    text::write_file_atomic(cfg.out / "agreement.csv", report.to_csv());
    text::write_file_atomic(cfg.out / "agreement_summary.txt", summary.str());
  });
  write_manifest(cfg);
  out << summary.str();
}

void cmd_detect(const RunConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err) {
  const auto model = require_model(cfg);
  std::ifstream file;
  std::istream* source = &in;
  if (!cfg.data.empty() && cfg.data != "-") {
    file.open(cfg.data);
    if (!file) throw StageError("open stream", "cannot read " + cfg.data.string());
    source = &file;
  }
  const auto summary = stage("detect", [&] {
    return process_stream(*source, model, Policy::standard(),
                          [&](const Verdict& v) { out << format_verdict(v) << '\n'; });
  });
  out.flush();
  err << summary.to_text();
  if (!cfg.out.empty()) write_manifest(cfg);
}

}  // namespace

std::string run_manifest(const RunConfig& cfg) {
  std::map<std::string, std::string> kv;
  kv["command"] = cfg.command;
  kv["seed"] = std::to_string(cfg.seed);
  kv["split"] = text::format_double(cfg.split.train_fraction) + "," +
                text::format_double(cfg.split.val_fraction) + "," +
                text::format_double(cfg.split.test_fraction);
  kv["split_seed"] = std::to_string(cfg.split.seed);
  kv["shuffle"] = cfg.split.shuffle ? "true" : "false";
  kv["sample"] = std::to_string(cfg.sample);
  kv["hidden"] = join_sizes(cfg.hidden);
  kv["lr"] = text::format_double(cfg.train.learning_rate);
  kv["momentum"] = text::format_double(cfg.train.momentum);
  kv["patience"] = std::to_string(cfg.train.patience);
  kv["goal_mse"] = text::format_double(cfg.train.goal_mse);
  kv["max_epochs"] = std::to_string(cfg.train.max_epochs);
  kv["batch_size"] = std::to_string(cfg.train.batch_size);
  kv["train_seed"] = std::to_string(cfg.train.seed);
  kv["format"] = cfg.format.name();
  kv["strict"] = cfg.strict ? "true" : "false";
  kv["partition"] = canonical_partition(cfg.partition);

  auto input = [&](const std::string& key, const fs::path& p, auto digest) {
    kv[key] = p.string();
    if (!p.empty() && p != "-" && fs::exists(p)) kv[key + "_sha256"] = digest(p);
  };
  input("data", cfg.data, data_digest);
  input("schema", cfg.schema, [](const fs::path& p) { return sha256_file(p); });
  input("taxonomy", cfg.taxonomy, [](const fs::path& p) { return sha256_file(p); });
  input("model", cfg.model, [](const fs::path& p) { return sha256_file(p); });
  input("config", cfg.config_file, [](const fs::path& p) { return sha256_file(p); });

  std::string s;
  for (const auto& [k, v] : kv) s += k + "=" + v + "\n";
  return s;
}

int run(const RunConfig& cfg, std::istream& in, std::ostream& out, std::ostream& err) {
  try {
    if (cfg.command == "prep") {
      cmd_prep(cfg, out);
    } else if (cfg.command == "train") {
      cmd_train(cfg, out);
    } else if (cfg.command == "eval") {
      cmd_eval(cfg, out, false);
    } else if (cfg.command == "roc") {
      cmd_eval(cfg, out, true);
    } else if (cfg.command == "quantize") {
      cmd_quantize(cfg, out);
    } else if (cfg.command == "compare") {
      cmd_compare(cfg, out);
    } else if (cfg.command == "detect") {
      cmd_detect(cfg, in, out, err);
    } else {
      throw StageError("configure", "unknown command '" + cfg.command + "'");
    }
  } catch (const StageError& e) {
    err << "idps: " << cfg.command << ": " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "idps: " << cfg.command << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace idps
