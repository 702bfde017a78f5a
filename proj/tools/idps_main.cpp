// idps: command-line front end for the detection and prevention pipeline.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "idps/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Neural-network intrusion detection and prevention pipeline"};
  app.set_config("--config", "", "TOML/INI file with option values; command-line flags win");

  idps::RunConfig cfg;
  std::string data, schema, taxonomy, model, out;
  std::string split = "0.70,0.15,0.15";
  std::string hidden = "20";
  std::string format = "q4.12";
  bool no_shuffle = false;

  app.add_option("command", cfg.command, "prep | train | eval | roc | quantize | compare | detect")
      ->required()
      ->check(CLI::IsMember({"prep", "train", "eval", "roc", "quantize", "compare", "detect"}));
  app.add_option("--data", data,
                 "KDD99-format record file, a prep output directory, or - for stdin (detect)");
  app.add_option("--schema", schema, "feature schema file (default: built-in KDD99 schema)");
  app.add_option("--taxonomy", taxonomy, "attack taxonomy file (default: built-in table)");
  app.add_option("--model", model, "model file for eval, roc, quantize, compare and detect");
  app.add_option("--out", out, "output directory (created if absent)");
  app.add_option("--seed", cfg.seed, "seed for sampling, splitting and weight init")
      ->capture_default_str();
  app.add_option("--split", split, "train,validation,test fractions")->capture_default_str();
  app.add_option("--hidden", hidden, "hidden layer widths, comma separated")
      ->capture_default_str();
  app.add_option("--lr", cfg.train.learning_rate, "learning rate")->capture_default_str();
  app.add_option("--momentum", cfg.train.momentum, "momentum coefficient")->capture_default_str();
  app.add_option("--patience", cfg.train.patience, "validation failures before stopping")
      ->capture_default_str();
  app.add_option("--goal-mse", cfg.train.goal_mse, "stop once training MSE reaches this")
      ->capture_default_str();
  app.add_option("--max-epochs", cfg.train.max_epochs, "epoch limit")->capture_default_str();
  app.add_option("--batch-size", cfg.train.batch_size, "mini-batch size, 0 for full batch")
      ->capture_default_str();
  app.add_option("--sample", cfg.sample,
                 "stratified subsample size taken before splitting, 0 for all records")
      ->capture_default_str();
  app.add_option("--partition", cfg.partition, "partition for roc and compare")
      ->check(CLI::IsMember({"train", "val", "validation", "test"}))
      ->capture_default_str();
  app.add_option("--format", format, "fixed-point format, e.g. q4.12")->capture_default_str();
  app.add_flag("--strict", cfg.strict, "reject symbolic values missing from the schema");
  app.add_flag("--no-shuffle", no_shuffle, "split in file order");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // help and version requests exit 0, usage errors exit 2
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    cfg.data = data;
    cfg.schema = schema;
    cfg.taxonomy = taxonomy;
    cfg.model = model;
    cfg.out = out;
    if (auto* c = app.get_config_ptr(); c && c->count() > 0) cfg.config_file = c->as<std::string>();
    idps::parse_split(split, cfg.split);
    cfg.split.seed = cfg.seed;
    cfg.split.shuffle = !no_shuffle;
    cfg.train.seed = cfg.seed;
    cfg.hidden = idps::parse_hidden(hidden);
    cfg.format = idps::FixedFormat::parse(format);
    cfg.train.validate();
  } catch (const std::exception& e) {
    std::cerr << "idps: " << cfg.command << ": configure: " << e.what() << '\n';
    return 2;
  }
  return idps::run(cfg, std::cin, std::cout, std::cerr);
}
