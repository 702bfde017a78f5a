#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "idps/kdd.hpp"
#include "idps/model_io.hpp"
#include "idps/train.hpp"
#include "synthetic_kdd.hpp"

namespace idps::testing {

struct ModelFixture {
  std::vector<std::string> lines;
  Dataset raw;       // encoded, unscaled, file order
  TrainedModel model;
};

/// A small model trained briefly on synthetic records.
inline ModelFixture make_model_fixture(std::size_t n = 3000, std::size_t epochs = 40,
                                       std::uint64_t seed = 3) {
  ModelFixture f;
  f.lines = synth::kdd_lines(n, {seed, 0.02});
  std::string joined;
  for (const auto& l : f.lines) joined += l + '\n';
  std::istringstream in(joined);
  f.raw = load_dataset(in, f.model.schema, f.model.taxonomy);
  f.model.split.seed = seed;
  const auto split = split_dataset(f.raw, f.model.split);
  f.model.scaler = fit_scaler(split.train);
  f.model.train_config.max_epochs = epochs;
  f.model.train_config.learning_rate = 0.5;
  auto net = init_network(NetworkLayout{}, seed);
  f.model.network = train(std::move(net), f.model.scaler.apply(split.train),
                          f.model.scaler.apply(split.val), f.model.train_config)
                        .network;
  return f;
}

}  // namespace idps::testing
