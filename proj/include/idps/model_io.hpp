#pragma once

// Versioned text model file. Everything needed to classify raw records is
// stored: layout, activations, scaler, schema codes, taxonomy, the seeds and
// split used for training, and every parameter as shortest round-trip
// decimal text.

#include <filesystem>
#include <string>
#include <string_view>

#include "idps/dataset.hpp"
#include "idps/kdd.hpp"
#include "idps/mlp.hpp"
#include "idps/train.hpp"

namespace idps {

inline constexpr std::string_view kModelMagic = "idps-model";
inline constexpr int kModelVersion = 1;

struct TrainedModel {
  Network network;
  Scaler scaler;
  FeatureSchema schema = FeatureSchema::kdd99();
  AttackTaxonomy taxonomy = AttackTaxonomy::kdd99();
  SplitSpec split;
  std::size_t sample_size = 0;  // stratified subsample taken before the split; 0 = none
  TrainConfig train_config;

  /// Parse, encode, scale: a raw feature field array as network input.
  std::vector<double> prepare(const std::array<std::string, kFeatureCount>& fields) const;
};

std::string model_to_text(const TrainedModel& model);
TrainedModel model_from_text(std::string_view text);

void save_model(const std::filesystem::path& path, const TrainedModel& model);
TrainedModel load_model(const std::filesystem::path& path);

}  // namespace idps
