#ifndef EVPLANE_HARNESS_CONFIG_HPP
#define EVPLANE_HARNESS_CONFIG_HPP

#include "evplane/data/binary_image.hpp"
#include "evplane/data/gaussian.hpp"
#include "evplane/data/yin_yang.hpp"
#include "evplane/divergence/class_conditional.hpp"
#include "evplane/nn/adam.hpp"
#include "evplane/snn/lif.hpp"

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace evplane::harness {

enum class DatasetKind { gaussian, binary_image, yin_yang, mnist };
enum class ModelKind { dense, spiking, linear };

const char* to_string(DatasetKind kind);
const char* to_string(ModelKind kind);

struct DatasetBlock {
  DatasetKind kind = DatasetKind::gaussian;
  data::GaussianSpec gaussian;
  data::BinaryImageSpec binary_image;
  int binary_samples_per_class = 10000;
  data::YinYangSpec yin_yang;
  std::string mnist_train_images, mnist_train_labels, mnist_test_images, mnist_test_labels;
  double test_fraction = 0.2;  // ignored for mnist, which ships its own test set
};

struct ModelBlock {
  ModelKind kind = ModelKind::dense;
  std::vector<int> hidden{64, 32, 16, 8};  // unused by linear
};

struct EstimationBlock {
  divergence::KnnEstimatorConfig knn;
  int max_per_class = 5000;
  bool estimate_dinp = true;
  int dinp_max_per_class = 5000;
};

struct AnalysisBlock {
  std::vector<int> vote_n{1, 3, 5, 7, 9};
  int vote_groups = 10000;
  std::vector<double> noise_sigmas;  // empty: no sweep
  int alpha_grid = 99;
  double region_tol_bits = 3.0;
};

struct ExperimentConfig {
  std::optional<std::uint64_t> seed;
  std::string output_dir = "runs/default";
  DatasetBlock dataset;
  ModelBlock model;
  nn::TrainingConfig training;
  snn::SNNConfig snn;  // only its neuron fields; optimizer settings come from `training`
  EstimationBlock estimation;
  AnalysisBlock analysis;

  /// Cross-field checks; throws ConfigError.
  void validate() const;
};

/// `key = value` per line, `#` starts a comment. Unknown or repeated keys and
/// malformed values raise ConfigError with the line number. Cross-field
/// checks, including the required seed, are left to validate().
ExperimentConfig parse_config(std::istream& in, const std::string& origin = "<config>");
ExperimentConfig load_config(const std::string& path);

/// Every key with its resolved value, in the canonical key order.
std::vector<std::pair<std::string, std::string>> config_entries(const ExperimentConfig& cfg);

}  // namespace evplane::harness

#endif  // EVPLANE_HARNESS_CONFIG_HPP
