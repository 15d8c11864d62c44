#ifndef DYADIM_CONFIG_HPP
#define DYADIM_CONFIG_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyadim/weights.hpp"

namespace dyadim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Declarative weight-sequence description as it appears in config files.
struct WeightsDecl {
  std::string kind;                // constant | periodic | explicit | random
  std::vector<WeightPair> pairs;   // constant: one; periodic/explicit: list
  std::string tail_kind;           // explicit only: constant | periodic
  std::vector<WeightPair> tail;    // explicit only
  std::uint64_t seed{0};           // random only
  std::uint64_t period{0};         // random only: materialized length

  WeightSequence build() const;
};

// Fully resolved experiment description. Parsing is strict: unknown keys,
// malformed values and out-of-range probabilities are rejected with the
// offending key named. Defaults are applied for absent numeric keys and the
// resolved values (defaults included) are what the manifest echoes.
struct ExperimentConfig {
  std::string command;
  WeightsDecl weights;

  std::uint64_t horizon{10000};
  std::uint64_t window{1000};
  std::uint64_t depth{10000};
  std::uint64_t paths{200};
  std::uint64_t seed{0};
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> zetas;
  std::string perturb_mode{"uniform-shift"};  // or "seeded-random"
  double epsilon{0.0};
  double delta{0.0};
  std::uint64_t stages{0};
  double grid_step{0.01};
  std::uint64_t n_max{32};
  std::uint64_t k_max{64};
  std::string output_dir{"out"};
  bool oracle{false};

  bool has_weights{false};
};

// Accepts the line-oriented `[section]` / `key = value` format or a JSON
// object {"experiment": {...}, "weights": {...}}; the file is treated as
// JSON when its first non-space character is '{'.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text, const std::string& origin);

// Resolved-config echo used for the manifest; timestamps are added by the
// runner so this string is byte-stable for identical inputs.
std::string config_to_json(const ExperimentConfig& config);

}  // namespace dyadim

#endif
