#ifndef DYADIM_MARKOV_MEASURE_HPP
#define DYADIM_MARKOV_MEASURE_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dyadim/rng.hpp"
#include "dyadim/weights.hpp"

namespace dyadim {

// Finite binary address of a dyadic cylinder; generation == number of bits.
class CylinderAddress {
 public:
  CylinderAddress() = default;
  static CylinderAddress root() { return {}; }
  static CylinderAddress from_string(std::string_view bits);  // e.g. "0110"

  std::size_t generation() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  int bit(std::size_t i) const { return bits_[i]; }
  int last_bit() const { return bits_.back(); }

  void push_back(int bit);
  CylinderAddress child(int bit) const;
  std::string to_string() const;

  bool operator==(const CylinderAddress& other) const { return bits_ == other.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

// One sampled trajectory. increments[i] is the log of the conditional
// branch probability taken at generation i+1 (always <= 0, in nats);
// cumulative[i] is the log-mass of the generation-(i+1) cylinder visited.
struct PathTrace {
  CylinderAddress address;
  std::vector<double> increments;
  std::vector<double> cumulative;
};

// Markov measure on the dyadic tree driven by a weight sequence: the root
// splits (p_0, 1-p_0); below that, a cylinder of generation n ending in 0
// splits (p_n, 1-p_n) and one ending in 1 splits (q_n, 1-q_n).
class MarkovMeasure {
 public:
  explicit MarkovMeasure(WeightSequence w) : weights_(std::move(w)) {}

  const WeightSequence& weights() const { return weights_; }

  // log mass in nats; -inf encodes zero mass, the root has log mass 0.
  double cylinder_log_mass(const CylinderAddress& address) const;

  // Conditional probability of `next` given a generation-n parent ending in
  // `last` (n >= 1). The root split is exposed separately.
  double child_ratio(std::uint64_t n, int last, int next) const;
  double root_ratio(int bit) const;

  // (pi_n(0), pi_n(1)): total mass of generation-n cylinders by last symbol.
  std::pair<double, double> marginal_last_symbol(std::uint64_t n) const;
  // pi_n(0) for n = 1..horizon.
  std::vector<double> marginals_pi0(std::uint64_t horizon) const;

  PathTrace sample_path(std::uint64_t depth, SeededRng& rng) const;

 private:
  WeightSequence weights_;
};

}  // namespace dyadim

#endif
