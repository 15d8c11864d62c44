#ifndef DYADIM_WEIGHTS_HPP
#define DYADIM_WEIGHTS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

namespace dyadim {

// One generation's branching weights. p drives the next symbol after a 0,
// q after a 1; index 0 supplies the root split (only p is consulted there).
struct WeightPair {
  double p{0.0};
  double q{0.0};
};

enum class WeightKind { Constant, Periodic, Explicit, Generator };

// A total map n -> (p_n, q_n) with all values in [0, 1]. Constant, periodic
// and explicit-with-tail sequences are stored structurally (finite prefix +
// repeating cycle), which keeps sup-distance queries exact; generator-backed
// sequences are opaque rules and only support horizon-limited queries.
class WeightSequence {
 public:
  using Rule = std::function<WeightPair(std::uint64_t)>;

  // Constant all-zero sequence; placeholder value so result structs that
  // carry a sequence stay default-constructible.
  WeightSequence() : cycle_{WeightPair{0.0, 0.0}} {}

  static WeightSequence constant(double p, double q);
  static WeightSequence periodic(std::vector<WeightPair> cycle);
  static WeightSequence explicit_with_tail(std::vector<WeightPair> prefix, WeightPair tail);
  static WeightSequence explicit_with_tail(std::vector<WeightPair> prefix,
                                           std::vector<WeightPair> tail_cycle);
  static WeightSequence from_rule(Rule rule);
  // Materializes `length` pairs uniformly from [lo, hi) x [lo, hi) and
  // repeats them, so the result behaves like an explicit finite sequence.
  static WeightSequence random_uniform(std::size_t length, std::uint64_t seed, double lo = 0.0,
                                       double hi = 1.0);

  WeightPair at(std::uint64_t n) const;

  WeightKind kind() const { return kind_; }
  bool eventually_periodic() const { return kind_ != WeightKind::Generator; }
  const std::vector<WeightPair>& prefix() const { return prefix_; }
  const std::vector<WeightPair>& cycle() const { return cycle_; }
  std::optional<std::uint64_t> seed() const { return seed_; }

 private:
  WeightKind kind_{WeightKind::Constant};
  std::vector<WeightPair> prefix_;  // consumed before the cycle starts
  std::vector<WeightPair> cycle_;   // repeats forever; empty only for Generator
  Rule rule_;
  std::optional<std::uint64_t> seed_;
};

struct LinfDistance {
  double value{0.0};
  // True when the sup over all indices was established structurally
  // (both sequences eventually periodic); false means horizon-limited.
  bool exact{false};
};

LinfDistance linf_distance(const WeightSequence& a, const WeightSequence& b,
                           std::uint64_t horizon);

enum class PerturbMode { UniformShift, SeededRandom };

struct Perturbation {
  WeightSequence sequence;
  // sup_n max(|p'_n - p_n|, |q'_n - q_n|); exact for structural kinds,
  // horizon-limited for generator-backed input.
  double realized_distance{0.0};
  bool realized_exact{false};
  bool clamped{false};
};

// Shifts every coordinate by +zeta (UniformShift) or by an independent
// seeded draw from [-zeta, zeta] (SeededRandom), clamping into [0, 1].
// Structural kinds are perturbed slot-wise so the kind is preserved.
Perturbation perturb(const WeightSequence& w, double zeta, PerturbMode mode, std::uint64_t seed);

}  // namespace dyadim

#endif
