#include "dyadim/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dyadim/rng.hpp"

namespace dyadim {

namespace {

void check_probability(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

void check_pairs(const std::vector<WeightPair>& pairs, const char* what) {
  if (pairs.empty()) {
    throw std::invalid_argument(std::string(what) + " must not be empty");
  }
  for (const auto& pair : pairs) {
    check_probability(pair.p, what);
    check_probability(pair.q, what);
  }
}

double pair_distance(const WeightPair& a, const WeightPair& b) {
  return std::max(std::abs(a.p - b.p), std::abs(a.q - b.q));
}

}  // namespace

WeightSequence WeightSequence::constant(double p, double q) {
  check_probability(p, "constant weight p");
  check_probability(q, "constant weight q");
  WeightSequence w;
  w.kind_ = WeightKind::Constant;
  w.cycle_ = {WeightPair{p, q}};
  return w;
}

WeightSequence WeightSequence::periodic(std::vector<WeightPair> cycle) {
  check_pairs(cycle, "periodic cycle");
  WeightSequence w;
  w.kind_ = cycle.size() == 1 ? WeightKind::Constant : WeightKind::Periodic;
  w.cycle_ = std::move(cycle);
  return w;
}

WeightSequence WeightSequence::explicit_with_tail(std::vector<WeightPair> prefix,
                                                  WeightPair tail) {
  return explicit_with_tail(std::move(prefix), std::vector<WeightPair>{tail});
}

WeightSequence WeightSequence::explicit_with_tail(std::vector<WeightPair> prefix,
                                                  std::vector<WeightPair> tail_cycle) {
  check_pairs(prefix, "explicit prefix");
  check_pairs(tail_cycle, "explicit tail");
  WeightSequence w;
  w.kind_ = WeightKind::Explicit;
  w.prefix_ = std::move(prefix);
  w.cycle_ = std::move(tail_cycle);
  return w;
}

WeightSequence WeightSequence::from_rule(Rule rule) {
  if (!rule) {
    throw std::invalid_argument("generator rule must be callable");
  }
  WeightSequence w;
  w.kind_ = WeightKind::Generator;
  w.rule_ = std::move(rule);
  return w;
}

WeightSequence WeightSequence::random_uniform(std::size_t length, std::uint64_t seed, double lo,
                                              double hi) {
  if (length == 0) {
    throw std::invalid_argument("random weight sequence needs length >= 1");
  }
  if (!(lo >= 0.0 && hi <= 1.0 && lo < hi)) {
    throw std::invalid_argument("random weight range must satisfy 0 <= lo < hi <= 1");
  }
  SeededRng rng(seed);
  std::vector<WeightPair> pairs(length);
  for (auto& pair : pairs) {
    pair.p = rng.uniform(lo, hi);
    pair.q = rng.uniform(lo, hi);
  }
  WeightSequence w = periodic(std::move(pairs));
  w.seed_ = seed;
  return w;
}

WeightPair WeightSequence::at(std::uint64_t n) const {
  if (kind_ == WeightKind::Generator) {
    WeightPair pair = rule_(n);
    check_probability(pair.p, "generated weight p");
    check_probability(pair.q, "generated weight q");
    return pair;
  }
  if (n < prefix_.size()) {
    return prefix_[n];
  }
  return cycle_[(n - prefix_.size()) % cycle_.size()];
}

namespace {

// Indices [0, prefix_len + lcm(cycles)) exhaust all value pairs of two
// eventually periodic sequences; past that point the comparison repeats.
constexpr std::uint64_t kLcmCap = 1u << 22;

std::uint64_t structural_horizon(const WeightSequence& a, const WeightSequence& b) {
  const std::uint64_t prefix = std::max(a.prefix().size(), b.prefix().size());
  const std::uint64_t lcm = std::lcm<std::uint64_t>(a.cycle().size(), b.cycle().size());
  if (lcm > kLcmCap) {
    return 0;  // fall back to horizon-limited comparison
  }
  return prefix + lcm;
}

}  // namespace

LinfDistance linf_distance(const WeightSequence& a, const WeightSequence& b,
                           std::uint64_t horizon) {
  std::uint64_t scan = horizon;
  bool exact = false;
  if (a.eventually_periodic() && b.eventually_periodic()) {
    if (const std::uint64_t structural = structural_horizon(a, b); structural > 0) {
      scan = structural;
      exact = true;
    }
  }
  if (scan == 0) {
    throw std::invalid_argument("linf_distance horizon must be >= 1");
  }
  double sup = 0.0;
  for (std::uint64_t n = 0; n < scan; ++n) {
    sup = std::max(sup, pair_distance(a.at(n), b.at(n)));
  }
  return LinfDistance{sup, exact};
}

namespace {

double clamp01(double value, bool& clamped) {
  if (value < 0.0) {
    clamped = true;
    return 0.0;
  }
  if (value > 1.0) {
    clamped = true;
    return 1.0;
  }
  return value;
}

// Independent draw in [-zeta, zeta] for one slot coordinate, addressable by
// (seed, slot, coordinate) so structural slots perturb deterministically.
double slot_shift(double zeta, std::uint64_t seed, std::uint64_t slot, int coord) {
  SeededRng rng(derive_seed(seed, slot * 2 + static_cast<std::uint64_t>(coord)));
  return (2.0 * rng.uniform01() - 1.0) * zeta;
}

}  // namespace

Perturbation perturb(const WeightSequence& w, double zeta, PerturbMode mode, std::uint64_t seed) {
  if (!(zeta >= 0.0)) {
    throw std::invalid_argument("perturbation size must be >= 0");
  }
  Perturbation out;
  bool clamped = false;
  double realized = 0.0;

  const auto apply = [&](const WeightPair& pair, std::uint64_t slot) {
    WeightPair moved;
    const double dp =
        mode == PerturbMode::UniformShift ? zeta : slot_shift(zeta, seed, slot, 0);
    const double dq =
        mode == PerturbMode::UniformShift ? zeta : slot_shift(zeta, seed, slot, 1);
    moved.p = clamp01(pair.p + dp, clamped);
    moved.q = clamp01(pair.q + dq, clamped);
    realized = std::max(realized, pair_distance(moved, pair));
    return moved;
  };

  if (w.kind() == WeightKind::Generator) {
    // Wrap the rule; the realized distance can only be scanned, not proven.
    const WeightSequence base = w;
    const PerturbMode m = mode;
    const double z = zeta;
    const std::uint64_t s = seed;
    out.sequence = WeightSequence::from_rule([base, m, z, s](std::uint64_t n) {
      WeightPair pair = base.at(n);
      bool ignored = false;
      const double dp = m == PerturbMode::UniformShift ? z : slot_shift(z, s, n, 0);
      const double dq = m == PerturbMode::UniformShift ? z : slot_shift(z, s, n, 1);
      pair.p = clamp01(pair.p + dp, ignored);
      pair.q = clamp01(pair.q + dq, ignored);
      return pair;
    });
    constexpr std::uint64_t kScanHorizon = 1024;
    for (std::uint64_t n = 0; n < kScanHorizon; ++n) {
      realized = std::max(realized, pair_distance(out.sequence.at(n), w.at(n)));
      const WeightPair original = w.at(n);
      const double dp = mode == PerturbMode::UniformShift ? zeta : slot_shift(zeta, seed, n, 0);
      const double dq = mode == PerturbMode::UniformShift ? zeta : slot_shift(zeta, seed, n, 1);
      clamp01(original.p + dp, clamped);
      clamp01(original.q + dq, clamped);
    }
    out.realized_distance = realized;
    out.realized_exact = false;
    out.clamped = clamped;
    return out;
  }

  std::vector<WeightPair> prefix;
  prefix.reserve(w.prefix().size());
  std::uint64_t slot = 0;
  for (const auto& pair : w.prefix()) {
    prefix.push_back(apply(pair, slot++));
  }
  std::vector<WeightPair> cycle;
  cycle.reserve(w.cycle().size());
  for (const auto& pair : w.cycle()) {
    cycle.push_back(apply(pair, slot++));
  }

  if (prefix.empty()) {
    out.sequence = WeightSequence::periodic(std::move(cycle));
  } else {
    out.sequence = WeightSequence::explicit_with_tail(std::move(prefix), std::move(cycle));
  }
  out.realized_distance = realized;
  out.realized_exact = true;
  out.clamped = clamped;
  return out;
}

}  // namespace dyadim
