#ifndef DYADIM_TESTS_ORACLES_HPP
#define DYADIM_TESTS_ORACLES_HPP

// Brute-force reference implementations shared by the test binaries.
// Everything here recomputes a quantity by direct enumeration or a closed
// form derived independently, so the library's fast paths have something
// to agree with. Exponential in their depth arguments; keep them small.

#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "dyadim/markov_measure.hpp"
#include "dyadim/rng.hpp"
#include "dyadim/weights.hpp"

namespace oracles {

inline double xlogx(double x) { return x <= 0.0 ? 0.0 : x * std::log(x); }

inline double entropy_term(double p) { return xlogx(p) + xlogx(1.0 - p); }

// Sum of m log m over the positive-mass leaves `remaining` generations below
// a cylinder of generation `generation` ending in `last`, where m is the
// leaf mass relative to that cylinder.
inline double window_sum(const dyadim::MarkovMeasure& m, std::uint64_t generation, int last,
                         std::uint64_t remaining, double mass, double log_mass) {
  if (remaining == 0) {
    return mass == 0.0 ? 0.0 : mass * log_mass;
  }
  double total = 0.0;
  for (int next = 0; next < 2; ++next) {
    const double ratio = m.child_ratio(generation, last, next);
    if (ratio > 0.0) {
      total += window_sum(m, generation + 1, next, remaining - 1, mass * ratio,
                          log_mass + std::log(ratio));
    }
  }
  return total;
}

// The two conditional window entropies for (n, k), each a direct sum over
// the 2^(k-1) extensions below a generation-(n+1) cylinder.
inline double window_a(const dyadim::MarkovMeasure& m, std::uint64_t n, std::uint64_t k) {
  return window_sum(m, n + 1, 0, k - 1, 1.0, 0.0);
}

inline double window_b(const dyadim::MarkovMeasure& m, std::uint64_t n, std::uint64_t k) {
  return window_sum(m, n + 1, 1, k - 1, 1.0, 0.0);
}

// Same window sum computed from concrete cylinder masses below `start`
// (generation n+1), exercising cylinder_log_mass instead of child_ratio.
// Requires start to have positive mass.
inline double window_from_address(const dyadim::MarkovMeasure& m,
                                  const dyadim::CylinderAddress& start, std::uint64_t k) {
  const double base = m.cylinder_log_mass(start);
  double total = 0.0;
  const std::uint64_t words = 1ull << (k - 1);
  for (std::uint64_t word = 0; word < words; ++word) {
    dyadim::CylinderAddress leaf = start;
    for (std::uint64_t i = 0; i + 1 < k; ++i) {
      leaf.push_back(static_cast<int>((word >> i) & 1u));
    }
    const double log_mass = m.cylinder_log_mass(leaf);
    if (std::isfinite(log_mass)) {
      const double rel = log_mass - base;
      total += std::exp(rel) * rel;
    }
  }
  return total;
}

// Total mass of length-n i.i.d. blocks whose per-symbol rate -log(mass)/n
// lies within `halfwidth` of `center`. 2^n enumeration.
inline double band_mass(double p0, std::uint64_t n, double center, double halfwidth) {
  double total = 0.0;
  for (std::uint64_t word = 0; word < (1ull << n); ++word) {
    double mass = 1.0;
    double log_mass = 0.0;
    for (std::uint64_t i = 0; i < n; ++i) {
      const double step = ((word >> i) & 1u) == 0u ? p0 : 1.0 - p0;
      mass *= step;
      log_mass += std::log(step);
    }
    if (mass == 0.0) {
      continue;
    }
    const double rate = -log_mass / static_cast<double>(n);
    if (std::abs(rate - center) <= halfwidth) {
      total += mass;
    }
  }
  return total;
}

// Total mass of length-n i.i.d. blocks with at most t zeros. 2^n enumeration.
inline double low_count_mass(double p0, std::uint64_t n, std::int64_t t) {
  double total = 0.0;
  for (std::uint64_t word = 0; word < (1ull << n); ++word) {
    double mass = 1.0;
    std::int64_t zeros = 0;
    for (std::uint64_t i = 0; i < n; ++i) {
      if (((word >> i) & 1u) == 0u) {
        mass *= p0;
        ++zeros;
      } else {
        mass *= 1.0 - p0;
      }
    }
    if (zeros <= t) {
      total += mass;
    }
  }
  return total;
}

// C(n, z) p^z (1-p)^(n-z) with the coefficient built incrementally.
// Requires p < 1; fine for the small n used in tests.
inline double binomial_pmf(std::uint64_t n, double p, std::uint64_t z) {
  double value = std::pow(1.0 - p, static_cast<double>(n));
  for (std::uint64_t i = 1; i <= z; ++i) {
    value *= static_cast<double>(n - i + 1) / static_cast<double>(i) * (p / (1.0 - p));
  }
  return value;
}

// Closed-form dimension of the constant-(p, q) measure: the two-state
// marginal chain has stationary zero-mass q / (1 - p + q), and the
// dimension is the stationary entropy rate over log 2.
inline double constant_pair_dimension(double p, double q) {
  const double pi = q / (1.0 - p + q);
  return -(pi * entropy_term(p) + (1.0 - pi) * entropy_term(q)) / std::numbers::ln2;
}

// Deterministic random weight cycle for property tests. With snap > 0 a
// slice of the draws is collapsed onto exact 0s and 1s so degenerate
// branches get exercised too.
inline dyadim::WeightSequence random_weights(std::uint64_t seed, std::size_t length,
                                             double snap = 0.0) {
  const auto snapped = [snap](double u) {
    if (snap > 0.0) {
      if (u < snap / 2.0) {
        return 0.0;
      }
      if (u < snap) {
        return 1.0;
      }
    }
    return u;
  };
  dyadim::SeededRng rng(seed);
  std::vector<dyadim::WeightPair> cycle;
  cycle.reserve(length);
  for (std::size_t i = 0; i < length; ++i) {
    const double p = snapped(rng.uniform01());
    const double q = snapped(rng.uniform01());
    cycle.push_back(dyadim::WeightPair{p, q});
  }
  return dyadim::WeightSequence::periodic(std::move(cycle));
}

}  // namespace oracles

#endif
