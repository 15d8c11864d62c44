#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "dyadim/markov_measure.hpp"
#include "dyadim/rng.hpp"
#include "dyadim/weights.hpp"
#include "oracles.hpp"

using dyadim::CylinderAddress;
using dyadim::MarkovMeasure;
using dyadim::PathTrace;
using dyadim::SeededRng;
using dyadim::WeightPair;
using dyadim::WeightSequence;

namespace {

// All 2^n addresses of generation n, low bit first.
std::vector<CylinderAddress> all_addresses(unsigned n) {
  std::vector<CylinderAddress> out;
  out.reserve(1ull << n);
  for (std::uint64_t word = 0; word < (1ull << n); ++word) {
    CylinderAddress address;
    for (unsigned i = 0; i < n; ++i) {
      address.push_back(static_cast<int>((word >> i) & 1u));
    }
    out.push_back(address);
  }
  return out;
}

}  // namespace

TEST_CASE("addresses round-trip through strings and reject junk") {
  const CylinderAddress a = CylinderAddress::from_string("0110");
  CHECK(a.generation() == 4);
  CHECK(a.bit(0) == 0);
  CHECK(a.bit(1) == 1);
  CHECK(a.last_bit() == 0);
  CHECK(a.to_string() == "0110");
  CHECK(a.child(1).to_string() == "01101");
  CHECK(CylinderAddress::root().empty());
  CHECK_THROWS_AS(CylinderAddress::from_string("01x0"), std::invalid_argument);
  CylinderAddress b;
  CHECK_THROWS_AS(b.push_back(2), std::invalid_argument);
}

TEST_CASE("cylinder log mass matches hand computations") {
  const MarkovMeasure uniform(WeightSequence::constant(0.5, 0.5));
  CHECK(uniform.cylinder_log_mass(CylinderAddress::root()) == 0.0);
  CHECK(uniform.cylinder_log_mass(CylinderAddress::from_string("0110")) ==
        doctest::Approx(-4.0 * std::numbers::ln2).epsilon(1e-15));

  const MarkovMeasure m(WeightSequence::constant(0.3, 0.7));
  // mass("00") = 0.3 * 0.3
  CHECK(m.cylinder_log_mass(CylinderAddress::from_string("00")) ==
        doctest::Approx(std::log(0.09)).epsilon(1e-12));
  // mass("01") = 0.3 * 0.7, mass("10") = 0.7 * 0.7, mass("11") = 0.7 * 0.3
  CHECK(m.cylinder_log_mass(CylinderAddress::from_string("01")) ==
        doctest::Approx(std::log(0.21)).epsilon(1e-12));
  CHECK(m.cylinder_log_mass(CylinderAddress::from_string("10")) ==
        doctest::Approx(std::log(0.49)).epsilon(1e-12));

  const MarkovMeasure degenerate(WeightSequence::constant(0.0, 0.5));
  CHECK(degenerate.cylinder_log_mass(CylinderAddress::from_string("00")) ==
        -std::numeric_limits<double>::infinity());
  CHECK(std::exp(degenerate.cylinder_log_mass(CylinderAddress::from_string("1"))) == 1.0);
}

TEST_CASE("branch ratios follow the weight sequence") {
  const MarkovMeasure m(MarkovMeasure(WeightSequence::periodic({{0.2, 0.8}, {0.6, 0.4}})));
  CHECK(m.root_ratio(0) == 0.2);
  CHECK(m.root_ratio(1) == doctest::Approx(0.8).epsilon(1e-15));
  // generation 3 uses cycle slot 3 mod 2 = 1: (p, q) = (0.6, 0.4)
  CHECK(m.child_ratio(3, 1, 0) == 0.4);
  CHECK(m.child_ratio(3, 1, 1) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(m.child_ratio(3, 0, 0) == 0.6);
  CHECK_THROWS_AS(m.child_ratio(0, 0, 0), std::invalid_argument);
}

TEST_CASE("children partition their parent") {
  for (const std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
    // odd seeds get exact 0/1 weights mixed in
    const double snap = seed % 2 == 1 ? 0.3 : 0.0;
    const MarkovMeasure m(oracles::random_weights(seed, 8, snap));
    for (unsigned n = 0; n < 10; ++n) {
      for (const CylinderAddress& parent : all_addresses(n)) {
        const double parent_log = m.cylinder_log_mass(parent);
        if (!std::isfinite(parent_log)) {
          continue;
        }
        const double left = std::exp(m.cylinder_log_mass(parent.child(0)) - parent_log);
        const double right = std::exp(m.cylinder_log_mass(parent.child(1)) - parent_log);
        CHECK(left + right == doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("generation masses sum to one") {
  for (const std::uint64_t seed : {5ull, 6ull}) {
    const MarkovMeasure m(oracles::random_weights(seed, 10));
    for (const unsigned n : {12u, 14u}) {
      double total = 0.0;
      for (const CylinderAddress& address : all_addresses(n)) {
        total += std::exp(m.cylinder_log_mass(address));
      }
      CHECK(total == doctest::Approx(1.0).epsilon(1e-10));
    }
  }
}

TEST_CASE("mass ratios depend only on generation and last symbol") {
  const MarkovMeasure m(oracles::random_weights(12, 6));
  for (unsigned n = 1; n <= 8; ++n) {
    for (const CylinderAddress& parent : all_addresses(n)) {
      const double parent_log = m.cylinder_log_mass(parent);
      if (!std::isfinite(parent_log)) {
        continue;
      }
      for (int next = 0; next < 2; ++next) {
        const double observed = std::exp(m.cylinder_log_mass(parent.child(next)) - parent_log);
        const double declared = m.child_ratio(n, parent.last_bit(), next);
        CHECK(observed == doctest::Approx(declared).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("marginals track the two-state recursion") {
  const MarkovMeasure m(WeightSequence::constant(0.3, 0.7));
  const auto [pi0_1, pi1_1] = m.marginal_last_symbol(1);
  CHECK(pi0_1 == 0.3);
  // pi_2(0) = 0.3 * 0.3 + 0.7 * 0.7
  const auto [pi0_2, pi1_2] = m.marginal_last_symbol(2);
  CHECK(pi0_2 == doctest::Approx(0.58).epsilon(1e-15));
  CHECK(pi0_2 + pi1_2 == doctest::Approx(1.0).epsilon(1e-15));
  // (0.3, 0.7) has stationary zero-mass q/(1-p+q) = 0.5
  const auto [pi0_far, pi1_far] = m.marginal_last_symbol(200);
  CHECK(pi0_far == doctest::Approx(0.5).epsilon(1e-12));

  const MarkovMeasure uniform(WeightSequence::constant(0.5, 0.5));
  const auto pi0s = uniform.marginals_pi0(20);
  REQUIRE(pi0s.size() == 20);
  for (double v : pi0s) {
    CHECK(v == 0.5);
  }
  CHECK_THROWS_AS(m.marginal_last_symbol(0), std::invalid_argument);
}

TEST_CASE("marginal vector agrees with the single query") {
  const MarkovMeasure m(oracles::random_weights(21, 7));
  const auto pi0s = m.marginals_pi0(40);
  for (std::uint64_t n = 1; n <= 40; ++n) {
    CHECK(pi0s[n - 1] == m.marginal_last_symbol(n).first);
  }
}

TEST_CASE("marginals also equal the brute-force cylinder sums") {
  const MarkovMeasure m(oracles::random_weights(22, 5));
  for (unsigned n = 1; n <= 10; ++n) {
    double zero_total = 0.0;
    for (const CylinderAddress& address : all_addresses(n)) {
      if (address.last_bit() == 0) {
        zero_total += std::exp(m.cylinder_log_mass(address));
      }
    }
    CHECK(zero_total == doctest::Approx(m.marginal_last_symbol(n).first).epsilon(1e-12));
  }
}

TEST_CASE("sampled paths follow deterministic weights exactly") {
  const MarkovMeasure m(WeightSequence::constant(1.0, 0.0));
  SeededRng rng(3);
  const PathTrace trace = m.sample_path(5, rng);
  // p = 1 forces 0 forever and every step has probability one
  CHECK(trace.address.to_string() == "00000");
  for (double inc : trace.increments) {
    CHECK(inc == 0.0);
  }
  CHECK(trace.cumulative.back() == 0.0);
}

TEST_CASE("uniform paths accumulate exactly n log 2") {
  const MarkovMeasure m(WeightSequence::constant(0.5, 0.5));
  SeededRng rng(11);
  const PathTrace trace = m.sample_path(64, rng);
  REQUIRE(trace.cumulative.size() == 64);
  for (std::size_t i = 0; i < trace.cumulative.size(); ++i) {
    CHECK(trace.cumulative[i] ==
          doctest::Approx(-static_cast<double>(i + 1) * std::numbers::ln2).epsilon(1e-12));
  }
}

TEST_CASE("path traces are reproducible and internally consistent") {
  const MarkovMeasure m(oracles::random_weights(31, 9));
  SeededRng rng_a(99);
  SeededRng rng_b(99);
  const PathTrace a = m.sample_path(200, rng_a);
  const PathTrace b = m.sample_path(200, rng_b);
  CHECK(a.address == b.address);
  CHECK(a.cumulative == b.cumulative);

  double running = 0.0;
  for (std::size_t i = 0; i < a.increments.size(); ++i) {
    CHECK(a.increments[i] <= 0.0);
    running += a.increments[i];
    CHECK(a.cumulative[i] == doctest::Approx(running).epsilon(1e-12));
  }
  // the trace's cumulative log mass is the visited cylinder's log mass
  CHECK(a.cumulative.back() ==
        doctest::Approx(m.cylinder_log_mass(a.address)).epsilon(1e-9));
}

TEST_CASE("first-symbol frequency matches the root split") {
  const MarkovMeasure m(WeightSequence::constant(0.3, 0.7));
  const std::uint64_t paths = 100000;
  std::uint64_t zeros = 0;
  for (std::uint64_t i = 0; i < paths; ++i) {
    SeededRng rng(dyadim::derive_seed(4242, i));
    if (m.sample_path(1, rng).address.bit(0) == 0) {
      ++zeros;
    }
  }
  const double freq = static_cast<double>(zeros) / static_cast<double>(paths);
  // three sigma for p = 0.3 at 1e5 samples
  CHECK(std::abs(freq - 0.3) <= 0.00435);
}
