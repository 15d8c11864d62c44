#ifndef DYADIM_ENTROPY_HPP
#define DYADIM_ENTROPY_HPP

#include <cstdint>
#include <vector>

#include "dyadim/markov_measure.hpp"

namespace dyadim {

// h(p) = p log p + (1-p) log(1-p) in nats, with 0 log 0 = 0.
// Non-positive; the minimum -log 2 is attained at p = 1/2.
double binary_entropy(double p);

// Expected log branch ratio out of a generation-n cylinder (n >= 1) ending
// in `last`: h(p_n) for last = 0, h(q_n) for last = 1.
double step_entropy(const MarkovMeasure& m, std::uint64_t n, int last);

// Shannon entropies H_n of the generation partitions plus the normalized
// profile c_n = H_n / (n log 2) and the marginals pi_n(0).
// Index i of each vector corresponds to generation n = i + 1.
struct EntropyProfile {
  std::uint64_t horizon{0};
  std::vector<double> H;    // nats
  std::vector<double> c;
  std::vector<double> pi0;
};

EntropyProfile entropy_profile(const MarkovMeasure& m, std::uint64_t horizon);

inline constexpr unsigned kBruteforceMaxGeneration = 22;

// H_n by exhaustive enumeration of all 2^n cylinders. Rejects n above
// kBruteforceMaxGeneration. Zero-mass cylinders contribute zero.
double entropy_bruteforce(const MarkovMeasure& m, unsigned n);
// H_1..H_n in one sweep of the tree (same enumeration, shared prefixes).
std::vector<double> entropy_bruteforce_levels(const MarkovMeasure& m, unsigned n);

// Conditional window entropies over k further generations below a
// generation-n cylinder: a for a window rooted after appending 0, b after
// appending 1, delta = |a - b| / k. Both depend only on (n, k), not on the
// cylinder itself.
struct WindowGap {
  std::uint64_t n{0};
  std::uint64_t k{0};
  double a{0.0};  // nats, <= 0
  double b{0.0};
  double delta{0.0};
};

WindowGap window_entropy(const MarkovMeasure& m, std::uint64_t n, std::uint64_t k);

// e^2 log 2 / (k + 1): the advertised uniform bound on the shifted window
// gap. Decreasing in k with limit 0.
double eta_bound(std::uint64_t k);

// Grid scan of the claimed inequality |h(p) - h(q)| <= (1 - |p - q|) log 2.
// The claim fails near the boundary of [0,1]^2, so violations are reported
// as data, never asserted away.
struct EntropyBoundPoint {
  double p{0.0};
  double q{0.0};
  double lhs{0.0};
  double rhs{0.0};
};

struct EntropyBoundScan {
  double grid_step{0.0};
  std::size_t points_checked{0};
  std::vector<EntropyBoundPoint> violations;  // lhs > rhs, strictly
  double max_excess{0.0};                     // max lhs - rhs over violations
};

EntropyBoundScan lemma2_scan(double grid_step);

// One comparison of the window-gap recursion at (n, k): delta_shifted is
// the gap for a (k+1)-window at generation n-1, recursion_rhs the bound
// (1-|p_n-q_n|) log2/(k+1) + |p_n-q_n| (1 - 1/(k+1)) delta_n_k, and eta the
// uniform bound eta_bound(k) for the shifted gap.
struct DeltaCheckRow {
  std::uint64_t n{0};
  std::uint64_t k{0};
  double delta{0.0};          // delta_n^k
  double delta_shifted{0.0};  // delta_{n-1}^{k+1}
  double recursion_rhs{0.0};
  bool recursion_ok{true};
  double eta{0.0};
  bool eta_ok{true};
};

struct DeltaCheckReport {
  std::uint64_t comparisons{0};
  std::uint64_t recursion_violations{0};
  std::uint64_t eta_violations{0};
  double worst_eta_margin{0.0};  // max delta_shifted - eta (negative when all hold)
  std::vector<DeltaCheckRow> rows;  // all rows when captured, else only violations
};

// Evaluates every (n, k) with 1 <= n <= n_max, 1 <= k <= k_max from exact
// window entropies. Violations are reported, not fatal.
DeltaCheckReport delta_recursion_check(const MarkovMeasure& m, std::uint64_t n_max,
                                       std::uint64_t k_max, bool capture_rows = false);

}  // namespace dyadim

#endif
