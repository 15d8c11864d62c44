#include "dyadim/entropy.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "dyadim/detail/kahan.hpp"

namespace dyadim {

namespace {

// Stored violation rows are capped; counts stay exact regardless.
constexpr std::size_t kMaxStoredRows = 200000;

}  // namespace

double binary_entropy(double p) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binary_entropy argument must lie in [0, 1]");
  }
  if (p == 0.0 || p == 1.0) {
    return 0.0;  // 0 log 0 = 0
  }
  return p * std::log(p) + (1.0 - p) * std::log1p(-p);
}

double step_entropy(const MarkovMeasure& m, std::uint64_t n, int last) {
  if (n == 0) {
    throw std::invalid_argument("step_entropy requires generation n >= 1");
  }
  const WeightPair pair = m.weights().at(n);
  return binary_entropy(last == 0 ? pair.p : pair.q);
}

EntropyProfile entropy_profile(const MarkovMeasure& m, std::uint64_t horizon) {
  if (horizon == 0) {
    throw std::invalid_argument("entropy_profile horizon must be >= 1");
  }
  EntropyProfile profile;
  profile.horizon = horizon;
  profile.H.reserve(horizon);
  profile.c.reserve(horizon);
  profile.pi0.reserve(horizon);

  detail::KahanSum H;
  H.add(-binary_entropy(m.weights().at(0).p));
  double pi0 = m.weights().at(0).p;
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    profile.H.push_back(H.value());
    profile.c.push_back(H.value() / (static_cast<double>(n) * std::numbers::ln2));
    profile.pi0.push_back(pi0);
    // step to generation n+1
    const WeightPair pair = m.weights().at(n);
    H.add(-(pi0 * binary_entropy(pair.p) + (1.0 - pi0) * binary_entropy(pair.q)));
    pi0 = pi0 * pair.p + (1.0 - pi0) * pair.q;
  }
  return profile;
}

namespace {

struct LevelSums {
  std::vector<detail::KahanSum> H;

  // Walks every positive-mass cylinder once; a node at generation d
  // contributes -mass * log(mass) to H_d.
  void descend(const MarkovMeasure& m, unsigned depth_left, unsigned generation, int last,
               double log_mass) {
    if (generation > 0) {
      H[generation - 1].add(-std::exp(log_mass) * log_mass);
    }
    if (depth_left == 0) {
      return;
    }
    double zero_prob;
    if (generation == 0) {
      zero_prob = m.weights().at(0).p;
    } else {
      const WeightPair pair = m.weights().at(generation);
      zero_prob = last == 0 ? pair.p : pair.q;
    }
    if (zero_prob > 0.0) {
      descend(m, depth_left - 1, generation + 1, 0, log_mass + std::log(zero_prob));
    }
    if (zero_prob < 1.0) {
      descend(m, depth_left - 1, generation + 1, 1, log_mass + std::log1p(-zero_prob));
    }
  }
};

}  // namespace

std::vector<double> entropy_bruteforce_levels(const MarkovMeasure& m, unsigned n) {
  if (n == 0) {
    throw std::invalid_argument("entropy_bruteforce requires n >= 1");
  }
  if (n > kBruteforceMaxGeneration) {
    throw std::invalid_argument("entropy_bruteforce is capped at generation 22");
  }
  LevelSums sums;
  sums.H.resize(n);
  sums.descend(m, n, 0, -1, 0.0);
  std::vector<double> out;
  out.reserve(n);
  for (const auto& acc : sums.H) {
    out.push_back(acc.value());
  }
  return out;
}

double entropy_bruteforce(const MarkovMeasure& m, unsigned n) {
  return entropy_bruteforce_levels(m, n).back();
}

WindowGap window_entropy(const MarkovMeasure& m, std::uint64_t n, std::uint64_t k) {
  if (k == 0) {
    throw std::invalid_argument("window_entropy requires k >= 1");
  }
  // Two-state backward recursion over the k-1 generations below n+1.
  double w0 = 0.0;
  double w1 = 0.0;
  for (std::uint64_t j = 1; j < k; ++j) {
    const std::uint64_t g = n + k - j;
    const WeightPair pair = m.weights().at(g);
    const double next0 = binary_entropy(pair.p) + pair.p * w0 + (1.0 - pair.p) * w1;
    const double next1 = binary_entropy(pair.q) + pair.q * w0 + (1.0 - pair.q) * w1;
    w0 = next0;
    w1 = next1;
  }
  WindowGap gap;
  gap.n = n;
  gap.k = k;
  gap.a = w0;
  gap.b = w1;
  gap.delta = std::abs(w0 - w1) / static_cast<double>(k);
  return gap;
}

double eta_bound(std::uint64_t k) {
  return std::exp(2.0) * std::numbers::ln2 / static_cast<double>(k + 1);
}

EntropyBoundScan lemma2_scan(double grid_step) {
  if (!(grid_step > 0.0 && grid_step <= 0.5)) {
    throw std::invalid_argument("lemma2_scan grid step must lie in (0, 0.5]");
  }
  const auto steps = static_cast<std::uint64_t>(std::llround(1.0 / grid_step));
  EntropyBoundScan scan;
  scan.grid_step = grid_step;

  std::vector<double> grid(steps + 1);
  std::vector<double> h(steps + 1);
  for (std::uint64_t i = 0; i <= steps; ++i) {
    grid[i] = i == steps ? 1.0 : static_cast<double>(i) * grid_step;
    h[i] = binary_entropy(grid[i]);
  }

  for (std::uint64_t i = 0; i <= steps; ++i) {
    for (std::uint64_t j = 0; j <= steps; ++j) {
      ++scan.points_checked;
      const double lhs = std::abs(h[i] - h[j]);
      const double rhs = (1.0 - std::abs(grid[i] - grid[j])) * std::numbers::ln2;
      if (lhs > rhs) {
        if (scan.violations.size() < kMaxStoredRows) {
          scan.violations.push_back(EntropyBoundPoint{grid[i], grid[j], lhs, rhs});
        }
        scan.max_excess = std::max(scan.max_excess, lhs - rhs);
      }
    }
  }
  return scan;
}

DeltaCheckReport delta_recursion_check(const MarkovMeasure& m, std::uint64_t n_max,
                                       std::uint64_t k_max, bool capture_rows) {
  if (n_max == 0 || k_max == 0) {
    throw std::invalid_argument("delta_recursion_check requires n_max, k_max >= 1");
  }
  if ((k_max + 1) * (n_max + k_max + 3) > 200000000ull) {
    throw std::invalid_argument("delta_recursion_check range too large");
  }
  // D(g, j) = W0(g, j) - W1(g, j) satisfies
  //   D(g, 0) = 0,  D(g, j) = (h(p_g) - h(q_g)) + (p_g - q_g) D(g+1, j-1),
  // and delta_n^k = |D(n+1, k-1)| / k. One table covers every (n, k) pair.
  const std::uint64_t g_max = n_max + 1 + k_max;  // deepest generation consulted
  std::vector<double> dh(g_max + 1);
  std::vector<double> dpq(g_max + 1);
  for (std::uint64_t g = 1; g <= g_max; ++g) {
    const WeightPair pair = m.weights().at(g);
    dh[g] = binary_entropy(pair.p) - binary_entropy(pair.q);
    dpq[g] = pair.p - pair.q;
  }

  const std::size_t cols = g_max + 2;
  std::vector<std::vector<double>> D(k_max + 1, std::vector<double>(cols, 0.0));
  for (std::uint64_t j = 1; j <= k_max; ++j) {
    for (std::uint64_t g = 1; g + j <= g_max + 1; ++g) {
      D[j][g] = dh[g] + dpq[g] * D[j - 1][g + 1];
    }
  }

  DeltaCheckReport report;
  for (std::uint64_t n = 1; n <= n_max; ++n) {
    for (std::uint64_t k = 1; k <= k_max; ++k) {
      const double delta = std::abs(D[k - 1][n + 1]) / static_cast<double>(k);
      const double delta_shifted = std::abs(D[k][n]) / static_cast<double>(k + 1);
      const double spread = std::abs(dpq[n]);
      const double rhs = (1.0 - spread) * std::numbers::ln2 / static_cast<double>(k + 1) +
                         spread * (1.0 - 1.0 / static_cast<double>(k + 1)) * delta;
      const double eta = eta_bound(k);

      DeltaCheckRow row;
      row.n = n;
      row.k = k;
      row.delta = delta;
      row.delta_shifted = delta_shifted;
      row.recursion_rhs = rhs;
      row.recursion_ok = delta_shifted <= rhs;
      row.eta = eta;
      row.eta_ok = delta_shifted <= eta;

      ++report.comparisons;
      if (!row.recursion_ok) {
        ++report.recursion_violations;
      }
      if (!row.eta_ok) {
        ++report.eta_violations;
      }
      if (report.comparisons == 1 || delta_shifted - eta > report.worst_eta_margin) {
        report.worst_eta_margin = delta_shifted - eta;
      }
      if ((capture_rows || !row.recursion_ok || !row.eta_ok) &&
          report.rows.size() < kMaxStoredRows) {
        report.rows.push_back(row);
      }
    }
  }
  return report;
}

}  // namespace dyadim
