#include "dyadim/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "dyadim/rng.hpp"

namespace dyadim {

const char* to_string(DimensionMode mode) {
  return mode == DimensionMode::ExactPeriodic ? "exact-periodic" : "horizon-numeric";
}

namespace {

void check_estimate_window(std::uint64_t horizon, std::uint64_t window) {
  if (window < 10 || horizon < 10 * window) {
    throw std::invalid_argument("dimension estimate requires horizon >= 10 * window >= 100");
  }
}

bool has_contracting_cycle(const WeightSequence& w) {
  if (!w.eventually_periodic()) {
    return false;
  }
  for (const auto& pair : w.cycle()) {
    if (std::abs(pair.p - pair.q) < 1.0) {
      return true;
    }
  }
  return false;
}

}  // namespace

double exact_dimension_periodic(const MarkovMeasure& m) {
  const WeightSequence& w = m.weights();
  if (!w.eventually_periodic()) {
    throw std::domain_error("exact dimension needs eventually periodic weights");
  }
  if (!has_contracting_cycle(w)) {
    throw std::domain_error(
        "exact dimension undefined: every cycle element is fully degenerate (|p - q| = 1)");
  }
  const auto& cycle = w.cycle();
  const std::size_t m_len = cycle.size();

  // One period of the marginal recursion x -> q_j + x (p_j - q_j) composes
  // to an affine map x -> A x + B with |A| < 1; its fixed point starts the
  // limiting cycle.
  double A = 1.0;
  double B = 0.0;
  for (const auto& pair : cycle) {
    const double slope = pair.p - pair.q;
    B = pair.q + slope * B;
    A *= slope;
  }
  const double fixed = B / (1.0 - A);

  double x = fixed;
  double mean_step = 0.0;
  for (const auto& pair : cycle) {
    mean_step += -(x * binary_entropy(pair.p) + (1.0 - x) * binary_entropy(pair.q));
    x = pair.q + (pair.p - pair.q) * x;
  }
  return mean_step / (static_cast<double>(m_len) * std::numbers::ln2);
}

DimensionEstimate dimension_estimate_numeric(const MarkovMeasure& m, std::uint64_t horizon,
                                             std::uint64_t window) {
  check_estimate_window(horizon, window);
  const EntropyProfile profile = entropy_profile(m, horizon);
  double lower = profile.c[horizon - window];
  double upper = lower;
  for (std::uint64_t n = horizon - window + 1; n <= horizon; ++n) {
    const double c = profile.c[n - 1];
    lower = std::min(lower, c);
    upper = std::max(upper, c);
  }
  return DimensionEstimate{lower, upper, DimensionMode::HorizonNumeric, horizon, window};
}

DimensionEstimate dimension_estimate(const MarkovMeasure& m, std::uint64_t horizon,
                                     std::uint64_t window) {
  check_estimate_window(horizon, window);
  if (has_contracting_cycle(m.weights())) {
    const double value = exact_dimension_periodic(m);
    return DimensionEstimate{value, value, DimensionMode::ExactPeriodic, horizon, window};
  }
  return dimension_estimate_numeric(m, horizon, window);
}

SmbReport smb_check(const MarkovMeasure& m, std::uint64_t depth, std::uint64_t paths,
                    std::uint64_t seed, std::vector<std::uint64_t> checkpoints,
                    unsigned threads) {
  if (depth == 0 || paths == 0 || checkpoints.empty()) {
    throw std::invalid_argument("smb_check requires depth, paths and checkpoints >= 1");
  }
  for (const auto checkpoint : checkpoints) {
    if (checkpoint == 0 || checkpoint > depth) {
      throw std::invalid_argument("smb_check checkpoints must lie in [1, depth]");
    }
  }

  SmbReport report;
  report.depth = depth;
  report.paths = paths;
  report.seed = seed;
  report.checkpoints = checkpoints;
  report.deviations.assign(paths * checkpoints.size(), 0.0);

  const std::uint64_t max_checkpoint = *std::max_element(checkpoints.begin(), checkpoints.end());
  const EntropyProfile profile = entropy_profile(m, max_checkpoint);

  std::vector<double> exponents(paths * checkpoints.size(), 0.0);

  std::vector<std::size_t> order(checkpoints.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    order[i] = i;
  }
  std::sort(order.begin(), order.end(), [&](std::size_t lhs, std::size_t rhs) {
    return checkpoints[lhs] < checkpoints[rhs];
  });

  // Each path owns the substream derived from (seed, path index) and writes
  // only its own slots, so any worker split yields identical output.
  const auto run_range = [&](std::uint64_t begin, std::uint64_t end) {
    for (std::uint64_t path = begin; path < end; ++path) {
      SeededRng rng(derive_seed(seed, path));
      double cumulative = 0.0;
      int last = -1;
      std::size_t next_cp = 0;
      for (std::uint64_t n = 0; n < depth && next_cp < order.size(); ++n) {
        double zero_prob;
        if (n == 0) {
          zero_prob = m.weights().at(0).p;
        } else {
          const WeightPair pair = m.weights().at(n);
          zero_prob = last == 0 ? pair.p : pair.q;
        }
        // A sure branch has probability 1, so `taken` is never zero.
        const int bit = rng.uniform01() < zero_prob ? 0 : 1;
        const double taken = bit == 0 ? zero_prob : 1.0 - zero_prob;
        cumulative += std::log(taken);
        last = bit;
        while (next_cp < order.size() && checkpoints[order[next_cp]] == n + 1) {
          const double exponent =
              -cumulative / (static_cast<double>(n + 1) * std::numbers::ln2);
          exponents[path * checkpoints.size() + order[next_cp]] = exponent;
          ++next_cp;
        }
      }
    }
  };

  const unsigned workers =
      std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(paths)));
  if (workers == 1) {
    run_range(0, paths);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::uint64_t chunk = (paths + workers - 1) / workers;
    for (unsigned t = 0; t < workers; ++t) {
      const std::uint64_t begin = t * chunk;
      const std::uint64_t end = std::min<std::uint64_t>(begin + chunk, paths);
      if (begin < end) {
        pool.emplace_back(run_range, begin, end);
      }
    }
    for (auto& worker : pool) {
      worker.join();
    }
  }

  for (std::size_t c = 0; c < checkpoints.size(); ++c) {
    const double c_ref = profile.c[checkpoints[c] - 1];
    SmbSummary summary;
    summary.checkpoint = checkpoints[c];
    summary.c_ref = c_ref;

    std::vector<double> devs(paths);
    std::vector<double> exps(paths);
    double mean = 0.0;
    double peak = 0.0;
    for (std::uint64_t path = 0; path < paths; ++path) {
      const double exponent = exponents[path * checkpoints.size() + c];
      const double dev = std::abs(exponent - c_ref);
      report.deviations[path * checkpoints.size() + c] = dev;
      devs[path] = dev;
      exps[path] = exponent;
      mean += dev;
      peak = std::max(peak, dev);
    }
    std::sort(devs.begin(), devs.end());
    std::sort(exps.begin(), exps.end());
    const auto median = [](const std::vector<double>& sorted) {
      const std::size_t n = sorted.size();
      return n % 2 == 1 ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
    };
    summary.mean_dev = mean / static_cast<double>(paths);
    summary.median_dev = median(devs);
    summary.max_dev = peak;
    summary.median_exponent = median(exps);
    report.summary.push_back(summary);
  }
  return report;
}

std::vector<ContinuityRow> continuity_sweep(const WeightSequence& w, std::vector<double> zetas,
                                            PerturbMode mode, std::uint64_t seed,
                                            std::uint64_t horizon, std::uint64_t window) {
  if (zetas.empty()) {
    throw std::invalid_argument("continuity_sweep needs at least one zeta");
  }
  std::sort(zetas.begin(), zetas.end(), std::greater<>());

  const MarkovMeasure base(w);
  const DimensionEstimate reference = dimension_estimate(base, horizon, window);

  std::vector<ContinuityRow> rows;
  rows.reserve(zetas.size());
  for (const double zeta : zetas) {
    const Perturbation moved = perturb(w, zeta, mode, seed);
    const DimensionEstimate estimate =
        dimension_estimate(MarkovMeasure(moved.sequence), horizon, window);
    ContinuityRow row;
    row.zeta = zeta;
    row.realized_distance = moved.realized_distance;
    row.lower_diff = std::abs(estimate.lower - reference.lower);
    row.upper_diff = std::abs(estimate.upper - reference.upper);
    row.mode = estimate.mode;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace dyadim
