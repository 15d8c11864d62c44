#ifndef DYADIM_DIMENSION_HPP
#define DYADIM_DIMENSION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "dyadim/entropy.hpp"
#include "dyadim/markov_measure.hpp"
#include "dyadim/weights.hpp"

namespace dyadim {

enum class DimensionMode { ExactPeriodic, HorizonNumeric };

const char* to_string(DimensionMode mode);

// [lower, upper] brackets the lower/upper dimension of the measure.
// ExactPeriodic means both ends coincide with the closed-form limit;
// HorizonNumeric means min/max of c_n over the trailing window.
struct DimensionEstimate {
  double lower{0.0};
  double upper{0.0};
  DimensionMode mode{DimensionMode::HorizonNumeric};
  std::uint64_t horizon{0};
  std::uint64_t window{0};
};

// Requires horizon >= 10 * window >= 100. Dispatches to the exact periodic
// limit when the weights are eventually periodic and some cycle element has
// |p - q| < 1, otherwise falls back to the horizon-numeric bracket.
DimensionEstimate dimension_estimate(const MarkovMeasure& m, std::uint64_t horizon,
                                     std::uint64_t window);
DimensionEstimate dimension_estimate_numeric(const MarkovMeasure& m, std::uint64_t horizon,
                                             std::uint64_t window);

// Closed-form dimension limit for eventually periodic weights: the marginal
// settles into a unique periodic cycle (the one-period affine map is a
// contraction when some cycle element has |p - q| < 1), and the dimension is
// the cycle average of the per-step entropies over log 2. Throws when the
// weights are generator-backed or every cycle element has |p - q| = 1.
double exact_dimension_periodic(const MarkovMeasure& m);

struct SmbSummary {
  std::uint64_t checkpoint{0};
  double c_ref{0.0};  // c_n at the checkpoint
  double mean_dev{0.0};
  double median_dev{0.0};
  double max_dev{0.0};
  double median_exponent{0.0};
};

// Deviations |(-log-mass)/(n log 2) - c_n| of sampled paths at chosen
// checkpoints; deviations is paths x checkpoints, row-major by path.
struct SmbReport {
  std::uint64_t depth{0};
  std::uint64_t paths{0};
  std::uint64_t seed{0};
  std::vector<std::uint64_t> checkpoints;
  std::vector<double> deviations;
  std::vector<SmbSummary> summary;
};

// Path i always uses the substream derived from (seed, i) and results are
// aggregated in path order, so the report is identical for any thread count.
SmbReport smb_check(const MarkovMeasure& m, std::uint64_t depth, std::uint64_t paths,
                    std::uint64_t seed, std::vector<std::uint64_t> checkpoints,
                    unsigned threads = 1);

struct ContinuityRow {
  double zeta{0.0};
  double realized_distance{0.0};
  double lower_diff{0.0};
  double upper_diff{0.0};
  DimensionMode mode{DimensionMode::HorizonNumeric};
};

// Dimension response to weight perturbations of decreasing size; rows are
// sorted by zeta descending and both estimates share horizon/window.
std::vector<ContinuityRow> continuity_sweep(const WeightSequence& w, std::vector<double> zetas,
                                            PerturbMode mode, std::uint64_t seed,
                                            std::uint64_t horizon, std::uint64_t window);

}  // namespace dyadim

#endif
