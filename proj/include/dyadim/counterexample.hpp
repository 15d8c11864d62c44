#ifndef DYADIM_COUNTEREXAMPLE_HPP
#define DYADIM_COUNTEREXAMPLE_HPP

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "dyadim/markov_measure.hpp"

namespace dyadim {

// Product measure on the dyadic tree with constant zero-probability p0.
struct BernoulliSpec {
  double p0{0.5};
};

// Two measures built from four Bernoulli blocks. Regime 0 pairs the
// unbiased spec (mu side, p0 = 1/2) against p0 = 1/2 - epsilon (nu side);
// regime 1 pairs p0 = delta(1 - epsilon) (mu) against p0 = delta (nu).
BernoulliSpec mu_block_spec(double epsilon, double delta, int regime);
BernoulliSpec nu_block_spec(double epsilon, double delta, int regime);

// The sup-gap between paired log branch ratios is -log(1 - 2 epsilon), not
// epsilon itself; this inverts the map for callers targeting a given gap.
double epsilon_for_target_gap(double target_log_gap);

// P(-log mass / n within band_halfwidth of band_center) for the mass of a
// length-n block under `spec`. Exact: the per-symbol rate depends on the
// block only through its zero count, so this is a binomial window mass
// (never a 2^n enumeration).
double smb_concentration(const BernoulliSpec& spec, std::uint64_t n, double band_center,
                         double band_halfwidth);

// Block classification cut for one parent regime: counts z <= t_low belong
// to the lower-p0 spec of the pair (mu_is_low says which side that is).
// Ties in the likelihood ratio go to the high side.
struct RegimeThreshold {
  bool present{false};
  std::int64_t t_low{-1};
  bool mu_is_low{false};
};

using StageThresholds = std::array<RegimeThreshold, 2>;

// Certified masses for one stage and parent regime, each computed as an
// exact binomial window mass under the governing spec: class_* for the
// partition conditions, band_* for the per-block entropy-band conditions.
struct RegimeAchieved {
  bool present{false};
  double class_mu{0.0};
  double class_nu{0.0};
  double band_mu{0.0};
  double band_nu{0.0};

  double min_value() const;
};

using StageAchieved = std::array<RegimeAchieved, 2>;

struct StagePlan {
  double epsilon{0.0};
  double delta{0.0};
  std::vector<std::uint64_t> depths;        // stage boundaries n_1 < n_2 < ...
  std::vector<StageThresholds> thresholds;  // per stage
  std::vector<StageAchieved> achieved;      // per stage

  std::size_t stages() const { return depths.size(); }
};

std::string to_json(const StagePlan& plan);

struct StageResult {
  std::uint64_t depth{0};  // absolute boundary n_{k+1}
  StageThresholds thresholds;
  StageAchieved achieved;
};

// Smallest block length (doubling then bisection) whose count-threshold
// classification certifies the stage's class and band masses above
// 1 - target for every parent regime present. Throws when a regime's two
// specs coincide (inseparable) or the search exceeds its length cap.
StageResult find_stage_depth(const StagePlan& plan_so_far, unsigned stage, double target);

enum class MeasureRole { Mu, Nu };

// Piecewise-Bernoulli measure: within stage k+1 every step uses the
// governing spec of the regime chosen at depth n_k, and crossing a boundary
// reclassifies by the completed block's zero count. Beyond the last
// boundary the last regime extends forever.
class PiecewiseMeasure {
 public:
  PiecewiseMeasure(StagePlan plan, MeasureRole role);

  const StagePlan& plan() const { return plan_; }
  MeasureRole role() const { return role_; }

  double cylinder_log_mass(const CylinderAddress& address) const;
  // Spec governing every step taken while the path sits in `regime`.
  BernoulliSpec block_spec(int regime) const;

 private:
  StagePlan plan_;
  MeasureRole role_;
};

struct CounterexamplePair {
  PiecewiseMeasure mu;
  PiecewiseMeasure nu;
  StagePlan plan;
};

// Runs the stage-depth search for `stages` stages with targets epsilon^(k+1)
// at stage k (0-based). Requires epsilon in (0, 1/4) and delta in (0, 1).
CounterexamplePair build_pair(double epsilon, double delta, unsigned stages);

// One paired branch-probability class: within a regime the mu and nu steps
// for the same child bit differ by a fixed log gap.
struct RatioClass {
  int regime{0};
  int bit{0};
  double step_mu{0.0};
  double step_nu{0.0};
  double log_gap{0.0};  // |log step_mu - log step_nu|
  bool occurs{false};   // whether this regime is reachable within the depth
};

struct RatioReport {
  double sup_log_gap{0.0};
  std::array<RatioClass, 4> classes;
};

// Exact sup over cylinders up to `depth` of the per-step log-mass gap
// between the pair; analytic over the four ratio classes. Requires depth
// at most the deepest stage boundary.
RatioReport verify_ratio_condition(const PiecewiseMeasure& mu, const PiecewiseMeasure& nu,
                                   std::uint64_t depth);

struct DimensionGapReport {
  double dim_mu_estimate{0.0};  // limit of the mu-typical local exponent
  double dim_nu_bound{0.0};     // -h(delta) / log 2
  double gap{0.0};
  bool asymptotic{true};  // finite stage plans only certify the limit behaviour
  // Sums of per-stage exception masses (1 - min achieved); finite totals
  // are the summability evidence behind the asymptotic labels.
  double mu_exception_tail{0.0};
  double nu_exception_tail{0.0};
};

DimensionGapReport dimension_gap_report(const PiecewiseMeasure& mu, const PiecewiseMeasure& nu,
                                        const StagePlan& plan);

}  // namespace dyadim

#endif
