#include "dyadim/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "dyadim/detail/binomial.hpp"
#include "dyadim/entropy.hpp"

namespace dyadim {

namespace {

void check_spec(const BernoulliSpec& spec) {
  if (!(spec.p0 > 0.0 && spec.p0 < 1.0)) {
    throw std::invalid_argument("Bernoulli spec requires p0 in (0, 1)");
  }
}

void check_regime(int regime) {
  if (regime != 0 && regime != 1) {
    throw std::invalid_argument("regime must be 0 or 1");
  }
}

struct ZWindow {
  std::int64_t lo{0};
  std::int64_t hi{-1};  // empty by default

  bool empty() const { return lo > hi; }

  ZWindow intersect(const ZWindow& other) const {
    return ZWindow{std::max(lo, other.lo), std::min(hi, other.hi)};
  }
};

// Integer zero-counts z of a length-n block whose per-symbol rate
// -log(mass)/n lies within halfwidth of center. The rate is affine in z, so
// the band is a lattice interval; endpoints get a tiny nudge so that exact
// lattice hits (halfwidth 0) stay inside despite rounding.
ZWindow band_window(const BernoulliSpec& spec, std::uint64_t n, double center,
                    double halfwidth) {
  const double c0 = -std::log1p(-spec.p0);
  const double slope = std::log((1.0 - spec.p0) / spec.p0) / static_cast<double>(n);
  const auto last = static_cast<std::int64_t>(n);
  if (slope == 0.0) {
    return std::abs(c0 - center) <= halfwidth ? ZWindow{0, last} : ZWindow{};
  }
  double lo_real = (center - halfwidth - c0) / slope;
  double hi_real = (center + halfwidth - c0) / slope;
  if (slope < 0.0) {
    std::swap(lo_real, hi_real);
  }
  const double nudge_lo = 1e-9 + std::abs(lo_real) * 1e-12;
  const double nudge_hi = 1e-9 + std::abs(hi_real) * 1e-12;
  ZWindow window;
  window.lo = std::max<std::int64_t>(static_cast<std::int64_t>(std::ceil(lo_real - nudge_lo)), 0);
  window.hi = std::min<std::int64_t>(static_cast<std::int64_t>(std::floor(hi_real + nudge_hi)),
                                     last);
  return window;
}

double window_mass(const BernoulliSpec& spec, std::uint64_t n, const ZWindow& window) {
  if (window.empty()) {
    return 0.0;
  }
  return detail::binomial_window_mass(n, spec.p0, window.lo, window.hi);
}

// Likelihood-ratio cut between the two specs of a regime: counts up to
// t_low are more probable under the lower-p0 spec, ties go high.
RegimeThreshold likelihood_cut(const BernoulliSpec& mu, const BernoulliSpec& nu,
                               std::uint64_t length) {
  if (mu.p0 == nu.p0) {
    throw std::invalid_argument("regime specs coincide; the pair is inseparable");
  }
  const bool mu_is_low = mu.p0 < nu.p0;
  const BernoulliSpec& low = mu_is_low ? mu : nu;
  const BernoulliSpec& high = mu_is_low ? nu : mu;
  const double a = std::log(low.p0) - std::log(high.p0);            // < 0
  const double b = std::log1p(-low.p0) - std::log1p(-high.p0);      // > 0
  const double crossing = static_cast<double>(length) * b / (b - a);

  RegimeThreshold cut;
  cut.present = true;
  cut.mu_is_low = mu_is_low;
  cut.t_low = static_cast<std::int64_t>(std::ceil(crossing)) - 1;
  cut.t_low = std::clamp<std::int64_t>(cut.t_low, -1, static_cast<std::int64_t>(length));
  return cut;
}

constexpr std::uint64_t kMaxBlockLength = 1ull << 28;

}  // namespace

double RegimeAchieved::min_value() const {
  return std::min(std::min(class_mu, class_nu), std::min(band_mu, band_nu));
}

BernoulliSpec mu_block_spec(double epsilon, double delta, int regime) {
  check_regime(regime);
  const BernoulliSpec spec{regime == 0 ? 0.5 : delta * (1.0 - epsilon)};
  check_spec(spec);
  return spec;
}

BernoulliSpec nu_block_spec(double epsilon, double delta, int regime) {
  check_regime(regime);
  const BernoulliSpec spec{regime == 0 ? 0.5 - epsilon : delta};
  check_spec(spec);
  return spec;
}

double epsilon_for_target_gap(double target_log_gap) {
  if (!(target_log_gap > 0.0)) {
    throw std::invalid_argument("target log gap must be positive");
  }
  return (1.0 - std::exp(-target_log_gap)) / 2.0;
}

double smb_concentration(const BernoulliSpec& spec, std::uint64_t n, double band_center,
                         double band_halfwidth) {
  check_spec(spec);
  if (n == 0) {
    throw std::invalid_argument("smb_concentration requires block length >= 1");
  }
  if (!(band_halfwidth >= 0.0)) {
    throw std::invalid_argument("band half-width must be >= 0");
  }
  return window_mass(spec, n, band_window(spec, n, band_center, band_halfwidth));
}

namespace {

// Certified masses of one candidate stage: per present regime, the mu and
// nu class masses (partition conditions) and the in-class entropy-band
// masses, all exact binomial window sums.
bool evaluate_stage(double epsilon, double delta, bool regime1_present, std::uint64_t length,
                    double target, StageThresholds& thresholds, StageAchieved& achieved) {
  thresholds = StageThresholds{};
  achieved = StageAchieved{};
  bool ok = true;
  const auto all = ZWindow{0, static_cast<std::int64_t>(length)};
  for (int regime = 0; regime < 2; ++regime) {
    if (regime == 1 && !regime1_present) {
      continue;
    }
    const BernoulliSpec mu = mu_block_spec(epsilon, delta, regime);
    const BernoulliSpec nu = nu_block_spec(epsilon, delta, regime);
    const RegimeThreshold cut = likelihood_cut(mu, nu, length);
    thresholds[regime] = cut;

    const ZWindow low{0, cut.t_low};
    const ZWindow high{cut.t_low + 1, static_cast<std::int64_t>(length)};
    const ZWindow mu_class = (cut.mu_is_low ? low : high).intersect(all);
    const ZWindow nu_class = (cut.mu_is_low ? high : low).intersect(all);

    RegimeAchieved result;
    result.present = true;
    result.class_mu = window_mass(mu, length, mu_class);
    result.class_nu = window_mass(nu, length, nu_class);
    const ZWindow mu_band =
        band_window(mu, length, -binary_entropy(mu.p0), target).intersect(mu_class);
    const ZWindow nu_band =
        band_window(nu, length, -binary_entropy(nu.p0), target).intersect(nu_class);
    result.band_mu = window_mass(mu, length, mu_band);
    result.band_nu = window_mass(nu, length, nu_band);
    achieved[regime] = result;

    ok = ok && result.class_mu > 1.0 - target && result.class_nu > 1.0 - target &&
         result.band_mu > 1.0 - target && result.band_nu > 1.0 - target;
  }
  return ok;
}

}  // namespace

StageResult find_stage_depth(const StagePlan& plan_so_far, unsigned stage, double target) {
  if (plan_so_far.depths.size() != stage) {
    throw std::invalid_argument("plan must already contain exactly the stages below the search");
  }
  if (!(target > 0.0 && target < 1.0)) {
    throw std::invalid_argument("stage target must lie in (0, 1)");
  }
  const double epsilon = plan_so_far.epsilon;
  const double delta = plan_so_far.delta;
  const bool regime1_present = stage > 0;

  // Fail fast on inseparable regimes before any searching.
  likelihood_cut(mu_block_spec(epsilon, delta, 0), nu_block_spec(epsilon, delta, 0), 2);
  if (regime1_present) {
    likelihood_cut(mu_block_spec(epsilon, delta, 1), nu_block_spec(epsilon, delta, 1), 2);
  }

  StageThresholds thresholds;
  StageAchieved achieved;
  const auto predicate = [&](std::uint64_t length) {
    return evaluate_stage(epsilon, delta, regime1_present, length, target, thresholds, achieved);
  };

  std::uint64_t hi = 1;
  while (!predicate(hi)) {
    if (hi >= kMaxBlockLength) {
      throw std::runtime_error("stage depth search exceeded the block length cap");
    }
    hi *= 2;
  }
  std::uint64_t lo = hi / 2;  // 0 when hi == 1; predicate(lo) known false otherwise
  while (hi - lo > 1) {
    const std::uint64_t mid = lo + (hi - lo) / 2;
    if (predicate(mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  predicate(hi);  // re-fill thresholds/achieved for the chosen length

  const std::uint64_t base = plan_so_far.depths.empty() ? 0 : plan_so_far.depths.back();
  return StageResult{base + hi, thresholds, achieved};
}

CounterexamplePair build_pair(double epsilon, double delta, unsigned stages) {
  if (!(epsilon > 0.0 && epsilon < 0.25)) {
    throw std::invalid_argument("epsilon must lie in (0, 1/4)");
  }
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (stages == 0) {
    throw std::invalid_argument("at least one stage is required");
  }

  StagePlan plan;
  plan.epsilon = epsilon;
  plan.delta = delta;
  double target = epsilon;
  for (unsigned stage = 0; stage < stages; ++stage) {
    const StageResult result = find_stage_depth(plan, stage, target);
    plan.depths.push_back(result.depth);
    plan.thresholds.push_back(result.thresholds);
    plan.achieved.push_back(result.achieved);
    target *= epsilon;
  }
  return CounterexamplePair{PiecewiseMeasure(plan, MeasureRole::Mu),
                            PiecewiseMeasure(plan, MeasureRole::Nu), plan};
}

PiecewiseMeasure::PiecewiseMeasure(StagePlan plan, MeasureRole role)
    : plan_(std::move(plan)), role_(role) {
  if (plan_.depths.empty() || plan_.thresholds.size() != plan_.depths.size()) {
    throw std::invalid_argument("stage plan needs matching depths and thresholds");
  }
  for (std::size_t i = 1; i < plan_.depths.size(); ++i) {
    if (plan_.depths[i] <= plan_.depths[i - 1]) {
      throw std::invalid_argument("stage depths must be strictly increasing");
    }
  }
}

BernoulliSpec PiecewiseMeasure::block_spec(int regime) const {
  return role_ == MeasureRole::Mu ? mu_block_spec(plan_.epsilon, plan_.delta, regime)
                                  : nu_block_spec(plan_.epsilon, plan_.delta, regime);
}

double PiecewiseMeasure::cylinder_log_mass(const CylinderAddress& address) const {
  const double log_p[2] = {std::log(block_spec(0).p0), std::log(block_spec(1).p0)};
  const double log_1mp[2] = {std::log1p(-block_spec(0).p0), std::log1p(-block_spec(1).p0)};

  double log_mass = 0.0;
  int regime = 0;
  std::uint64_t zeros = 0;
  std::size_t stage = 0;
  for (std::size_t i = 0; i < address.generation(); ++i) {
    if (stage < plan_.depths.size() && i == plan_.depths[stage]) {
      const RegimeThreshold& cut = plan_.thresholds[stage][regime];
      const bool low = static_cast<std::int64_t>(zeros) <= cut.t_low;
      regime = low == cut.mu_is_low ? 0 : 1;
      zeros = 0;
      ++stage;
    }
    if (address.bit(i) == 0) {
      log_mass += log_p[regime];
      ++zeros;
    } else {
      log_mass += log_1mp[regime];
    }
  }
  return log_mass;
}

RatioReport verify_ratio_condition(const PiecewiseMeasure& mu, const PiecewiseMeasure& nu,
                                   std::uint64_t depth) {
  if (mu.role() != MeasureRole::Mu || nu.role() != MeasureRole::Nu) {
    throw std::invalid_argument("verify_ratio_condition expects a (mu, nu) pair");
  }
  const StagePlan& plan = mu.plan();
  if (nu.plan().epsilon != plan.epsilon || nu.plan().delta != plan.delta ||
      nu.plan().depths != plan.depths) {
    throw std::invalid_argument("the two measures must share one stage plan");
  }
  if (depth == 0 || depth > plan.depths.back()) {
    throw std::invalid_argument("depth must lie in [1, deepest stage boundary]");
  }

  // Regime 1 is reachable once the first boundary has been crossed and the
  // stage-1 cut sends some count to the nu side.
  const RegimeThreshold& first_cut = plan.thresholds.front()[0];
  const std::int64_t block = static_cast<std::int64_t>(plan.depths.front());
  const bool class1_reachable = first_cut.mu_is_low
                                    ? first_cut.t_low < block
                                    : first_cut.t_low >= 0;
  const bool regime1_occurs = depth > plan.depths.front() && class1_reachable;

  RatioReport report;
  std::size_t index = 0;
  for (int regime = 0; regime < 2; ++regime) {
    const double pm = mu.block_spec(regime).p0;
    const double pn = nu.block_spec(regime).p0;
    for (int bit = 0; bit < 2; ++bit) {
      RatioClass entry;
      entry.regime = regime;
      entry.bit = bit;
      entry.step_mu = bit == 0 ? pm : 1.0 - pm;
      entry.step_nu = bit == 0 ? pn : 1.0 - pn;
      entry.log_gap = std::abs(std::log(entry.step_mu) - std::log(entry.step_nu));
      entry.occurs = regime == 0 || regime1_occurs;
      if (entry.occurs) {
        report.sup_log_gap = std::max(report.sup_log_gap, entry.log_gap);
      }
      report.classes[index++] = entry;
    }
  }
  return report;
}

DimensionGapReport dimension_gap_report(const PiecewiseMeasure& mu, const PiecewiseMeasure& nu,
                                        const StagePlan& plan) {
  if (mu.role() != MeasureRole::Mu || nu.role() != MeasureRole::Nu) {
    throw std::invalid_argument("dimension_gap_report expects a (mu, nu) pair");
  }
  DimensionGapReport report;
  // mu concentrates on paths that settle into the unbiased regime, whose
  // local exponent tends to 1; nu settles into the delta regime.
  report.dim_mu_estimate = 1.0;
  report.dim_nu_bound = -binary_entropy(plan.delta) / std::numbers::ln2;
  report.gap = report.dim_mu_estimate - report.dim_nu_bound;
  report.asymptotic = true;
  for (const StageAchieved& achieved : plan.achieved) {
    for (const RegimeAchieved& regime : achieved) {
      if (!regime.present) {
        continue;
      }
      report.mu_exception_tail += 1.0 - std::min(regime.class_mu, regime.band_mu);
      report.nu_exception_tail += 1.0 - std::min(regime.class_nu, regime.band_nu);
    }
  }
  return report;
}

std::string to_json(const StagePlan& plan) {
  nlohmann::json j;
  j["epsilon"] = plan.epsilon;
  j["delta"] = plan.delta;
  j["depths"] = plan.depths;
  j["thresholds"] = nlohmann::json::array();
  for (const StageThresholds& stage : plan.thresholds) {
    nlohmann::json row = nlohmann::json::array();
    for (int regime = 0; regime < 2; ++regime) {
      const RegimeThreshold& cut = stage[regime];
      row.push_back({{"regime", regime},
                     {"present", cut.present},
                     {"t_low", cut.t_low},
                     {"mu_is_low", cut.mu_is_low}});
    }
    j["thresholds"].push_back(row);
  }
  j["achieved"] = nlohmann::json::array();
  for (const StageAchieved& stage : plan.achieved) {
    nlohmann::json row = nlohmann::json::array();
    for (int regime = 0; regime < 2; ++regime) {
      const RegimeAchieved& a = stage[regime];
      row.push_back({{"regime", regime},
                     {"present", a.present},
                     {"class_mu", a.class_mu},
                     {"class_nu", a.class_nu},
                     {"band_mu", a.band_mu},
                     {"band_nu", a.band_nu}});
    }
    j["achieved"].push_back(row);
  }
  return j.dump(2);
}

}  // namespace dyadim
