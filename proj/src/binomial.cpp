#include "dyadim/detail/binomial.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dyadim/detail/kahan.hpp"

namespace dyadim::detail {

double binomial_log_pmf(std::uint64_t n, double p, std::uint64_t z) {
  const auto dn = static_cast<double>(n);
  const auto dz = static_cast<double>(z);
  return std::lgamma(dn + 1.0) - std::lgamma(dz + 1.0) - std::lgamma(dn - dz + 1.0) +
         dz * std::log(p) + (dn - dz) * std::log1p(-p);
}

double binomial_window_mass(std::uint64_t n, double p, std::int64_t z_lo, std::int64_t z_hi) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("binomial probability must lie in [0, 1]");
  }
  z_lo = std::max<std::int64_t>(z_lo, 0);
  z_hi = std::min<std::int64_t>(z_hi, static_cast<std::int64_t>(n));
  if (z_lo > z_hi) {
    return 0.0;
  }
  if (p == 0.0) {
    return z_lo == 0 ? 1.0 : 0.0;
  }
  if (p == 1.0) {
    return z_hi == static_cast<std::int64_t>(n) ? 1.0 : 0.0;
  }

  // Anchor at the in-window mode; pmf terms are non-increasing away from it
  // in both sweep directions, so the relative cutoff only sheds negligible
  // in-window mass (the result is a tight lower bound).
  const auto mode = static_cast<std::int64_t>(std::floor((static_cast<double>(n) + 1.0) * p));
  const std::int64_t anchor = std::clamp(mode, z_lo, z_hi);
  const double anchor_term =
      std::exp(binomial_log_pmf(n, p, static_cast<std::uint64_t>(anchor)));
  if (anchor_term <= 0.0) {
    return 0.0;  // whole window is below double underflow
  }

  const double odds = p / (1.0 - p);
  constexpr double kRelCutoff = 1e-19;

  KahanSum sum;
  sum.add(anchor_term);

  double term = anchor_term;
  for (std::int64_t z = anchor + 1; z <= z_hi; ++z) {
    term *= odds * (static_cast<double>(n) - static_cast<double>(z) + 1.0) /
            static_cast<double>(z);
    sum.add(term);
    if (term < sum.value() * kRelCutoff) {
      break;
    }
  }
  term = anchor_term;
  for (std::int64_t z = anchor - 1; z >= z_lo; --z) {
    term *= (static_cast<double>(z) + 1.0) /
            (odds * (static_cast<double>(n) - static_cast<double>(z)));
    sum.add(term);
    if (term < sum.value() * kRelCutoff) {
      break;
    }
  }
  return std::min(sum.value(), 1.0);
}

}  // namespace dyadim::detail
