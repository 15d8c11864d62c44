#ifndef DYADIM_DETAIL_BINOMIAL_HPP
#define DYADIM_DETAIL_BINOMIAL_HPP

#include <cstdint>

namespace dyadim::detail {

// P(z_lo <= Z <= z_hi) for Z ~ Binomial(n, p), by direct pmf summation
// outward from the in-window mode. Terms below the running sum times 1e-19
// are dropped; the truncation only discards in-window mass, so the result
// is a (tight) lower bound suitable for certifying ">= 1 - target" checks.
double binomial_window_mass(std::uint64_t n, double p, std::int64_t z_lo, std::int64_t z_hi);

// log C(n, z) + z log p + (n - z) log(1 - p)
double binomial_log_pmf(std::uint64_t n, double p, std::uint64_t z);

}  // namespace dyadim::detail

#endif
