#ifndef DYADIM_DETAIL_KAHAN_HPP
#define DYADIM_DETAIL_KAHAN_HPP

#include <cmath>

namespace dyadim::detail {

// Kahan-Neumaier compensated accumulator; keeps long profile and tail sums
// accurate at horizons well past 10^4 terms.
struct KahanSum {
  double sum{0.0};
  double comp{0.0};

  void add(double value) {
    const double t = sum + value;
    if (std::abs(sum) >= std::abs(value)) {
      comp += (sum - t) + value;
    } else {
      comp += (value - t) + sum;
    }
    sum = t;
  }

  double value() const { return sum + comp; }
};

}  // namespace dyadim::detail

#endif
