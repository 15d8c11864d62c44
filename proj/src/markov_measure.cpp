#include "dyadim/markov_measure.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dyadim {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_prob(double p) { return p > 0.0 ? std::log(p) : kNegInf; }

}  // namespace

CylinderAddress CylinderAddress::from_string(std::string_view bits) {
  CylinderAddress address;
  address.bits_.reserve(bits.size());
  for (char c : bits) {
    if (c != '0' && c != '1') {
      throw std::invalid_argument("cylinder address may contain only '0' and '1'");
    }
    address.bits_.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return address;
}

void CylinderAddress::push_back(int bit) {
  if (bit != 0 && bit != 1) {
    throw std::invalid_argument("cylinder address bit must be 0 or 1");
  }
  bits_.push_back(static_cast<std::uint8_t>(bit));
}

CylinderAddress CylinderAddress::child(int bit) const {
  CylinderAddress copy = *this;
  copy.push_back(bit);
  return copy;
}

std::string CylinderAddress::to_string() const {
  std::string out;
  out.reserve(bits_.size());
  for (auto bit : bits_) {
    out.push_back(static_cast<char>('0' + bit));
  }
  return out;
}

double MarkovMeasure::root_ratio(int bit) const {
  const double p0 = weights_.at(0).p;
  return bit == 0 ? p0 : 1.0 - p0;
}

double MarkovMeasure::child_ratio(std::uint64_t n, int last, int next) const {
  if (n == 0) {
    throw std::invalid_argument("child_ratio requires generation n >= 1");
  }
  const WeightPair pair = weights_.at(n);
  const double zero_prob = last == 0 ? pair.p : pair.q;
  return next == 0 ? zero_prob : 1.0 - zero_prob;
}

double MarkovMeasure::cylinder_log_mass(const CylinderAddress& address) const {
  if (address.empty()) {
    return 0.0;
  }
  double log_mass = log_prob(root_ratio(address.bit(0)));
  for (std::size_t i = 1; i < address.generation() && log_mass != kNegInf; ++i) {
    log_mass += log_prob(child_ratio(i, address.bit(i - 1), address.bit(i)));
  }
  return log_mass;
}

std::pair<double, double> MarkovMeasure::marginal_last_symbol(std::uint64_t n) const {
  if (n == 0) {
    throw std::invalid_argument("marginal_last_symbol requires generation n >= 1");
  }
  double pi0 = weights_.at(0).p;
  for (std::uint64_t m = 1; m < n; ++m) {
    const WeightPair pair = weights_.at(m);
    pi0 = pi0 * pair.p + (1.0 - pi0) * pair.q;
  }
  return {pi0, 1.0 - pi0};
}

std::vector<double> MarkovMeasure::marginals_pi0(std::uint64_t horizon) const {
  std::vector<double> out;
  out.reserve(horizon);
  double pi0 = weights_.at(0).p;
  for (std::uint64_t n = 1; n <= horizon; ++n) {
    out.push_back(pi0);
    const WeightPair pair = weights_.at(n);
    pi0 = pi0 * pair.p + (1.0 - pi0) * pair.q;
  }
  return out;
}

PathTrace MarkovMeasure::sample_path(std::uint64_t depth, SeededRng& rng) const {
  PathTrace trace;
  trace.increments.reserve(depth);
  trace.cumulative.reserve(depth);

  double cumulative = 0.0;
  int last = -1;
  for (std::uint64_t n = 0; n < depth; ++n) {
    double zero_prob;
    if (n == 0) {
      zero_prob = weights_.at(0).p;
    } else {
      const WeightPair pair = weights_.at(n);
      zero_prob = last == 0 ? pair.p : pair.q;
    }
    // uniform01() < 1, so a sure branch (probability 0 or 1) is never missed.
    const int bit = rng.uniform01() < zero_prob ? 0 : 1;
    const double taken = bit == 0 ? zero_prob : 1.0 - zero_prob;
    const double increment = log_prob(taken);
    cumulative += increment;
    trace.address.push_back(bit);
    trace.increments.push_back(increment);
    trace.cumulative.push_back(cumulative);
    last = bit;
  }
  return trace;
}

}  // namespace dyadim
