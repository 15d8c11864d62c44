#ifndef DYADIM_DETAIL_CSV_HPP
#define DYADIM_DETAIL_CSV_HPP

#include <cstdint>
#include <cstdio>
#include <string>

namespace dyadim::detail {

// 17 significant digits: enough for exact double round-trip in data files.
inline std::string fmt_full(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

// 6 decimals: the summary-line precision.
inline std::string fmt_summary(double value) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6f", value);
  return buf;
}

inline std::string fmt_u64(std::uint64_t value) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%llu", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace dyadim::detail

#endif
