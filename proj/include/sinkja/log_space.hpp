#ifndef SINKJA_LOG_SPACE_HPP
#define SINKJA_LOG_SPACE_HPP

#include <cmath>
#include <limits>

namespace sinkja {

// Exact zero in log space. Structural zeros (gangster entries, permutation
// zeros) are stored as -inf and excluded from every reduction.
inline constexpr double log_zero = -std::numeric_limits<double>::infinity();

inline bool is_log_zero(double lv) { return std::isinf(lv) && lv < 0.0; }

// log(exp(a) + exp(b)) without leaving log space.
inline double log_add(double a, double b) {
  if (is_log_zero(a)) return b;
  if (is_log_zero(b)) return a;
  const double m = a > b ? a : b;
  const double d = a > b ? b - a : a - b;
  return m + std::log1p(std::exp(d));
}

// log(sum_t exp(value_at(t))) over t in [0, count), skipping -inf entries.
// Fixed ascending evaluation order keeps the reduction deterministic.
template <class F>
double log_sum_exp(int count, F&& value_at) {
  double m = log_zero;
  for (int t = 0; t < count; ++t) {
    const double lv = value_at(t);
    if (lv > m) m = lv;
  }
  if (is_log_zero(m)) return log_zero;
  double s = 0.0;
  for (int t = 0; t < count; ++t) {
    const double lv = value_at(t);
    if (!is_log_zero(lv)) s += std::exp(lv - m);
  }
  return m + std::log(s);
}

}  // namespace sinkja

#endif
