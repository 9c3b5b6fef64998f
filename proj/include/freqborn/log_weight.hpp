#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <limits>
#include <span>

#include "freqborn/errors.hpp"

namespace freqborn {

/// A nonnegative weight stored as its natural logarithm.
///
/// Weight 0 is a distinguished element rather than a very negative number.
/// Every operation tests for it explicitly, so no arithmetic is ever done on
/// the sentinel itself. A default-constructed LogWeight is zero.
class LogWeight {
 public:
  constexpr LogWeight() noexcept = default;

  static constexpr LogWeight zero() noexcept { return LogWeight{}; }
  static constexpr LogWeight one() noexcept { return LogWeight{0.0}; }

  static LogWeight from_log(double log_value) {
    if (std::isnan(log_value) || log_value == std::numeric_limits<double>::infinity())
      throw domain_error("LogWeight: log value must be finite or -inf");
    if (log_value == -std::numeric_limits<double>::infinity()) return zero();
    return LogWeight{log_value};
  }

  static LogWeight from_linear(double weight) {
    if (!(weight >= 0.0) || std::isinf(weight))
      throw domain_error("LogWeight: linear weight must be finite and nonnegative");
    if (weight == 0.0) return zero();
    return LogWeight{std::log(weight)};
  }

  constexpr bool is_zero() const noexcept { return zero_; }

  // -inf for the zero element.
  constexpr double log() const noexcept {
    return zero_ ? -std::numeric_limits<double>::infinity() : value_;
  }

  double linear() const noexcept { return zero_ ? 0.0 : std::exp(value_); }

  friend LogWeight operator*(LogWeight lhs, LogWeight rhs) noexcept {
    if (lhs.zero_ || rhs.zero_) return zero();
    return LogWeight{lhs.value_ + rhs.value_};
  }

  friend constexpr bool operator==(LogWeight lhs, LogWeight rhs) noexcept {
    if (lhs.zero_ || rhs.zero_) return lhs.zero_ == rhs.zero_;
    return lhs.value_ == rhs.value_;
  }

  friend constexpr std::partial_ordering operator<=>(LogWeight lhs, LogWeight rhs) noexcept {
    if (lhs.zero_ && rhs.zero_) return std::partial_ordering::equivalent;
    if (lhs.zero_) return std::partial_ordering::less;
    if (rhs.zero_) return std::partial_ordering::greater;
    return lhs.value_ <=> rhs.value_;
  }

 private:
  constexpr explicit LogWeight(double v) noexcept : value_(v), zero_(false) {}

  double value_ = 0.0;
  bool zero_ = true;
};

/// log(sum_i exp(v_i)) with a max shift. The empty sum is the zero element.
inline LogWeight log_sum_exp(std::span<const LogWeight> values) {
  bool any = false;
  double max_value = 0.0;
  for (const LogWeight& v : values) {
    if (v.is_zero()) continue;
    if (!any || v.log() > max_value) max_value = v.log();
    any = true;
  }
  if (!any) return LogWeight::zero();

  long double sum = 0.0L;
  for (const LogWeight& v : values) {
    if (v.is_zero()) continue;
    sum += std::exp(static_cast<long double>(v.log()) - max_value);
  }
  return LogWeight::from_log(static_cast<double>(max_value + std::log(sum)));
}

/// Streaming log-sum-exp. Rescales on a new running maximum, so the result
/// depends on insertion order only in the last bits; callers that need
/// reproducible output feed it in a fixed order.
class LogAccumulator {
 public:
  void add(LogWeight w) noexcept {
    if (w.is_zero()) return;
    const long double v = w.log();
    if (empty_) {
      max_ = v;
      sum_ = 1.0L;
      empty_ = false;
    } else if (v > max_) {
      sum_ = sum_ * std::exp(max_ - v) + 1.0L;
      max_ = v;
    } else {
      sum_ += std::exp(v - max_);
    }
  }

  LogWeight value() const {
    if (empty_) return LogWeight::zero();
    return LogWeight::from_log(static_cast<double>(max_ + std::log(sum_)));
  }

  // Linear value evaluated in extended precision before rounding.
  double linear() const noexcept {
    if (empty_) return 0.0;
    return static_cast<double>(std::exp(max_ + std::log(sum_)));
  }

 private:
  long double max_ = 0.0L;
  long double sum_ = 0.0L;
  bool empty_ = true;
};

}  // namespace freqborn
