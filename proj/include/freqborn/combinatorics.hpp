#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "freqborn/errors.hpp"

namespace freqborn {

inline constexpr std::uint64_t kMaxFactorialArgument = 100'000'000;

namespace detail {

inline constexpr std::array<std::uint64_t, 21> kExactFactorials = [] {
  std::array<std::uint64_t, 21> t{};
  t[0] = 1;
  for (std::size_t i = 1; i < t.size(); ++i) t[i] = t[i - 1] * i;
  return t;
}();

// ln(n!) in extended precision. Exact table (rounded once by logl) for
// n <= 20, Stirling series beyond; the series is truncated after the n^-9
// term, which leaves an absolute error below 1e-17 at n = 21.
inline long double log_factorial_ext(std::uint64_t n) {
  if (n > kMaxFactorialArgument)
    throw range_error("log_factorial: argument " + std::to_string(n) + " exceeds 1e8");
  if (n < kExactFactorials.size())
    return std::log(static_cast<long double>(kExactFactorials[n]));

  const long double x = static_cast<long double>(n);
  const long double inv = 1.0L / x;
  const long double inv2 = inv * inv;
  // B_2k / (2k (2k-1)) for k = 1..5
  const long double series =
      inv * (1.0L / 12 + inv2 * (-1.0L / 360 + inv2 * (1.0L / 1260 +
                                                        inv2 * (-1.0L / 1680 + inv2 * (1.0L / 1188)))));
  constexpr long double half_log_two_pi =
      0.918938533204672741780329736405617639861397473637783412817L;
  return (x + 0.5L) * std::log(x) - x + half_log_two_pi + series;
}

// ln C(N, n) with the larger factorial subtracted first, so the result is
// bit-identical under n <-> N - n.
inline long double log_binomial_ext(std::uint64_t total, std::uint64_t n) {
  const std::uint64_t k = std::min(n, total - n);
  return (log_factorial_ext(total) - log_factorial_ext(total - k)) - log_factorial_ext(k);
}

// ln(N!/prod n_i!). Factorials are subtracted in descending order of the
// counts, which makes the result permutation-invariant and makes the
// two-part case coincide with log_binomial_ext bit for bit.
inline long double log_multinomial_ext(std::span<const std::uint64_t> counts) {
  std::uint64_t total = 0;
  for (auto c : counts) {
    if (c > kMaxFactorialArgument || total > kMaxFactorialArgument - c)
      throw range_error("log_multinomial: total count exceeds 1e8");
    total += c;
  }
  std::vector<std::uint64_t> sorted(counts.begin(), counts.end());
  std::sort(sorted.begin(), sorted.end(), std::greater<>{});
  long double result = log_factorial_ext(total);
  for (auto c : sorted) result -= log_factorial_ext(c);
  return result;
}

}  // namespace detail

/// ln(n!) for 0 <= n <= 1e8, relative error below 1e-12.
inline double log_factorial(std::uint64_t n) {
  return static_cast<double>(detail::log_factorial_ext(n));
}

/// ln C(N, n); symmetric in n <-> N - n exactly.
inline double log_binomial(std::uint64_t total, std::uint64_t n) {
  if (n > total)
    throw domain_error("log_binomial: n = " + std::to_string(n) + " exceeds N = " +
                       std::to_string(total));
  return static_cast<double>(detail::log_binomial_ext(total, n));
}

/// ln(N!/prod n_i!) with N = sum of counts.
inline double log_multinomial(std::span<const std::uint64_t> counts) {
  if (counts.empty()) throw domain_error("log_multinomial: empty count list");
  return static_cast<double>(detail::log_multinomial_ext(counts));
}

/// Number of compositions of N into M nonnegative parts, C(N+M-1, M-1),
/// saturating at the largest long double instead of overflowing.
inline long double composition_count(std::uint64_t total, std::size_t levels) {
  if (levels == 0) return total == 0 ? 1.0L : 0.0L;
  const std::uint64_t top = total + levels - 1;
  const std::uint64_t k = std::min<std::uint64_t>(levels - 1, total);
  long double count = 1.0L;
  for (std::uint64_t i = 1; i <= k; ++i) {
    count = count * static_cast<long double>(top - k + i) / static_cast<long double>(i);
    if (std::isinf(count)) break;
  }
  return std::round(count);
}

}  // namespace freqborn
