#pragma once

// Test-only reference computations. Nothing here calls into the library's
// combinatorics or decomposition code.

#include <cmath>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

namespace freqborn::oracle {

using u128 = unsigned __int128;

// Exact C(N, n) for N <= 120 or so (result must fit in 128 bits).
inline u128 binomial(std::uint64_t total, std::uint64_t n) {
  if (n > total) return 0;
  if (n > total - n) n = total - n;
  u128 c = 1;
  for (std::uint64_t i = 1; i <= n; ++i) c = c * (total - n + i) / i;
  return c;
}

inline u128 factorial(std::uint64_t n) {
  u128 f = 1;
  for (std::uint64_t i = 2; i <= n; ++i) f *= i;
  return f;
}

// N! / prod n_i!, built as a product of binomials so it stays exact.
inline u128 multinomial(std::span<const std::uint64_t> counts) {
  u128 result = 1;
  std::uint64_t running = 0;
  for (auto c : counts) {
    running += c;
    result *= binomial(running, c);
  }
  return result;
}

inline long double log_exact(u128 x) { return std::log(static_cast<long double>(x)); }

// Distribution of the number of level-0 outcomes among N two-level copies,
// summed over all 2^N outcome strings. Each string's probability is a
// product of N factors, accumulated one copy at a time.
inline std::vector<long double> two_level_by_sequences(long double p, unsigned copies) {
  std::vector<long double> out(copies + 1, 0.0L);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << copies); ++mask) {
    long double prob = 1.0L;
    unsigned hits = 0;
    for (unsigned j = 0; j < copies; ++j) {
      if ((mask >> j) & 1U) {
        prob *= p;
        ++hits;
      } else {
        prob *= 1.0L - p;
      }
    }
    out[hits] += prob;
  }
  return out;
}

// Every composition of N into M parts, ascending lexicographic order.
inline std::vector<std::vector<std::uint64_t>> compositions(std::uint64_t total, std::size_t parts) {
  std::vector<std::vector<std::uint64_t>> out;
  std::vector<std::uint64_t> cur(parts, 0);
  auto rec = [&](auto&& self, std::size_t pos, std::uint64_t left) -> void {
    if (pos + 1 == parts) {
      cur[pos] = left;
      out.push_back(cur);
      return;
    }
    for (std::uint64_t v = 0; v <= left; ++v) {
      cur[pos] = v;
      self(self, pos + 1, left - v);
    }
  };
  rec(rec, 0, total);
  return out;
}

}  // namespace freqborn::oracle
