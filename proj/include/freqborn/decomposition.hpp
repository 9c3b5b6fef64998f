#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "freqborn/combinatorics.hpp"
#include "freqborn/errors.hpp"
#include "freqborn/log_weight.hpp"
#include "freqborn/state.hpp"

namespace freqborn {

/// Occupation counts n_i of one fixed-frequency sector, with N = sum n_i.
struct FrequencyVector {
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;

  double relative(std::size_t level) const {
    return static_cast<double>(counts.at(level)) / static_cast<double>(total);
  }
};

/// Weights |c_N({n_i})|^2 (in logs) of an N-copy repetition state over the
/// fixed-relative-frequency sectors.
///
/// Entries are ordered lexicographically by their count vectors. Two-level
/// decompositions are dense: entry n is the sector (n, N - n), i.e. n copies
/// in level 0. Every composition of N into M parts appears exactly once; the
/// ones forbidden by a zero amplitude carry LogWeight::zero().
class FrequencyDecomposition {
 public:
  static FrequencyDecomposition dense_two_level(std::uint64_t copies,
                                                std::vector<double> level_probabilities,
                                                std::vector<LogWeight> weights) {
    if (level_probabilities.size() != 2)
      throw domain_error("dense_two_level: need two level probabilities");
    if (weights.size() != copies + 1)
      throw domain_error("dense_two_level: expected N + 1 weights");
    FrequencyDecomposition d;
    d.copies_ = copies;
    d.levels_ = 2;
    d.probabilities_ = std::move(level_probabilities);
    d.weights_ = std::move(weights);
    return d;
  }

  // `counts` is row-major, one row of `levels` entries per weight.
  static FrequencyDecomposition enumerated(std::uint64_t copies, std::size_t levels,
                                           std::vector<double> level_probabilities,
                                           std::vector<std::uint32_t> counts,
                                           std::vector<LogWeight> weights) {
    if (levels < 2 || level_probabilities.size() != levels)
      throw domain_error("enumerated: level count mismatch");
    if (counts.size() != weights.size() * levels)
      throw domain_error("enumerated: counts and weights disagree in size");
    for (std::size_t e = 0; e < weights.size(); ++e) {
      std::uint64_t sum = 0;
      for (std::size_t l = 0; l < levels; ++l) sum += counts[e * levels + l];
      if (sum != copies) throw domain_error("enumerated: a count row does not sum to N");
    }
    if (levels == 2) {
      for (std::size_t e = 0; e < weights.size(); ++e)
        if (counts[2 * e] != e) throw domain_error("enumerated: two-level rows must be n = 0..N");
      return dense_two_level(copies, std::move(level_probabilities), std::move(weights));
    }
    FrequencyDecomposition d;
    d.copies_ = copies;
    d.levels_ = levels;
    d.probabilities_ = std::move(level_probabilities);
    d.counts_ = std::move(counts);
    d.weights_ = std::move(weights);
    return d;
  }

  std::uint64_t copies() const noexcept { return copies_; }
  std::size_t levels() const noexcept { return levels_; }
  std::size_t size() const noexcept { return weights_.size(); }
  bool is_two_level() const noexcept { return levels_ == 2; }

  std::uint64_t count(std::size_t entry, std::size_t level) const {
    if (levels_ == 2) return level == 0 ? entry : copies_ - entry;
    return counts_[entry * levels_ + level];
  }

  double relative_frequency(std::size_t entry, std::size_t level) const {
    return static_cast<double>(count(entry, level)) / static_cast<double>(copies_);
  }

  FrequencyVector frequency(std::size_t entry) const {
    FrequencyVector f;
    f.total = copies_;
    f.counts.reserve(levels_);
    for (std::size_t l = 0; l < levels_; ++l) f.counts.push_back(count(entry, l));
    return f;
  }

  LogWeight weight(std::size_t entry) const { return weights_.at(entry); }
  std::span<const LogWeight> weights() const noexcept { return weights_; }

  double level_probability(std::size_t level) const {
    if (level >= levels_)
      throw domain_error("level index " + std::to_string(level) + " out of range for M = " +
                         std::to_string(levels_));
    return probabilities_[level];
  }
  std::span<const double> level_probabilities() const noexcept { return probabilities_; }

 private:
  FrequencyDecomposition() = default;

  std::uint64_t copies_ = 0;
  std::size_t levels_ = 0;
  std::vector<double> probabilities_;
  std::vector<std::uint32_t> counts_;  // empty on the dense two-level path
  std::vector<LogWeight> weights_;
};

/// Per-level moments of the relative frequency r_i = n_i / N.
struct MomentReport {
  std::size_t level = 0;
  double probability = 0.0;          // |a_i|^2, the centring point
  double mean = 0.0;                 // sum r w
  double variance = 0.0;             // sum (r - |a_i|^2)^2 w
  double empirical_variance = 0.0;   // sum (r - mean)^2 w
  double predicted_variance = 0.0;   // |a_i|^2 (1 - |a_i|^2) / N
  double mean_deviation = 0.0;       // |mean - |a_i|^2|
  double variance_deviation = 0.0;   // |variance - predicted_variance|
};

namespace detail {

struct LevelLogs {
  std::vector<long double> log_probability;
  std::vector<bool> vanishing;
};

inline LevelLogs level_logs(const SingleCopyState& state) {
  LevelLogs out;
  for (std::size_t i = 0; i < state.levels(); ++i) {
    const long double p = state.probability_ext(i);
    out.vanishing.push_back(p == 0.0L);
    out.log_probability.push_back(p == 0.0L ? 0.0L : std::log(p));
  }
  return out;
}

// sum_i n_i ln p_i over the occupied levels, accumulated left to right.
// Returns false when an occupied level has zero amplitude.
template <class Counts>
bool amplitude_log_term(const Counts& counts, const LevelLogs& logs, long double& term) {
  term = 0.0L;
  for (std::size_t i = 0; i < logs.log_probability.size(); ++i) {
    const std::uint64_t n = counts[i];
    if (n == 0) continue;
    if (logs.vanishing[i]) return false;
    term += static_cast<long double>(n) * logs.log_probability[i];
  }
  return true;
}

inline std::vector<double> rounded_probabilities(const SingleCopyState& state) {
  return state.probabilities();
}

}  // namespace detail

/// |c_N(n)|^2 = C(N, n) |a|^(2n) |b|^(2(N-n)) for n = 0..N, in logs.
inline FrequencyDecomposition decompose_two_level(const SingleCopyState& state, std::uint64_t copies,
                                                  const Limits& limits = {}) {
  if (state.levels() != 2)
    throw domain_error("decompose_two_level: state has " + std::to_string(state.levels()) +
                       " levels, expected 2");
  if (copies == 0 || copies > limits.max_two_level_n)
    throw range_error("decompose_two_level: N = " + std::to_string(copies) +
                      " outside [1, " + std::to_string(limits.max_two_level_n) + "]");
  const auto logs = detail::level_logs(state);
  std::vector<LogWeight> weights(copies + 1);
  std::array<std::uint64_t, 2> counts{};
  for (std::uint64_t n = 0; n <= copies; ++n) {
    counts = {n, copies - n};
    long double term;
    if (!detail::amplitude_log_term(counts, logs, term)) continue;
    const long double log_w = detail::log_binomial_ext(copies, n) + term;
    weights[n] = LogWeight::from_log(static_cast<double>(log_w));
  }
  return FrequencyDecomposition::dense_two_level(copies, detail::rounded_probabilities(state),
                                                 std::move(weights));
}

/// Multinomial decomposition over every composition of N into M parts,
/// enumerated in ascending lexicographic order.
inline FrequencyDecomposition decompose_multilevel(const SingleCopyState& state, std::uint64_t copies,
                                                   const Limits& limits = {}) {
  if (copies == 0) throw range_error("decompose_multilevel: N must be positive");
  const std::size_t levels = state.levels();
  const long double entries = composition_count(copies, levels);
  if (entries > static_cast<long double>(limits.max_compositions))
    throw capacity_error("decompose_multilevel: " + std::to_string(static_cast<double>(entries)) +
                             " compositions exceed the limit of " +
                             std::to_string(limits.max_compositions),
                         entries, static_cast<long double>(limits.max_compositions));
  if (copies > kMaxFactorialArgument)
    throw range_error("decompose_multilevel: N exceeds 1e8");

  const auto logs = detail::level_logs(state);
  const auto n_entries = static_cast<std::size_t>(entries);
  std::vector<std::uint32_t> counts;
  counts.reserve(n_entries * levels);
  std::vector<LogWeight> weights;
  weights.reserve(n_entries);

  std::vector<std::uint64_t> current(levels, 0);
  current.back() = copies;
  std::vector<std::uint64_t> scratch(levels);
  const long double log_total_factorial = detail::log_factorial_ext(copies);
  while (true) {
    for (auto c : current) counts.push_back(static_cast<std::uint32_t>(c));
    long double term;
    if (detail::amplitude_log_term(current, logs, term)) {
      // Same operation order as detail::log_multinomial_ext.
      std::copy(current.begin(), current.end(), scratch.begin());
      std::sort(scratch.begin(), scratch.end(), std::greater<>{});
      long double log_coeff = log_total_factorial;
      for (auto c : scratch) log_coeff -= detail::log_factorial_ext(c);
      weights.push_back(LogWeight::from_log(static_cast<double>(log_coeff + term)));
    } else {
      weights.push_back(LogWeight::zero());
    }

    // Advance: the rightmost position below M-1 with copies to its right
    // gains one; the remainder collapses into the last level.
    std::uint64_t right = 0;
    std::size_t pivot = levels - 1;
    bool advanced = false;
    while (pivot > 0) {
      right += current[pivot];
      --pivot;
      if (right > 0) {
        ++current[pivot];
        for (std::size_t j = pivot + 1; j + 1 < levels; ++j) current[j] = 0;
        current[levels - 1] = right - 1;
        advanced = true;
        break;
      }
    }
    if (!advanced) break;
  }
  return FrequencyDecomposition::enumerated(copies, levels, detail::rounded_probabilities(state),
                                            std::move(counts), std::move(weights));
}

/// Expands |psi>^N sequence by sequence: each of the M^N outcome strings
/// contributes prod_j |a_{s_j}|^2 to the sector of its occupation counts.
/// Shares nothing with the closed-form routes beyond std::norm.
inline FrequencyDecomposition brute_force_decompose(const SingleCopyState& state, std::uint64_t copies,
                                                    const Limits& limits = {}) {
  if (copies == 0) throw range_error("brute_force_decompose: N must be positive");
  const std::size_t levels = state.levels();
  const long double sequences =
      std::pow(static_cast<long double>(levels), static_cast<long double>(copies));
  if (sequences > static_cast<long double>(limits.max_sequences))
    throw capacity_error("brute_force_decompose: M^N = " +
                             std::to_string(static_cast<double>(sequences)) +
                             " sequences exceed the limit of " +
                             std::to_string(limits.max_sequences),
                         sequences, static_cast<long double>(limits.max_sequences));

  std::vector<long double> single;
  for (const auto& a : state.amplitudes()) single.push_back(std::norm(a));

  std::map<std::vector<std::uint32_t>, long double> sectors;
  std::vector<std::uint32_t> occupation(levels, 0);
  std::function<void(std::uint64_t, long double)> expand = [&](std::uint64_t depth,
                                                               long double amplitude_sq) {
    if (depth == copies) {
      sectors[occupation] += amplitude_sq;
      return;
    }
    for (std::size_t s = 0; s < levels; ++s) {
      ++occupation[s];
      expand(depth + 1, amplitude_sq * single[s]);
      --occupation[s];
    }
  };
  expand(0, 1.0L);

  std::vector<std::uint32_t> counts;
  std::vector<LogWeight> weights;
  for (const auto& [occ, mass] : sectors) {
    counts.insert(counts.end(), occ.begin(), occ.end());
    weights.push_back(mass > 0.0L ? LogWeight::from_log(static_cast<double>(std::log(mass)))
                                  : LogWeight::zero());
  }
  return FrequencyDecomposition::enumerated(copies, levels, state.probabilities(), std::move(counts),
                                            std::move(weights));
}

/// sum of all weights; 1 within 1e-10 for any valid state.
inline double total_mass(const FrequencyDecomposition& decomp) {
  return log_sum_exp(decomp.weights()).linear();
}

inline MomentReport frequency_moments(const FrequencyDecomposition& decomp, std::size_t level) {
  MomentReport report;
  report.level = level;
  report.probability = decomp.level_probability(level);
  const long double p = report.probability;
  const long double copies = static_cast<long double>(decomp.copies());

  long double mean = 0.0L;
  long double centred = 0.0L;
  for (std::size_t e = 0; e < decomp.size(); ++e) {
    const LogWeight w = decomp.weight(e);
    if (w.is_zero()) continue;
    const long double lin = std::exp(static_cast<long double>(w.log()));
    const long double r = static_cast<long double>(decomp.count(e, level)) / copies;
    mean += r * lin;
    centred += (r - p) * (r - p) * lin;
  }
  long double empirical = 0.0L;
  for (std::size_t e = 0; e < decomp.size(); ++e) {
    const LogWeight w = decomp.weight(e);
    if (w.is_zero()) continue;
    const long double lin = std::exp(static_cast<long double>(w.log()));
    const long double r = static_cast<long double>(decomp.count(e, level)) / copies;
    empirical += (r - mean) * (r - mean) * lin;
  }
  report.mean = static_cast<double>(mean);
  report.variance = static_cast<double>(centred);
  report.empirical_variance = static_cast<double>(empirical);
  report.predicted_variance = report.probability * (1.0 - report.probability) /
                              static_cast<double>(decomp.copies());
  report.mean_deviation = std::fabs(report.mean - report.probability);
  report.variance_deviation = std::fabs(report.variance - report.predicted_variance);
  return report;
}

/// Weights summed over every level except `level`, indexed by n_level = 0..N.
inline std::vector<LogWeight> marginalize(const FrequencyDecomposition& decomp, std::size_t level) {
  (void)decomp.level_probability(level);
  std::vector<LogAccumulator> acc(decomp.copies() + 1);
  for (std::size_t e = 0; e < decomp.size(); ++e) acc[decomp.count(e, level)].add(decomp.weight(e));
  std::vector<LogWeight> out;
  out.reserve(acc.size());
  for (const auto& a : acc) out.push_back(a.value());
  return out;
}

}  // namespace freqborn
