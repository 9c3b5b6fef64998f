#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "freqborn/decomposition.hpp"
#include "freqborn/errors.hpp"
#include "freqborn/log_weight.hpp"
#include "freqborn/state.hpp"

namespace freqborn {

/// Mass of a decomposition below, inside, and above [r0 - eps, r0 + eps].
/// The closed window keeps its boundary points; "below" and "above" are
/// strict. Masses are also kept in logs so tails that underflow a double
/// still compare correctly.
struct WindowMass {
  double r0 = 0.0;
  double epsilon = 0.0;
  double mass_below = 0.0;
  double mass_inside = 0.0;
  double mass_above = 0.0;
  double chebyshev_bound = 0.0;
  LogWeight log_below;
  LogWeight log_inside;
  LogWeight log_above;

  double outside() const noexcept { return mass_below + mass_above; }
  LogWeight log_outside() const {
    const std::array<LogWeight, 2> parts{log_below, log_above};
    return log_sum_exp(parts);
  }
};

struct ConvergenceRecord {
  std::uint64_t copies = 0;
  WindowMass window;
};

struct ConvergenceScan {
  double a_sq = 0.0;
  double epsilon = 0.0;
  std::vector<ConvergenceRecord> records;  // increasing N
};

struct LocalizationVerdict {
  bool localized = false;
  double q0_estimate = 0.0;
  double residual_outside = 0.0;
  double epsilon = 0.0;
  double tolerance = 0.0;
};

/// a_sq (1 - a_sq) / (eps^2 N): Chebyshev's bound on the mass farther than
/// eps from a_sq.
inline double chebyshev_bound(double a_sq, std::uint64_t copies, double epsilon) {
  return a_sq * (1.0 - a_sq) / (epsilon * static_cast<double>(copies)) / epsilon;
}

namespace detail {

inline void require_two_level(const FrequencyDecomposition& decomp, const char* who) {
  if (!decomp.is_two_level())
    throw domain_error(std::string(who) + ": decomposition is not two-level");
}

// Nearest n/N to r; an exact midpoint goes to the lower n.
inline std::uint64_t nearest_admissible(double r, std::uint64_t copies) {
  const double x = r * static_cast<double>(copies);
  if (!(x > 0.0)) return 0;
  if (x >= static_cast<double>(copies)) return copies;
  const double lower = std::floor(x);
  auto n = static_cast<std::uint64_t>(lower);
  if (x - lower > 0.5) ++n;
  return n;
}

}  // namespace detail

/// |c_N(r_N)|^2 at the admissible r_N = n/N nearest to r.
inline double rho_r_N(const FrequencyDecomposition& decomp, double r) {
  detail::require_two_level(decomp, "rho_r_N");
  return decomp.weight(detail::nearest_admissible(r, decomp.copies())).linear();
}

/// N * rho_r_N: the finite-N density whose Riemann sum over the grid n/N
/// (spacing 1/N) is the total mass.
inline double scaled_density(const FrequencyDecomposition& decomp, double r) {
  return static_cast<double>(decomp.copies()) * rho_r_N(decomp, r);
}

/// Partitions the weights by r_level = n_level / N around r0. The bound is
/// evaluated at the level's own |a_i|^2, so it applies when r0 = |a_i|^2.
inline WindowMass window_masses(const FrequencyDecomposition& decomp, std::size_t level, double r0,
                                double epsilon) {
  if (!(epsilon > 0.0)) throw domain_error("window_masses: epsilon must be positive");
  const double a_sq = decomp.level_probability(level);
  LogAccumulator below, inside, above;
  for (std::size_t e = 0; e < decomp.size(); ++e) {
    const double deviation = decomp.relative_frequency(e, level) - r0;
    if (deviation < -epsilon)
      below.add(decomp.weight(e));
    else if (deviation > epsilon)
      above.add(decomp.weight(e));
    else
      inside.add(decomp.weight(e));
  }
  WindowMass w;
  w.r0 = r0;
  w.epsilon = epsilon;
  w.log_below = below.value();
  w.log_inside = inside.value();
  w.log_above = above.value();
  w.mass_below = below.linear();
  w.mass_inside = inside.linear();
  w.mass_above = above.linear();
  w.chebyshev_bound = chebyshev_bound(a_sq, decomp.copies(), epsilon);
  return w;
}

/// Window masses at r0 = |a|^2 for each N in `copies_list`.
inline ConvergenceScan convergence_scan(const SingleCopyState& state, double epsilon,
                                        std::span<const std::uint64_t> copies_list,
                                        const Limits& limits = {}) {
  if (state.levels() != 2) throw domain_error("convergence_scan: state must be two-level");
  for (std::size_t i = 1; i < copies_list.size(); ++i)
    if (copies_list[i] <= copies_list[i - 1])
      throw domain_error("convergence_scan: N list must be strictly increasing");
  ConvergenceScan scan;
  scan.a_sq = state.probability(0);
  scan.epsilon = epsilon;
  for (std::uint64_t n : copies_list) {
    const auto decomp = decompose_two_level(state, n, limits);
    scan.records.push_back({n, window_masses(decomp, 0, scan.a_sq, epsilon)});
  }
  return scan;
}

/// Localization test on an arbitrary distribution over a real variable q.
///
/// The candidate q0 is the weighted median (the smallest q whose cumulative
/// mass reaches one half). The distribution is localized when the mass
/// strictly outside [q0 - eps, q0 + eps] is at most `mass_tolerance`.
inline LocalizationVerdict check_postulate(std::vector<std::pair<double, double>> weights,
                                           double epsilon, double mass_tolerance) {
  if (weights.empty()) throw domain_error("check_postulate: empty distribution");
  long double total = 0.0L;
  for (const auto& [q, m] : weights) {
    if (!std::isfinite(q) || !(m >= 0.0) || std::isinf(m))
      throw domain_error("check_postulate: weights must be finite and nonnegative");
    total += m;
  }
  if (std::fabs(total - 1.0L) > 1e-6L)
    throw domain_error("check_postulate: weights sum to " + std::to_string(static_cast<double>(total)) +
                       ", not 1 within 1e-6");

  std::stable_sort(weights.begin(), weights.end(),
                   [](const auto& lhs, const auto& rhs) { return lhs.first < rhs.first; });
  long double cumulative = 0.0L;
  double q0 = weights.back().first;
  for (const auto& [q, m] : weights) {
    cumulative += m;
    if (cumulative >= 0.5L * total) {
      q0 = q;
      break;
    }
  }
  long double outside = 0.0L;
  for (const auto& [q, m] : weights) {
    const double deviation = q - q0;
    if (deviation < -epsilon || deviation > epsilon) outside += m;
  }
  LocalizationVerdict v;
  v.q0_estimate = q0;
  v.residual_outside = static_cast<double>(outside);
  v.epsilon = epsilon;
  v.tolerance = mass_tolerance;
  v.localized = v.residual_outside <= mass_tolerance;
  return v;
}

/// (r_level, mass) pairs of the level's marginal, ready for check_postulate.
inline std::vector<std::pair<double, double>> frequency_distribution(
    const FrequencyDecomposition& decomp, std::size_t level) {
  const auto marginal = marginalize(decomp, level);
  std::vector<std::pair<double, double>> out;
  out.reserve(marginal.size());
  const double copies = static_cast<double>(decomp.copies());
  for (std::size_t n = 0; n < marginal.size(); ++n)
    out.emplace_back(static_cast<double>(n) / copies, marginal[n].linear());
  return out;
}

}  // namespace freqborn
