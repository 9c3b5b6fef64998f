#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "freqborn/decomposition.hpp"
#include "freqborn/errors.hpp"
#include "freqborn/rho.hpp"
#include "freqborn/state.hpp"

namespace freqborn {

/// Distribution of the number n of level-0 outcomes in one run of N_inner
/// measurements: masses[n] = |c_{N_inner}(n)|^2.
struct FiniteRunDistribution {
  std::uint64_t inner_copies = 0;
  double a_sq = 0.0;
  std::vector<double> masses;

  std::size_t argmax() const {
    std::size_t best = 0;
    for (std::size_t n = 1; n < masses.size(); ++n)
      if (masses[n] > masses[best]) best = n;
    return best;
  }
};

inline FiniteRunDistribution finite_run_distribution(const SingleCopyState& state,
                                                     std::uint64_t inner_copies,
                                                     const Limits& limits = {}) {
  const auto decomp = decompose_two_level(state, inner_copies, limits);
  FiniteRunDistribution dist;
  dist.inner_copies = inner_copies;
  dist.a_sq = state.probability(0);
  dist.masses.reserve(decomp.size());
  for (const LogWeight& w : decomp.weights()) dist.masses.push_back(w.linear());
  return dist;
}

/// Frequency of the outcome "exactly n0 successes" over N_outer repeated
/// runs, through the two-level marginal {n = n0, n != n0} with
/// |a|^2 = masses[n0]. The window is centred on masses[n0].
inline WindowMass outer_frequency_check(const FiniteRunDistribution& dist, std::uint64_t outer_copies,
                                        std::size_t n0, double epsilon, const Limits& limits = {}) {
  if (n0 >= dist.masses.size())
    throw domain_error("outer_frequency_check: n0 = " + std::to_string(n0) + " outside 0.." +
                       std::to_string(dist.masses.size() - 1));
  const double p = std::min(dist.masses[n0], 1.0);
  const auto decomp = decompose_two_level(SingleCopyState::two_level(p), outer_copies, limits);
  return window_masses(decomp, 0, p, epsilon);
}

/// Total mass of the outcomes no more likely than the observed one. 1 at the
/// most likely outcome; small values mean the observation is atypical.
inline double surprise_index(const FiniteRunDistribution& dist, std::size_t observed_n) {
  if (observed_n >= dist.masses.size())
    throw domain_error("surprise_index: observed n = " + std::to_string(observed_n) +
                       " outside 0.." + std::to_string(dist.masses.size() - 1));
  const double threshold = dist.masses[observed_n];
  long double tail = 0.0L;
  for (double m : dist.masses)
    if (m <= threshold) tail += m;
  return std::min(1.0, static_cast<double>(tail));
}

}  // namespace freqborn
