#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "freqborn/errors.hpp"

namespace freqborn {

inline constexpr double kNormalizationTolerance = 1e-9;

/// One copy of an M-level system, sum_i a_i |level_i>.
///
/// Amplitudes are rescaled to unit norm at construction. Without the
/// renormalize flag the input norm must already be 1 within 1e-9; with it,
/// any nonzero vector is accepted. Level probabilities |a_i|^2 are cached in
/// extended precision and sum to 1 up to long double rounding, which is what
/// keeps large-N decompositions normalized.
class SingleCopyState {
 public:
  using amplitude_type = std::complex<double>;

  explicit SingleCopyState(std::vector<amplitude_type> amplitudes, bool renormalize = false)
      : amplitudes_(std::move(amplitudes)) {
    std::vector<long double> norms;
    norms.reserve(amplitudes_.size());
    for (const auto& a : amplitudes_) {
      const long double re = a.real();
      const long double im = a.imag();
      norms.push_back(re * re + im * im);
    }
    init_from_norms(norms, renormalize);
    const long double scale = 1.0L / std::sqrt(total_norm_);
    for (auto& a : amplitudes_)
      a = {static_cast<double>(a.real() * scale), static_cast<double>(a.imag() * scale)};
  }

  /// Real nonnegative amplitudes sqrt(p_i); probabilities kept as given.
  static SingleCopyState from_probabilities(std::span<const double> probabilities,
                                            bool renormalize = false) {
    return SingleCopyState(probabilities_tag{}, probabilities, renormalize);
  }

  static SingleCopyState from_probabilities(std::initializer_list<double> probabilities,
                                            bool renormalize = false) {
    return SingleCopyState(probabilities_tag{},
                           std::span<const double>(probabilities.begin(), probabilities.size()),
                           renormalize);
  }

  /// Two-level state with |a|^2 = a_sq and |b|^2 = 1 - a_sq taken exactly.
  static SingleCopyState two_level(double a_sq) {
    if (!(a_sq >= 0.0 && a_sq <= 1.0))
      throw domain_error("two_level: |a|^2 must lie in [0, 1]");
    SingleCopyState s;
    s.probabilities_ = {static_cast<long double>(a_sq), 1.0L - static_cast<long double>(a_sq)};
    s.total_norm_ = 1.0L;
    s.amplitudes_ = {std::sqrt(a_sq), std::sqrt(static_cast<double>(s.probabilities_[1]))};
    return s;
  }

  std::size_t levels() const noexcept { return amplitudes_.size(); }
  std::span<const amplitude_type> amplitudes() const noexcept { return amplitudes_; }

  double probability(std::size_t level) const {
    check_level(level);
    return static_cast<double>(probabilities_[level]);
  }
  long double probability_ext(std::size_t level) const {
    check_level(level);
    return probabilities_[level];
  }
  std::vector<double> probabilities() const {
    return {probabilities_.begin(), probabilities_.end()};
  }

  // Norm of the input before rescaling.
  double input_norm_squared() const noexcept { return static_cast<double>(total_norm_); }

 private:
  SingleCopyState() = default;

  struct probabilities_tag {};

  SingleCopyState(probabilities_tag, std::span<const double> probabilities, bool renormalize) {
    std::vector<long double> norms;
    norms.reserve(probabilities.size());
    for (double p : probabilities) {
      if (!(p >= 0.0) || std::isinf(p))
        throw domain_error("SingleCopyState: probabilities must be finite and nonnegative");
      norms.push_back(p);
    }
    init_from_norms(norms, renormalize);
    amplitudes_.reserve(probabilities_.size());
    for (long double p : probabilities_) amplitudes_.emplace_back(std::sqrt(static_cast<double>(p)));
  }

  void init_from_norms(const std::vector<long double>& norms, bool renormalize) {
    if (norms.size() < 2) throw domain_error("SingleCopyState: need at least two levels");
    long double total = 0.0L;
    for (long double n : norms) {
      if (std::isnan(n) || std::isinf(n))
        throw domain_error("SingleCopyState: non-finite amplitude");
      total += n;
    }
    if (!(total > 0.0L)) throw domain_error("SingleCopyState: zero vector");
    if (!renormalize && std::fabs(total - 1.0L) > kNormalizationTolerance)
      throw domain_error("SingleCopyState: sum of |a_i|^2 = " +
                         std::to_string(static_cast<double>(total)) +
                         " is not 1 within 1e-9 (use renormalize)");
    total_norm_ = total;
    probabilities_.clear();
    for (long double n : norms) probabilities_.push_back(n / total);
  }

  void check_level(std::size_t level) const {
    if (level >= probabilities_.size())
      throw domain_error("SingleCopyState: level " + std::to_string(level) + " out of range");
  }

  std::vector<amplitude_type> amplitudes_;
  std::vector<long double> probabilities_;
  long double total_norm_ = 1.0L;
};

}  // namespace freqborn
