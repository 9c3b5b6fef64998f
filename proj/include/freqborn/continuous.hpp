#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <istream>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "freqborn/combinatorics.hpp"
#include "freqborn/decomposition.hpp"
#include "freqborn/errors.hpp"
#include "freqborn/rho.hpp"
#include "freqborn/state.hpp"

namespace freqborn {

inline constexpr double kGridNormalizationTolerance = 1e-6;
inline constexpr double kGridSpacingTolerance = 1e-9;

/// psi(x_k) sampled at x_k = x0 + k h, normalized so that sum |psi|^2 h = 1.
class GridWavefunction {
 public:
  GridWavefunction(double x0, double spacing, std::vector<std::complex<double>> samples,
                   bool renormalize = false)
      : x0_(x0), h_(spacing), samples_(std::move(samples)) {
    if (!std::isfinite(x0_)) throw domain_error("GridWavefunction: origin must be finite");
    if (!(h_ > 0.0) || !std::isfinite(h_))
      throw domain_error("GridWavefunction: spacing must be positive");
    if (samples_.empty()) throw domain_error("GridWavefunction: no samples");
    long double norm = 0.0L;
    for (const auto& s : samples_) {
      if (!std::isfinite(s.real()) || !std::isfinite(s.imag()))
        throw domain_error("GridWavefunction: non-finite sample");
      norm += static_cast<long double>(std::norm(s)) * h_;
    }
    if (!(norm > 0.0L)) throw domain_error("GridWavefunction: zero wavefunction");
    if (renormalize) {
      const double scale = static_cast<double>(1.0L / std::sqrt(norm));
      for (auto& s : samples_) s *= scale;
    } else if (std::fabs(norm - 1.0L) > kGridNormalizationTolerance) {
      throw domain_error("GridWavefunction: sum |psi|^2 h = " +
                               std::to_string(static_cast<double>(norm)) +
                               " is not 1 within 1e-6 (use renormalize)");
    }
  }

  double origin() const noexcept { return x0_; }
  double spacing() const noexcept { return h_; }
  std::size_t size() const noexcept { return samples_.size(); }
  double position(std::size_t k) const noexcept { return x0_ + static_cast<double>(k) * h_; }
  std::complex<double> sample(std::size_t k) const { return samples_.at(k); }

 private:
  double x0_;
  double h_;
  std::vector<std::complex<double>> samples_;
};

/// Union of disjoint half-open intervals [lo, hi), kept sorted.
class Region {
 public:
  using Interval = std::pair<double, double>;

  Region() = default;

  explicit Region(std::vector<Interval> intervals) {
    for (const auto& [lo, hi] : intervals) {
      if (std::isnan(lo) || std::isnan(hi) || !(lo < hi))
        throw domain_error("Region: interval needs lo < hi");
      intervals_.emplace_back(lo, hi);
    }
    std::sort(intervals_.begin(), intervals_.end());
    for (std::size_t i = 1; i < intervals_.size(); ++i)
      if (intervals_[i].first < intervals_[i - 1].second)
        throw domain_error("Region: intervals overlap");
  }

  static Region whole_line() {
    constexpr double inf = std::numeric_limits<double>::infinity();
    return Region({{-inf, inf}});
  }

  /// Parses "lo:hi[,lo:hi...]"; bounds accept "inf" and "-inf". An empty
  /// string is the empty region.
  static Region parse(std::string_view text) {
    std::vector<Interval> out;
    if (trim(text).empty()) return Region{};
    while (true) {
      const auto comma = text.find(',');
      const std::string_view item = trim(text.substr(0, comma));
      const auto colon = item.find(':');
      if (colon == std::string_view::npos)
        throw domain_error("Region: expected lo:hi, got '" + std::string(item) + "'");
      out.emplace_back(parse_bound(item.substr(0, colon)), parse_bound(item.substr(colon + 1)));
      if (comma == std::string_view::npos) break;
      text.remove_prefix(comma + 1);
    }
    return Region(std::move(out));
  }

  bool contains(double x) const noexcept {
    for (const auto& [lo, hi] : intervals_)
      if (x >= lo && x < hi) return true;
    return false;
  }

  bool empty() const noexcept { return intervals_.empty(); }
  const std::vector<Interval>& intervals() const noexcept { return intervals_; }

  Region complement() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<Interval> gaps;
    double cursor = -inf;
    for (const auto& [lo, hi] : intervals_) {
      if (cursor < lo) gaps.emplace_back(cursor, lo);
      cursor = hi;
    }
    if (cursor < inf) gaps.emplace_back(cursor, inf);
    return Region(std::move(gaps));
  }

  bool intersects(const Region& other) const noexcept {
    for (const auto& [a_lo, a_hi] : intervals_)
      for (const auto& [b_lo, b_hi] : other.intervals_)
        if (a_lo < b_hi && b_lo < a_hi) return true;
    return false;
  }

 private:
  static std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
    return s;
  }

  static double parse_bound(std::string_view s) {
    s = trim(s);
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (s == "inf" || s == "+inf") return inf;
    if (s == "-inf") return -inf;
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty())
      throw domain_error("Region: cannot parse bound '" + std::string(s) + "'");
    return v;
  }

  std::vector<Interval> intervals_;
};

/// Left-point Riemann sum of |psi|^2 h over the grid points inside delta.
inline double region_probability(const GridWavefunction& psi, const Region& delta) {
  long double sum = 0.0L;
  for (std::size_t k = 0; k < psi.size(); ++k)
    if (delta.contains(psi.position(k)))
      sum += static_cast<long double>(std::norm(psi.sample(k))) * psi.spacing();
  return static_cast<double>(sum);
}

/// <Psi|P_{N,n}|Psi>: weight of the sector with n of N particles inside the
/// region, C(N, n) a_sq^n (1 - a_sq)^(N - n).
inline double projector_weight(double a_sq, std::uint64_t copies, std::uint64_t n) {
  if (n > copies)
    throw domain_error("projector_weight: n = " + std::to_string(n) + " exceeds N = " +
                       std::to_string(copies));
  if (!(a_sq >= 0.0 && a_sq <= 1.0)) throw domain_error("projector_weight: a_sq outside [0, 1]");
  if (a_sq == 0.0) return n == 0 ? 1.0 : 0.0;
  if (a_sq == 1.0) return n == copies ? 1.0 : 0.0;
  const double log_w = log_binomial(copies, n) + static_cast<double>(n) * std::log(a_sq) +
                       static_cast<double>(copies - n) * std::log1p(-a_sq);
  return std::exp(log_w);
}

struct RegionAnalysis {
  double a_sq = 0.0;
  MomentReport moments;
  WindowMass window;
};

/// Reduces (psi, delta) to the two-level state with |a|^2 = P(delta) and
/// analyses its N-copy decomposition at r0 = |a|^2.
inline RegionAnalysis region_frequency_analysis(const GridWavefunction& psi, const Region& delta,
                                                std::uint64_t copies, double epsilon,
                                                const Limits& limits = {}) {
  RegionAnalysis out;
  out.a_sq = std::clamp(region_probability(psi, delta), 0.0, 1.0);
  const auto decomp = decompose_two_level(SingleCopyState::two_level(out.a_sq), copies, limits);
  out.moments = frequency_moments(decomp, 0);
  out.window = window_masses(decomp, 0, out.a_sq, epsilon);
  return out;
}

/// One level per region plus a final level for everything outside their
/// union. Regions must be mutually disjoint.
inline SingleCopyState region_level_state(const GridWavefunction& psi,
                                          const std::vector<Region>& regions) {
  if (regions.empty()) throw domain_error("region_level_state: no regions");
  std::vector<Region::Interval> all;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    for (std::size_t j = i + 1; j < regions.size(); ++j)
      if (regions[i].intersects(regions[j]))
        throw domain_error("region_level_state: regions overlap");
    all.insert(all.end(), regions[i].intervals().begin(), regions[i].intervals().end());
  }
  const Region rest = Region(std::move(all)).complement();
  std::vector<double> probs;
  for (const auto& r : regions) probs.push_back(region_probability(psi, r));
  probs.push_back(region_probability(psi, rest));
  return SingleCopyState::from_probabilities(probs, /*renormalize=*/true);
}

inline FrequencyDecomposition multi_region_decomposition(const GridWavefunction& psi,
                                                         const std::vector<Region>& regions,
                                                         std::uint64_t copies,
                                                         const Limits& limits = {}) {
  return decompose_multilevel(region_level_state(psi, regions), copies, limits);
}

/// Reads a wavefunction from CSV with header `x,re,im`. Lines that are blank
/// or start with '#' are ignored. Spacing must be uniform within 1e-9
/// relative.
inline GridWavefunction read_wavefunction_csv(std::istream& in, bool renormalize = false) {
  auto strip = [](std::string& s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ' || s.back() == '\t')) s.pop_back();
    std::size_t i = 0;
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    s.erase(0, i);
  };
  auto field = [](std::string_view s, std::size_t line_no) {
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size())
      throw domain_error("wavefunction csv line " + std::to_string(line_no) +
                         ": cannot parse number '" + std::string(s) + "'");
    return v;
  };

  std::string line;
  std::size_t line_no = 0;
  bool header_seen = false;
  std::vector<double> xs;
  std::vector<std::complex<double>> samples;
  while (std::getline(in, line)) {
    ++line_no;
    strip(line);
    if (line.empty() || line.front() == '#') continue;
    if (!header_seen) {
      std::string compact;
      for (char c : line)
        if (c != ' ') compact.push_back(c);
      if (compact != "x,re,im")
        throw domain_error("wavefunction csv: expected header 'x,re,im', got '" + line + "'");
      header_seen = true;
      continue;
    }
    const std::string_view view(line);
    const auto c1 = view.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
    if (c2 == std::string_view::npos || view.find(',', c2 + 1) != std::string_view::npos)
      throw domain_error("wavefunction csv line " + std::to_string(line_no) +
                         ": expected three fields");
    xs.push_back(field(view.substr(0, c1), line_no));
    samples.emplace_back(field(view.substr(c1 + 1, c2 - c1 - 1), line_no),
                         field(view.substr(c2 + 1), line_no));
  }
  if (!header_seen) throw domain_error("wavefunction csv: missing header");
  if (xs.size() < 2) throw domain_error("wavefunction csv: need at least two grid points");
  const double h = (xs.back() - xs.front()) / static_cast<double>(xs.size() - 1);
  if (!(h > 0.0)) throw domain_error("wavefunction csv: grid must be increasing");
  for (std::size_t k = 1; k < xs.size(); ++k)
    if (std::fabs((xs[k] - xs[k - 1]) - h) > kGridSpacingTolerance * h)
      throw domain_error("wavefunction csv: non-uniform spacing at line with x = " +
                         std::to_string(xs[k]));
  return GridWavefunction(xs.front(), h, std::move(samples), renormalize);
}

}  // namespace freqborn
