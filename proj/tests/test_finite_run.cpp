#include <cmath>
#include <cstdint>
#include <vector>

#include <catch_amalgamated.hpp>

#include "freqborn/finite_run.hpp"

using namespace freqborn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Mode of Binomial(N, num/den) from the integer ratio test
// w(n+1)/w(n) = (N-n) num / ((n+1)(den-num)) > 1.
std::uint64_t binomial_mode(std::uint64_t copies, std::uint64_t num, std::uint64_t den) {
  std::uint64_t n = 0;
  while (n < copies && (copies - n) * num > (n + 1) * (den - num)) ++n;
  return n;
}

}  // namespace

TEST_CASE("finite_run_distribution examples", "[finite-run]") {
  SECTION("hundred measurements at |a|^2 = 0.3") {
    const auto dist = finite_run_distribution(SingleCopyState::two_level(0.3), 100);
    REQUIRE(dist.masses.size() == 101);
    CHECK(binomial_mode(100, 3, 10) == 30);
    CHECK(dist.argmax() == 30);
    long double sum = 0.0L;
    for (double m : dist.masses) sum += m;
    CHECK_THAT(static_cast<double>(sum), WithinAbs(1.0, 1e-10));
  }
  SECTION("single measurement") {
    const auto dist = finite_run_distribution(SingleCopyState::two_level(0.3), 1);
    REQUIRE(dist.masses.size() == 2);
    CHECK_THAT(dist.masses[0], WithinAbs(0.7, 1e-15));
    CHECK_THAT(dist.masses[1], WithinAbs(0.3, 1e-15));
  }
  SECTION("masses are the exponentiated decomposition weights") {
    const auto state = SingleCopyState::two_level(0.42);
    const auto dist = finite_run_distribution(state, 250);
    const auto d = decompose_two_level(state, 250);
    for (std::size_t n = 0; n <= 250; ++n) REQUIRE(dist.masses[n] == d.weight(n).linear());
  }
}

TEST_CASE("outer_frequency_check", "[finite-run]") {
  SECTION("bound uses the outer parameters") {
    const auto dist = finite_run_distribution(SingleCopyState::two_level(0.3), 100);
    for (std::uint64_t outer : {100ULL, 10000ULL}) {
      const auto w = outer_frequency_check(dist, outer, 30, 0.05);
      const double p = dist.masses[30];
      CHECK(w.r0 == p);
      CHECK(w.chebyshev_bound == chebyshev_bound(p, outer, 0.05));
      CHECK(w.outside() <= w.chebyshev_bound + 1e-12);
    }
  }
  SECTION("two measurements, fair state") {
    const auto dist = finite_run_distribution(SingleCopyState::two_level(0.5), 2);
    const auto w = outer_frequency_check(dist, 40, 1, 0.1);
    CHECK_THAT(w.r0, WithinAbs(0.5, 1e-15));
  }
  SECTION("window wider than [0, 1]") {
    const auto dist = finite_run_distribution(SingleCopyState::two_level(0.3), 10);
    const auto w = outer_frequency_check(dist, 500, 3, 1.0);
    CHECK(w.outside() == 0.0);
  }
  SECTION("bad index") {
    const auto dist = finite_run_distribution(SingleCopyState::two_level(0.3), 10);
    CHECK_THROWS_AS(outer_frequency_check(dist, 10, 11, 0.1), domain_error);
  }
}

TEST_CASE("the outer two-level marginal matches the full (N_inner+1)-level decomposition",
          "[finite-run][property]") {
  for (double a_sq : {0.3, 0.5})
    for (std::uint64_t inner = 1; inner <= 3; ++inner) {
      const auto dist = finite_run_distribution(SingleCopyState::two_level(a_sq), inner);
      const auto full_state = SingleCopyState::from_probabilities(dist.masses);
      for (std::uint64_t outer = 1; outer <= 6; ++outer) {
        const auto full = decompose_multilevel(full_state, outer);
        for (std::size_t n0 = 0; n0 <= inner; ++n0) {
          const auto marginal = marginalize(full, n0);
          const auto two =
              decompose_two_level(SingleCopyState::two_level(dist.masses[n0]), outer);
          for (std::uint64_t k = 0; k <= outer; ++k)
            REQUIRE_THAT(marginal[k].linear(), WithinAbs(two.weight(k).linear(), 1e-10));

          const auto full_window = window_masses(full, n0, dist.masses[n0], 0.2);
          const auto reduced = outer_frequency_check(dist, outer, n0, 0.2);
          REQUIRE_THAT(full_window.outside(), WithinAbs(reduced.outside(), 1e-10));
        }
      }
    }
}

TEST_CASE("surprise_index", "[finite-run]") {
  SECTION("most likely outcome is maximally typical") {
    const auto dist = finite_run_distribution(SingleCopyState::two_level(0.3), 100);
    CHECK_THAT(surprise_index(dist, dist.argmax()), WithinAbs(1.0, 1e-12));
  }
  SECTION("all-tails in a fair hundred-run") {
    const auto dist = finite_run_distribution(SingleCopyState::two_level(0.5), 100);
    CHECK(surprise_index(dist, 0) <= std::ldexp(1.0, -90));
    CHECK(surprise_index(dist, 0) > 0.0);
  }
  SECTION("symmetric for the fair state") {
    const auto dist = finite_run_distribution(SingleCopyState::two_level(0.5), 60);
    for (std::size_t n = 0; n <= 60; ++n) REQUIRE(surprise_index(dist, n) == surprise_index(dist, 60 - n));
  }
  SECTION("monotone in the observed mass") {
    const auto dist = finite_run_distribution(SingleCopyState::two_level(0.37), 80);
    for (std::size_t i = 0; i <= 80; ++i)
      for (std::size_t j = 0; j <= 80; ++j)
        if (dist.masses[i] <= dist.masses[j])
          REQUIRE(surprise_index(dist, i) <= surprise_index(dist, j));
  }
  SECTION("out of range") {
    const auto dist = finite_run_distribution(SingleCopyState::two_level(0.5), 4);
    CHECK_THROWS_AS(surprise_index(dist, 5), domain_error);
  }
}
