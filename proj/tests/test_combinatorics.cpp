#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <catch_amalgamated.hpp>

#include "freqborn/combinatorics.hpp"
#include "freqborn/log_weight.hpp"
#include "oracles.hpp"

using namespace freqborn;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("log_factorial small values", "[combinatorics]") {
  CHECK(log_factorial(0) == 0.0);
  CHECK(log_factorial(1) == 0.0);
  // ln(3628800)
  CHECK_THAT(log_factorial(10), WithinRel(15.104412573075516, 1e-12));
}

TEST_CASE("log_factorial matches exact factorials across the table boundary", "[combinatorics]") {
  for (std::uint64_t n = 2; n <= 33; ++n) {
    INFO("n = " << n);
    const double expected = static_cast<double>(oracle::log_exact(oracle::factorial(n)));
    CHECK_THAT(log_factorial(n), WithinRel(expected, 1e-12));
  }
}

TEST_CASE("log_factorial agrees with lgamma at large n", "[combinatorics]") {
  for (std::uint64_t n : {21ULL, 100ULL, 1000ULL, 123457ULL, 1000000ULL, 100000000ULL}) {
    INFO("n = " << n);
    CHECK_THAT(log_factorial(n), WithinRel(std::lgamma(static_cast<double>(n) + 1.0), 1e-12));
  }
}

TEST_CASE("log_factorial rejects arguments above 1e8", "[combinatorics]") {
  CHECK_THROWS_AS(log_factorial(100'000'001), range_error);
}

TEST_CASE("log_binomial values", "[combinatorics]") {
  for (std::uint64_t total : {0ULL, 1ULL, 7ULL, 1000ULL}) CHECK(log_binomial(total, 0) == 0.0);
  CHECK_THAT(log_binomial(4, 2), WithinRel(std::log(6.0), 1e-12));
  CHECK_THAT(log_binomial(4, 2), WithinAbs(1.791759469, 1e-9));

  const double exact = static_cast<double>(oracle::log_exact(oracle::binomial(100, 50)));
  CHECK_THAT(log_binomial(100, 50), WithinRel(exact, 1e-12));
  CHECK_THROWS_AS(log_binomial(5, 6), domain_error);
}

TEST_CASE("log_binomial agrees with exact big-integer values", "[combinatorics]") {
  for (std::uint64_t total = 1; total <= 120; ++total)
    for (std::uint64_t n = 0; n <= total; ++n) {
      const double exact = static_cast<double>(oracle::log_exact(oracle::binomial(total, n)));
      if (exact == 0.0)
        CHECK_THAT(log_binomial(total, n), WithinAbs(0.0, 1e-15));
      else
        CHECK_THAT(log_binomial(total, n), WithinRel(exact, 1e-12));
    }
}

TEST_CASE("log_binomial is exactly symmetric", "[combinatorics][property]") {
  for (std::uint64_t total : {1ULL, 2ULL, 17ULL, 200ULL, 99999ULL})
    for (std::uint64_t n = 0; n <= std::min<std::uint64_t>(total, 300); ++n)
      REQUIRE(log_binomial(total, n) == log_binomial(total, total - n));
}

TEST_CASE("Pascal recurrence holds in the direct-exponentiation range", "[combinatorics][property]") {
  for (std::uint64_t total = 2; total <= 60; ++total)
    for (std::uint64_t n = 1; n < total; ++n) {
      const double c = std::exp(log_binomial(total, n));
      const double c1 = std::exp(log_binomial(total - 1, n - 1));
      const double c2 = std::exp(log_binomial(total - 1, n));
      REQUIRE(std::fabs(c - c1 - c2) <= 1e-9 * c);
    }
}

TEST_CASE("log_multinomial values", "[combinatorics]") {
  const std::vector<std::uint64_t> single{9};
  CHECK(log_multinomial(single) == 0.0);
  const std::vector<std::uint64_t> c211{2, 1, 1};
  CHECK_THAT(log_multinomial(c211), WithinRel(std::log(12.0), 1e-12));
  const std::vector<std::uint64_t> c33{3, 3};
  CHECK(log_multinomial(c33) == log_binomial(6, 3));
  CHECK_THROWS_AS(log_multinomial(std::span<const std::uint64_t>{}), domain_error);
}

TEST_CASE("log_multinomial two-part case is log_binomial bit for bit", "[combinatorics][property]") {
  for (std::uint64_t total = 0; total <= 500; total += 7)
    for (std::uint64_t n = 0; n <= total; ++n) {
      const std::vector<std::uint64_t> counts{n, total - n};
      REQUIRE(log_multinomial(counts) == log_binomial(total, n));
    }
}

TEST_CASE("log_multinomial matches exact values for compositions of N <= 30", "[combinatorics]") {
  for (std::size_t parts = 1; parts <= 4; ++parts)
    for (std::uint64_t total = 0; total <= 30; ++total)
      for (const auto& counts : oracle::compositions(total, parts)) {
        const long double exact = oracle::log_exact(oracle::multinomial(counts));
        const double got = log_multinomial(counts);
        if (exact == 0.0L)
          REQUIRE(std::fabs(got) <= 1e-15);
        else
          REQUIRE(std::fabs(got - static_cast<double>(exact)) <= 1e-12 * static_cast<double>(exact));
      }
}

TEST_CASE("log_multinomial is permutation invariant", "[combinatorics][property]") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::uint64_t> part(0, 5000);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::uint64_t> counts(2 + trial % 5);
    for (auto& c : counts) c = part(rng);
    const double base = log_multinomial(counts);
    std::shuffle(counts.begin(), counts.end(), rng);
    REQUIRE(log_multinomial(counts) == base);
  }
}

TEST_CASE("composition_count", "[combinatorics]") {
  CHECK(composition_count(2, 3) == 6.0L);
  CHECK(composition_count(10, 2) == 11.0L);
  CHECK(composition_count(0, 4) == 1.0L);
  CHECK(composition_count(100, 4) == static_cast<long double>(oracle::binomial(103, 3)));
}

TEST_CASE("LogWeight zero element", "[log_weight]") {
  const LogWeight z = LogWeight::zero();
  CHECK(z.is_zero());
  CHECK(LogWeight{}.is_zero());
  CHECK(z.linear() == 0.0);
  CHECK(LogWeight::from_linear(0.0).is_zero());
  CHECK(LogWeight::from_log(-std::numeric_limits<double>::infinity()).is_zero());

  const LogWeight w = LogWeight::from_linear(0.25);
  CHECK((z * w).is_zero());
  CHECK((w * z).is_zero());
  const std::vector<LogWeight> with_zero{w, z};
  CHECK(log_sum_exp(with_zero) == log_sum_exp(std::vector<LogWeight>{w}));
  CHECK(z < w);
  CHECK(LogWeight::one().log() == 0.0);

  CHECK_THROWS_AS(LogWeight::from_log(std::nan("")), domain_error);
  CHECK_THROWS_AS(LogWeight::from_linear(-1.0), domain_error);
}

TEST_CASE("log_sum_exp examples", "[log_weight]") {
  CHECK(log_sum_exp(std::vector<LogWeight>{}).is_zero());

  const std::vector<LogWeight> halves(2, LogWeight::from_log(std::log(0.5)));
  CHECK_THAT(log_sum_exp(halves).log(), WithinAbs(0.0, 1e-15));

  const std::vector<LogWeight> thousand(1000, LogWeight::from_log(std::log(0.001)));
  CHECK_THAT(log_sum_exp(thousand).log(), WithinAbs(0.0, 1e-12));

  // far below double range in linear terms
  const std::vector<LogWeight> tiny(4, LogWeight::from_log(-5000.0));
  CHECK_THAT(log_sum_exp(tiny).log(), WithinAbs(-5000.0 + std::log(4.0), 1e-9));
}

TEST_CASE("log_sum_exp is permutation invariant and monotone", "[log_weight][property]") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> logs(-40.0, 5.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<LogWeight> v(1 + trial % 30);
    for (auto& w : v) w = LogWeight::from_log(logs(rng));
    const double base = log_sum_exp(v).log();

    auto shuffled = v;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    REQUIRE_THAT(log_sum_exp(shuffled).log(), WithinAbs(base, 1e-14));

    auto bumped = v;
    const std::size_t k = trial % v.size();
    bumped[k] = LogWeight::from_log(bumped[k].log() + 0.5);
    REQUIRE(log_sum_exp(bumped).log() >= base);
  }
}

TEST_CASE("LogAccumulator agrees with log_sum_exp", "[log_weight]") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> logs(-800.0, 0.0);
  std::vector<LogWeight> v(500);
  for (auto& w : v) w = LogWeight::from_log(logs(rng));
  v[17] = LogWeight::zero();
  LogAccumulator acc;
  for (const auto& w : v) acc.add(w);
  CHECK_THAT(acc.value().log(), WithinAbs(log_sum_exp(v).log(), 1e-13));
  CHECK(LogAccumulator{}.value().is_zero());
  CHECK(LogAccumulator{}.linear() == 0.0);
}
