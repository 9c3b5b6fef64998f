#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace freqborn {

// Bad argument: wrong level count, index out of its set, malformed input.
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Numeric argument outside the range a kernel supports.
class range_error : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// An enumeration would exceed its configured size guard.
class capacity_error : public std::length_error {
 public:
  capacity_error(const std::string& what, long double required, long double limit)
      : std::length_error(what), required_(required), limit_(limit) {}

  long double required() const noexcept { return required_; }
  long double limit() const noexcept { return limit_; }

 private:
  long double required_;
  long double limit_;
};

// A computed result broke one of its numerical contracts (e.g. total mass != 1).
class contract_violation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Size guards for the dense and enumerating kernels.
struct Limits {
  std::size_t max_two_level_n = 10'000'000;
  std::size_t max_compositions = 10'000'000;
  std::size_t max_sequences = 20'000'000;

  // Same ceiling for every guard; used by the FREQBORN_MAX_N override.
  static Limits uniform(std::size_t n) { return Limits{n, n, n}; }
};

}  // namespace freqborn
