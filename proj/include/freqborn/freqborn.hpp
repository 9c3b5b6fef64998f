#pragma once

#include "freqborn/combinatorics.hpp"
#include "freqborn/continuous.hpp"
#include "freqborn/decomposition.hpp"
#include "freqborn/errors.hpp"
#include "freqborn/finite_run.hpp"
#include "freqborn/log_weight.hpp"
#include "freqborn/rho.hpp"
#include "freqborn/state.hpp"

namespace freqborn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace freqborn
