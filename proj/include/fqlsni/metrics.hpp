#pragma once

#include <cstddef>
#include <span>

namespace fqlsni {

inline constexpr std::size_t kSteadyWindow = 500;

/// Root-mean-square of an error series. Empty input throws DomainError.
double rmse(std::span<const double> errors);

/// max |e| over the final `window` samples. Needs more than `window` samples.
double steady_offset(std::span<const double> errors, std::size_t window = kSteadyWindow);

struct SettleResult {
  double time = 0.0;  ///< seconds from the segment start, or the segment length if never settled
  bool settled = false;
};

/// First time from which |e| stays within `band` until the end of the series.
SettleResult settle_time(std::span<const double> errors, double dt, double band);

}  // namespace fqlsni
