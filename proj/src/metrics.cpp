#include "fqlsni/metrics.hpp"

#include <cmath>

#include "fqlsni/errors.hpp"

namespace fqlsni {

double rmse(std::span<const double> errors) {
  if (errors.empty()) throw DomainError("rmse: empty series");
  double acc = 0.0;
  for (double e : errors) acc += e * e;
  return std::sqrt(acc / static_cast<double>(errors.size()));
}

double steady_offset(std::span<const double> errors, std::size_t window) {
  if (window == 0 || errors.size() <= window) throw DomainError("steady_offset: series shorter than the window");
  double worst = 0.0;
  for (double e : errors.last(window)) worst = std::max(worst, std::abs(e));
  return worst;
}

SettleResult settle_time(std::span<const double> errors, double dt, double band) {
  if (!(dt > 0.0) || !(band > 0.0)) throw DomainError("settle_time: dt and band must be positive");
  std::size_t k = errors.size();
  while (k > 0 && std::abs(errors[k - 1]) <= band) --k;
  if (k == errors.size()) return {static_cast<double>(errors.size()) * dt, false};
  return {static_cast<double>(k) * dt, true};
}

}  // namespace fqlsni
