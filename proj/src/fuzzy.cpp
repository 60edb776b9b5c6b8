#include "fqlsni/fuzzy.hpp"

#include <algorithm>
#include <cmath>

#include "fqlsni/errors.hpp"

namespace fqlsni {

RuleBase::RuleBase(std::vector<GaussianMf> mfs, std::vector<std::string> labels, double input_min,
                   double input_max)
    : mfs_(std::move(mfs)), labels_(std::move(labels)), input_min_(input_min), input_max_(input_max) {
  if (mfs_.empty()) throw ConfigError("rule base needs at least one rule");
  if (labels_.size() != mfs_.size()) throw ConfigError("rule base: one label per membership function");
  if (!(input_max_ > input_min_)) throw ConfigError("rule base: empty input universe");
  for (std::size_t i = 0; i < mfs_.size(); ++i) {
    if (!(mfs_[i].width > 0.0) || !std::isfinite(mfs_[i].center)) {
      throw ConfigError("rule base: membership widths must be positive");
    }
    if (i > 0 && !(mfs_[i].center > mfs_[i - 1].center)) {
      throw ConfigError("rule base: centers must be strictly increasing");
    }
  }
}

RuleBase RuleBase::standard_five() {
  std::vector<GaussianMf> mfs;
  for (double c : {-2.0, -1.0, 0.0, 1.0, 2.0}) mfs.push_back({c, 0.425});
  return RuleBase(std::move(mfs), {"NB", "NS", "Z", "PS", "PB"});
}

double RuleBase::clip(double zeta) const { return std::clamp(zeta, input_min_, input_max_); }

Eigen::VectorXd RuleBase::fire(double zeta) const {
  const double x = clip(zeta);
  Eigen::VectorXd w(size());
  for (Eigen::Index i = 0; i < size(); ++i) w[i] = mfs_[static_cast<std::size_t>(i)](x);
  return w;
}

double defuzzify(const Eigen::Ref<const Eigen::VectorXd>& w, const Eigen::Ref<const Eigen::VectorXd>& phi) {
  if (w.size() != phi.size()) throw DomainError("defuzzify: weights and consequents differ in length");
  const double total = w.sum();
  if (!(total > 0.0)) throw DegenerateInputError("defuzzify: firing strengths sum to zero");
  return w.dot(phi) / total;
}

}  // namespace fqlsni
