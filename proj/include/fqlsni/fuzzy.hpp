#pragma once

#include <Eigen/Core>
#include <cmath>
#include <string>
#include <vector>

namespace fqlsni {

struct GaussianMf {
  double center = 0.0;
  double width = 1.0;

  double operator()(double x) const {
    const double d = x - center;
    return std::exp(-d * d / (2.0 * width * width));
  }
};

/// Single-input zero-order Sugeno antecedents: one Gaussian per rule over a
/// clipped input universe.
class RuleBase {
 public:
  /// Throws ConfigError if empty, widths are not positive, centers are not
  /// strictly increasing, or labels and MFs differ in count.
  RuleBase(std::vector<GaussianMf> mfs, std::vector<std::string> labels, double input_min = -2.0,
           double input_max = 2.0);

  /// NB, NS, Z, PS, PB centered at -2..2, width 0.425, universe [-2, 2].
  static RuleBase standard_five();

  Eigen::Index size() const { return static_cast<Eigen::Index>(mfs_.size()); }
  const std::vector<GaussianMf>& mfs() const { return mfs_; }
  const std::vector<std::string>& labels() const { return labels_; }
  double input_min() const { return input_min_; }
  double input_max() const { return input_max_; }

  double clip(double zeta) const;

  /// Firing strength of every rule for the clipped input.
  Eigen::VectorXd fire(double zeta) const;

 private:
  std::vector<GaussianMf> mfs_;
  std::vector<std::string> labels_;
  double input_min_;
  double input_max_;
};

/// Weighted average of per-rule consequents. Throws DomainError on length
/// mismatch and DegenerateInputError when the weights sum to zero.
double defuzzify(const Eigen::Ref<const Eigen::VectorXd>& w, const Eigen::Ref<const Eigen::VectorXd>& phi);

}  // namespace fqlsni
