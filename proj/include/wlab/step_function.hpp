#pragma once

#include <cstddef>
#include <vector>

#include "wlab/measure.hpp"

namespace wlab {

// Right-continuous piecewise-constant function on [0,1]:
// f(x) = levels[i] on [breaks[i], breaks[i+1]) and levels.back() on
// [breaks.back(), 1]. breaks[0] is always 0. Canonical form: strictly
// increasing breaks, no two consecutive equal levels.
class StepFunction {
 public:
  StepFunction(std::vector<double> breaks, std::vector<double> levels);

  const std::vector<double>& breaks() const { return breaks_; }
  const std::vector<double>& levels() const { return levels_; }
  std::size_t pieces() const { return levels_.size(); }

  double operator()(double x) const;

  bool nondecreasing() const;

  bool operator==(const StepFunction& o) const {
    return breaks_ == o.breaks_ && levels_ == o.levels_;
  }

 private:
  std::vector<double> breaks_;
  std::vector<double> levels_;
};

// Exact step CDF of a measure supported in [0,1]: F(x) = mu([0,x]).
StepFunction cdf(const DiscreteMeasure& mu);

// Generalized inverse F^{-1}(y) = sup{x : F(x) <= y}, made right-continuous
// at 0 and set to 1 at y = 1. Involutive on step CDFs: quantile(quantile(F)) = F.
StepFunction quantile(const StepFunction& f);

// Measure on [0,1] whose CDF is the given step function (must be a valid CDF:
// nondecreasing, final level 1).
DiscreteMeasure measure_from_cdf(const StepFunction& f, const GroundSpace& space);

}  // namespace wlab
