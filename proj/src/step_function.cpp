#include "wlab/step_function.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wlab {

namespace {

void require_unit_interval_line(const GroundSpace& space) {
  if (space.kind() == SpaceKind::table || space.dim() != 1)
    throw std::invalid_argument("CDF machinery needs a one-dimensional line space");
}

}  // namespace

StepFunction::StepFunction(std::vector<double> breaks, std::vector<double> levels) {
  if (breaks.size() != levels.size() || breaks.empty())
    throw std::invalid_argument("step function needs matching breaks and levels");
  if (breaks.front() != 0.0)
    throw std::invalid_argument("step function domain starts at 0");
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!std::isfinite(breaks[i]) || !std::isfinite(levels[i]))
      throw std::invalid_argument("step function entries must be finite");
    if (breaks[i] < 0.0 || breaks[i] > 1.0)
      throw std::invalid_argument("step function breaks must lie in [0,1]");
    if (i > 0 && breaks[i] <= breaks[i - 1])
      throw std::invalid_argument("step function breaks must increase strictly");
  }
  // Canonical form: merge pieces with equal levels.
  for (std::size_t i = 0; i < breaks.size(); ++i) {
    if (!levels_.empty() && levels_.back() == levels[i]) continue;
    breaks_.push_back(breaks[i]);
    levels_.push_back(levels[i]);
  }
}

double StepFunction::operator()(double x) const {
  if (x < 0.0 || x > 1.0) throw std::out_of_range("step function argument outside [0,1]");
  std::size_t lo = 0;
  for (std::size_t i = 0; i < breaks_.size(); ++i)
    if (breaks_[i] <= x) lo = i;
  return levels_[lo];
}

bool StepFunction::nondecreasing() const {
  for (std::size_t i = 1; i < levels_.size(); ++i)
    if (levels_[i] < levels_[i - 1]) return false;
  return true;
}

StepFunction cdf(const DiscreteMeasure& mu) {
  require_unit_interval_line(mu.space());
  std::vector<double> breaks{0.0};
  std::vector<double> levels;
  double cum = 0.0;
  const auto& atoms = mu.atoms();  // sorted by position
  if (atoms.front().point[0] < 0.0 || atoms.back().point[0] > 1.0)
    throw std::invalid_argument("CDF needs support inside [0,1]");
  if (atoms.front().point[0] == 0.0) {
    cum = atoms.front().weight;
    levels.push_back(cum);
  } else {
    levels.push_back(0.0);
  }
  for (std::size_t i = (atoms.front().point[0] == 0.0 ? 1 : 0); i < atoms.size(); ++i) {
    cum += atoms[i].weight;
    breaks.push_back(atoms[i].point[0]);
    levels.push_back(cum);
  }
  // The unit-mass invariant keeps the final level at 1 up to rescaling noise.
  levels.back() = 1.0;
  return StepFunction(std::move(breaks), std::move(levels));
}

StepFunction quantile(const StepFunction& f) {
  if (!f.nondecreasing() || f.levels().back() != 1.0)
    throw std::invalid_argument("quantile needs a valid CDF");
  const auto& b = f.breaks();
  const auto& l = f.levels();  // strictly increasing in canonical form
  std::vector<double> qb, ql;
  // sup{x : F(x) <= y} is 0 below l[0] and b[i] on [l[i-1], l[i]).
  if (l.front() > 0.0) {
    qb.push_back(0.0);
    ql.push_back(0.0);
  }
  for (std::size_t i = 1; i < b.size(); ++i) {
    qb.push_back(qb.empty() ? 0.0 : l[i - 1]);
    ql.push_back(b[i]);
  }
  if (qb.empty()) {  // constant CDF: all mass at 0
    qb.push_back(0.0);
    ql.push_back(1.0);
  }
  // Boundary convention at y = 1.
  if (ql.back() != 1.0) {
    qb.push_back(1.0);
    ql.push_back(1.0);
  }
  return StepFunction(std::move(qb), std::move(ql));
}

DiscreteMeasure measure_from_cdf(const StepFunction& f, const GroundSpace& space) {
  require_unit_interval_line(space);
  if (!f.nondecreasing() || f.levels().back() != 1.0)
    throw std::invalid_argument("not a CDF");
  const auto& b = f.breaks();
  const auto& l = f.levels();
  std::vector<WeightedAtom> atoms;
  if (l.front() > 0.0) atoms.push_back({Point{0.0}, l.front()});
  for (std::size_t i = 1; i < b.size(); ++i)
    atoms.push_back({Point{b[i]}, l[i] - l[i - 1]});
  return DiscreteMeasure(space, std::move(atoms));
}

}  // namespace wlab
