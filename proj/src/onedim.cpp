#include "wlab/onedim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wlab {

double vallender_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  const StepFunction f = cdf(mu);
  const StepFunction g = cdf(nu);

  std::vector<double> events;
  events.insert(events.end(), f.breaks().begin(), f.breaks().end());
  events.insert(events.end(), g.breaks().begin(), g.breaks().end());
  events.push_back(1.0);
  std::sort(events.begin(), events.end());
  events.erase(std::unique(events.begin(), events.end()), events.end());

  double integral = 0.0;
  for (std::size_t k = 0; k + 1 < events.size(); ++k) {
    const double len = events[k + 1] - events[k];
    if (len > 0.0) integral += std::abs(f(events[k]) - g(events[k])) * len;
  }
  return integral;
}

DiscreteMeasure flip(const DiscreteMeasure& mu) {
  return measure_from_cdf(quantile(cdf(mu)), mu.space());
}

SnowflakeReport snowflake_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                double p, double tol) {
  if (!(p >= 1.0)) throw std::invalid_argument("snowflake check needs p >= 1");

  // Rebuild both measures on [0,1] with the metric |x-y|^{1/p}.
  const GroundSpace snow = GroundSpace::powered_euclidean(1, 1.0 / p);
  auto reroot = [&](const DiscreteMeasure& m) {
    std::vector<WeightedAtom> atoms = m.atoms();
    return DiscreteMeasure(snow, std::move(atoms));
  };

  SnowflakeReport report;
  report.powered_cost = solve(reroot(mu), reroot(nu), p).cost;
  report.w1_closed_form = vallender_distance(mu, nu);
  report.deviation = std::abs(report.powered_cost - report.w1_closed_form);
  report.pass = report.deviation <= tol;
  return report;
}

}  // namespace wlab
