#pragma once

#include "wlab/step_function.hpp"
#include "wlab/transport.hpp"

namespace wlab {

// W1 distance on [0,1] as the L1 gap between the two CDFs,
// integrated exactly piece by piece.
double vallender_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

// The measure whose CDF is the quantile function of mu. An involution on
// measures supported in [0,1] and a W1([0,1]) isometry. Sends delta_t to
// t*delta_0 + (1-t)*delta_1.
DiscreteMeasure flip(const DiscreteMeasure& mu);

struct SnowflakeReport {
  double powered_cost = 0.0;   // optimal cost under rho = |x-y|^{1/p}, exponent p
  double w1_closed_form = 0.0; // CDF-integral distance
  double deviation = 0.0;
  bool pass = false;
};

// Checks the cost identity d_{Wp(X)}^p = d_{W1(Y)} where X is [0,1] with the
// metric |x-y|^{1/p} and Y is [0,1] with the usual metric.
SnowflakeReport snowflake_check(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                                double p, double tol = 1e-10);

}  // namespace wlab
