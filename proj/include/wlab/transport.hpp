#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "wlab/measure.hpp"

namespace wlab {

// Nonnegative mass table between two finite supports. Row sums reproduce the
// source weights and column sums the target weights, each within 1e-12.
class TransportPlan {
 public:
  TransportPlan(GroundSpace space, std::vector<Point> source_points,
                std::vector<Point> target_points, std::vector<double> mass);

  static TransportPlan diagonal(const DiscreteMeasure& mu);
  static TransportPlan product(const DiscreteMeasure& mu, const DiscreteMeasure& nu);

  std::size_t rows() const { return source_points_.size(); }
  std::size_t cols() const { return target_points_.size(); }
  double mass(std::size_t i, std::size_t j) const { return mass_[i * cols() + j]; }
  const std::vector<double>& mass_table() const { return mass_; }

  const GroundSpace& space() const { return space_; }
  const std::vector<Point>& source_points() const { return source_points_; }
  const std::vector<Point>& target_points() const { return target_points_; }

  std::vector<double> row_sums() const;
  std::vector<double> col_sums() const;
  DiscreteMeasure source_marginal() const;
  DiscreteMeasure target_marginal() const;

  // Support cells with positive mass.
  std::vector<std::pair<std::size_t, std::size_t>> support(double tol = 0.0) const;

 private:
  GroundSpace space_;
  std::vector<Point> source_points_;
  std::vector<Point> target_points_;
  std::vector<double> mass_;  // row-major rows() x cols()
};

struct OTResult {
  double cost = 0.0;      // integral of rho^p against the plan
  double distance = 0.0;  // cost^(1/p) for p >= 1, cost itself for p < 1
  double p = 1.0;
  TransportPlan plan;
};

double distance_from_cost(double cost, double p);

// Integral of rho(x,y)^p against the plan.
double plan_cost(const TransportPlan& plan, double p);

// Exact optimum of the discrete transportation problem with cost rho^p.
// Transportation simplex, north-west-corner start, Bland's rule; deterministic.
OTResult solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p);

double wasserstein_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            double p);

// Independent oracle: enumerates every basic feasible solution (spanning-tree
// support) of the transportation polytope. Requires |supp mu|*|supp nu| <= 16.
OTResult brute_force_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           double p);

// All optimal vertices within `tol` of the minimum, deduplicated.
std::vector<TransportPlan> brute_force_optimal_vertices(const DiscreteMeasure& mu,
                                                        const DiscreteMeasure& nu,
                                                        double p,
                                                        double tol = 1e-10);

// Composition through a shared middle marginal:
// mass13(i,k) = sum_j mass12(i,j) * mass23(j,k) / mu2(j).
TransportPlan glue(const TransportPlan& pi12, const TransportPlan& pi23);

struct CMonotonicityViolation {
  std::size_t i1, j1, i2, j2;
  double gap;  // c(x1,y1)+c(x2,y2) - c(x1,y2)-c(x2,y1) > 0
};

struct CMonotonicityReport {
  bool monotone = true;
  double worst_gap = 0.0;
  std::vector<CMonotonicityViolation> violations;
};

// Pairwise necessary condition for optimality on the plan support.
CMonotonicityReport check_c_monotone(const TransportPlan& plan, double p,
                                     double tol = 1e-10);

struct DiagonalMassReport {
  bool ok = false;
  double max_diagonal_deviation = 0.0;
  double max_residual_deviation = 0.0;
  std::optional<Point> offending_atom;
};

// For strict-triangle spaces and cost = rho (p = 1): asserts that the plan
// keeps the shared mass mu ^ nu in place and moves exactly the residuals.
DiagonalMassReport diagonal_mass_check(const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu,
                                       const TransportPlan& plan,
                                       double tol = 1e-10);

}  // namespace wlab
