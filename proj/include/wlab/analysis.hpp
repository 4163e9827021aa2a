#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "wlab/measure.hpp"

namespace wlab {

// Potential of mu at x: integral of ||x-y||^p d mu(y). Euclidean spaces only.
double potential(const DiscreteMeasure& mu, double p, const Point& x);

// k = ceil(p/2), the finite-difference order used by the atom-recovery limit.
int recovery_order(double p);

bool is_even_integer(double p);

// Full alternating sum  sum_{j=0}^{2k} C(2k,j) (-1)^j |k-j|^p.
// Nonzero for every non-even p > 0 (and twice the half sum over j < k).
double denominator_coefficient(double p, int k);

// Exact-integer value of  sum_{j=0}^{k-1} C(2k,j) (-1)^j (k-j)^{2m}.
long long comb_alternating_sum(int k, int m);

struct CombIdentityReport {
  bool covered = false;  // identity claims zero only for 1 <= m < k
  long long value = 0;
  bool zero = false;
};

CombIdentityReport comb_identity_check(int k, int m);

// Centered finite-difference quotient whose limit as step -> 0 is mu({x}).
// Requires p not an even integer. Internally evaluated in quad precision:
// the alternating numerator cancels to O(step^{2k}) against potentials of
// order one, which double roundoff would swamp at small steps.
double atom_mass_quotient(const DiscreteMeasure& mu, double p, const Point& x,
                          const Point& direction, double step);

// Single-point form of the same quotient with mu = delta_0, defined for every
// p > 0. Tends to 1 at x = 0 and to 0 elsewhere for non-even p; identically 1
// for even integer p, which is why recovery excludes those exponents.
double peak_quotient(const Point& x, const Point& direction, double p, double step);

struct FiniteDifferenceProbe {
  double p = 1.0;
  int k = 1;
  Point base;
  Point direction;            // unit vector
  std::vector<double> steps;  // strictly decreasing to 0
};

// Default probe: geometric schedule s_m = s0 / 2^m with s0 = (min atom gap)/(5k),
// 12 steps; unit direction rejection-sampled against the atom difference set so
// probe points never straddle two atoms symmetrically. rng_seed drives the
// direction choice only.
FiniteDifferenceProbe make_probe(const DiscreteMeasure& mu, double p, const Point& x,
                                 std::uint64_t rng_seed, int num_steps = 12);

struct AtomEstimate {
  double step = 0.0;
  double estimate = 0.0;
};

std::vector<AtomEstimate> atom_mass_estimate(const DiscreteMeasure& mu, double p,
                                             const Point& x,
                                             const FiniteDifferenceProbe& probe);

// Least-squares slope of log|estimate - target| against log(step), ignoring
// entries below the noise floor. Returns nullopt when fewer than two usable
// points remain.
std::optional<double> estimate_convergence_order(const std::vector<AtomEstimate>& seq,
                                                 double target,
                                                 double noise_floor = 1e-14);

struct IdentityReport {
  bool identified_equal = false;
  std::optional<Point> separating_point;
  double max_potential_gap = 0.0;
  double max_atom_gap = 0.0;
};

// Decides mu = nu by comparing potentials on the probe grid and recovered
// atom masses at every support point. Valid for p >= 1 not an even integer.
IdentityReport measure_identity_via_potentials(const DiscreteMeasure& mu,
                                               const DiscreteMeasure& nu, double p,
                                               const std::vector<Point>& probe_grid,
                                               double tol = 1e-9);

// Closed form of the second directional derivative functional at an even
// exponent p = 2k >= 4 and unit direction x:
//   k * int ||y||^(2k-2) dmu + 2k(k-1) * int <x,y>^2 ||y||^(2k-4) dmu.
double second_directional_functional(const DiscreteMeasure& mu, int p,
                                     const Point& unit_x);

// Symmetric difference quotient of the potential at 0 along x; converges to
// the closed form as step -> 0.
double second_directional_quotient(const DiscreteMeasure& mu, int p,
                                   const Point& unit_x, double step);

// Mass of the bisector hyperplane B(ax, bx) recovered from distances to the
// two-point measures alpha*delta_{ax} + (1-alpha)*delta_{bx}: the cost as a
// function of alpha is convex piecewise linear and the flat minimizing
// interval has exactly that length. Solved by sorting cost differences.
double hyperplane_mass_via_bisector(const DiscreteMeasure& mu, const Point& x,
                                    double a, double b, double p);

// Direct mass of mu on B(ax, bx); the independent cross-check.
double bisector_mass_direct(const DiscreteMeasure& mu, const Point& x, double a,
                            double b);

// Coarse alpha-grid scan of alpha -> Wp^p(mu, zeta^alpha) retained as a
// second oracle for the piecewise-linear minimization; returns the length of
// the grid interval attaining the minimum within grid resolution.
double bisector_mass_grid_scan(const DiscreteMeasure& mu, const Point& x, double a,
                               double b, double p, double grid_step = 1e-3);

// Wp^p(mu, alpha*delta_{ax} + (1-alpha)*delta_{bx}) in closed form.
double zeta_cost(const DiscreteMeasure& mu, const Point& x, double a, double b,
                 double p, double alpha);

}  // namespace wlab
