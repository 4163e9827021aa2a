#include "wlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wlab {

namespace {

void require_euclidean(const GroundSpace& space, const char* what) {
  if (space.kind() != SpaceKind::euclidean)
    throw std::invalid_argument(std::string(what) + " needs a Euclidean ground space");
}

}  // namespace

DiscreteMeasure displacement_interpolate(const TransportPlan& plan, double total_length,
                                         double t) {
  require_euclidean(plan.space(), "displacement interpolation");
  if (total_length == 0.0) {
    if (t != 0.0) throw std::out_of_range("interpolation parameter outside [0,T]");
    return plan.source_marginal();
  }
  if (t < 0.0 || t > total_length)
    throw std::out_of_range("interpolation parameter outside [0,T]");
  const double s = t / total_length;
  std::vector<WeightedAtom> atoms;
  for (const auto& [i, j] : plan.support())
    atoms.push_back({(1.0 - s) * plan.source_points()[i] + s * plan.target_points()[j],
                     plan.mass(i, j)});
  return DiscreteMeasure(plan.space(), std::move(atoms));
}

GeodesicCurve::GeodesicCurve(TransportPlan plan, double total_length)
    : plan_(std::move(plan)), total_length_(total_length) {
  if (total_length_ < 0.0) throw std::invalid_argument("negative geodesic length");
}

GeodesicCurve GeodesicCurve::between(const DiscreteMeasure& mu,
                                     const DiscreteMeasure& nu, double p) {
  if (!(p > 1.0))
    throw std::invalid_argument("displacement geodesics need p > 1");
  require_euclidean(mu.space(), "displacement geodesic");
  OTResult r = solve(mu, nu, p);
  return GeodesicCurve(std::move(r.plan), r.distance);
}

DiscreteMeasure GeodesicCurve::at(double t) const {
  return displacement_interpolate(plan_, total_length_, t);
}

DiscreteMeasure dilate(const DiscreteMeasure& mu, const Point& center, double lambda) {
  require_euclidean(mu.space(), "dilation");
  mu.space().validate_point(center);
  std::vector<WeightedAtom> atoms;
  for (const auto& a : mu.atoms())
    atoms.push_back({center + lambda * (a.point - center), a.weight});
  return DiscreteMeasure(mu.space(), std::move(atoms));
}

double dirac_ray_length(const Point& x, const DiscreteMeasure& nu, double p) {
  double cost = 0.0;
  for (const auto& a : nu.atoms())
    cost += a.weight * pow_cost(nu.space().distance(x, a.point), p);
  return distance_from_cost(cost, p);
}

DiscreteMeasure dirac_ray(const Point& x, const DiscreteMeasure& nu, double p,
                          double t) {
  if (!(p > 1.0)) throw std::invalid_argument("dirac rays need p > 1");
  require_euclidean(nu.space(), "dirac ray");
  if (t < 0.0) throw std::out_of_range("ray parameter must be nonnegative");
  const double total = dirac_ray_length(x, nu, p);
  if (total == 0.0)
    throw std::invalid_argument("ray undefined: nu equals the Dirac at its apex");
  return dilate(nu, x, t / total);
}

AntipodalReport check_antipodal_plan(const DiscreteMeasure& mu, const Point& x,
                                     double p, double tol) {
  if (!(p > 1.0)) throw std::invalid_argument("antipodal check needs p > 1");
  require_euclidean(mu.space(), "antipodal check");

  AntipodalReport report;
  double refl = 0.0;
  for (const auto& a : mu.atoms())
    refl += a.weight * pow_cost(2.0 * mu.space().distance(a.point, x), p);
  report.reflection_cost = refl;
  report.optimal_cost = solve(mu, dilate(mu, x, -1.0), p).cost;
  report.gap = report.reflection_cost - report.optimal_cost;
  report.strictly_beaten = report.gap > tol;
  return report;
}

Point barycenter(const DiscreteMeasure& mu) {
  require_euclidean(mu.space(), "barycenter");
  Point m = Point::zero(mu.space().dim());
  for (const auto& a : mu.atoms()) m = m + a.weight * a.point;
  return m;
}

DiscreteMeasure translate(const DiscreteMeasure& mu, const Point& v) {
  require_euclidean(mu.space(), "translation");
  mu.space().validate_point(v);
  std::vector<WeightedAtom> atoms;
  for (const auto& a : mu.atoms()) atoms.push_back({a.point + v, a.weight});
  return DiscreteMeasure(mu.space(), std::move(atoms));
}

TranslationReport check_translation_identity(const DiscreteMeasure& mu,
                                             const DiscreteMeasure& nu, const Point& v,
                                             double tol) {
  require_euclidean(mu.space(), "translation identity");
  TranslationReport report;
  const Point mmu = barycenter(mu);
  const Point mnu = barycenter(nu);
  const double w22 = solve(mu, nu, 2.0).cost;
  report.lhs = solve(translate(mu, v), nu, 2.0).cost;
  report.rhs = w22 + dot(v, v + 2.0 * (mmu - mnu));
  report.deviation = std::abs(report.lhs - report.rhs);
  report.identity_holds = report.deviation <= tol;
  report.distance = std::sqrt(std::max(w22, 0.0));
  report.barycenter_gap = norm(mnu - mmu);
  report.detects_translate = std::abs(report.distance - report.barycenter_gap) <= tol;
  return report;
}

namespace {

// Orthonormal basis of the span, dropping near-null directions.
std::vector<Point> orthonormalize(const std::vector<Point>& dirs) {
  std::vector<Point> basis;
  for (const auto& d : dirs) {
    Point r = d;
    for (const auto& b : basis) r = r - dot(r, b) * b;
    const double n = norm(r);
    if (n > 1e-12) basis.push_back((1.0 / n) * r);
  }
  return basis;
}

}  // namespace

bool AffineSubspace::contains(const Point& x, double tol) const {
  Point r = x - base;
  for (const auto& b : orthonormalize(directions)) r = r - dot(r, b) * b;
  return norm(r) <= tol * (1.0 + norm(x) + norm(base));
}

bool orthogonal_subspaces(const AffineSubspace& l, const AffineSubspace& m,
                          double tol) {
  for (const auto& u : orthonormalize(l.directions))
    for (const auto& w : orthonormalize(m.directions))
      if (std::abs(dot(u, w)) > tol) return false;
  return true;
}

OrthogonalityReport check_orthogonality(const DiscreteMeasure& mu,
                                        const DiscreteMeasure& nu,
                                        const AffineSubspace& l,
                                        const AffineSubspace& m, double tol) {
  require_euclidean(mu.space(), "orthogonality check");
  OrthogonalityReport report;

  report.supports_contained = true;
  for (const auto& a : mu.atoms())
    report.supports_contained = report.supports_contained && l.contains(a.point);
  for (const auto& a : nu.atoms())
    report.supports_contained = report.supports_contained && m.contains(a.point);
  report.subspaces_orthogonal = orthogonal_subspaces(l, m);

  const Point mmu = barycenter(mu);
  const Point mnu = barycenter(nu);
  double sigma2 = 0.0, rho2 = 0.0;
  for (const auto& a : mu.atoms()) sigma2 += a.weight * squared_norm(a.point - mmu);
  for (const auto& a : nu.atoms()) rho2 += a.weight * squared_norm(a.point - mnu);

  report.lhs = solve(mu, nu, 2.0).cost;
  report.rhs = squared_norm(mmu - mnu) + sigma2 + rho2;
  report.deviation = std::abs(report.lhs - report.rhs);
  report.identity_holds = report.deviation <= tol;
  report.lhs_strictly_below = report.lhs < report.rhs - tol;
  return report;
}

DiscreteMeasure ratio_point(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("ratio parameter must lie in (0,1)");
  if (!(mu.space() == nu.space()))
    throw std::invalid_argument("mixture needs a common ground space");
  std::vector<WeightedAtom> atoms;
  for (const auto& a : mu.atoms()) atoms.push_back({a.point, (1.0 - lambda) * a.weight});
  for (const auto& a : nu.atoms()) atoms.push_back({a.point, lambda * a.weight});
  return DiscreteMeasure(mu.space(), std::move(atoms));
}

RatioMembershipReport check_ratio_membership(const DiscreteMeasure& mu,
                                             const DiscreteMeasure& nu, double lambda,
                                             const DiscreteMeasure& eta, double p,
                                             double tol) {
  if (!(lambda > 0.0 && lambda < 1.0))
    throw std::invalid_argument("ratio parameter must lie in (0,1)");
  RatioMembershipReport report;
  report.d_mu_nu = wasserstein_distance(mu, nu, p);
  report.d_mu_eta = wasserstein_distance(mu, eta, p);
  report.d_eta_nu = wasserstein_distance(eta, nu, p);
  report.deviation = std::max(std::abs(report.d_mu_eta - lambda * report.d_mu_nu),
                              std::abs(report.d_eta_nu - (1.0 - lambda) * report.d_mu_nu));
  report.member = report.deviation <= tol;
  return report;
}

}  // namespace wlab
