#include "wlab/isometries.hpp"

#include <cmath>
#include <stdexcept>

#include "wlab/geometry.hpp"
#include "wlab/onedim.hpp"
#include "wlab/random.hpp"
#include "wlab/transport.hpp"

namespace wlab {

bool is_orthogonal(const Matrix& q, double tol) {
  const std::size_t d = q.size();
  for (const auto& row : q)
    if (row.size() != d) return false;
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < d; ++k) s += q[k][i] * q[k][j];
      if (std::abs(s - (i == j ? 1.0 : 0.0)) > tol) return false;
    }
  return true;
}

Matrix matrix_product(const Matrix& a, const Matrix& b) {
  const std::size_t d = a.size();
  Matrix c(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t k = 0; k < d; ++k)
      for (std::size_t j = 0; j < d; ++j) c[i][j] += a[i][k] * b[k][j];
  return c;
}

Point apply_matrix(const Matrix& q, const Point& x) {
  const std::size_t d = q.size();
  if (x.dim() != d) throw std::invalid_argument("matrix/point dimension mismatch");
  Point y = Point::zero(d);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) y[i] += q[i][j] * x[j];
  return y;
}

namespace {

void require_line_space(const GroundSpace& space) {
  if (space.kind() == SpaceKind::table || space.dim() != 1)
    throw std::invalid_argument("flip needs a one-dimensional line space");
}

}  // namespace

IsometryMap IsometryMap::pushforward(GroundSpace space, Matrix q, Point v) {
  if (space.kind() == SpaceKind::table)
    throw std::invalid_argument("pushforward isometries need a coordinate space");
  if (q.size() != space.dim() || v.dim() != space.dim())
    throw std::invalid_argument("pushforward dimension mismatch");
  if (!is_orthogonal(q))
    throw std::invalid_argument("pushforward matrix must be orthogonal");
  IsometryMap iso;
  iso.kind_ = Kind::pushforward;
  iso.space_ = std::move(space);
  iso.q_ = std::move(q);
  iso.v_ = std::move(v);
  return iso;
}

IsometryMap IsometryMap::translation(GroundSpace space, Point v) {
  const std::size_t d = space.dim();
  Matrix id(d, std::vector<double>(d, 0.0));
  for (std::size_t i = 0; i < d; ++i) id[i][i] = 1.0;
  return pushforward(std::move(space), std::move(id), std::move(v));
}

IsometryMap IsometryMap::rotation(GroundSpace space, Matrix r) {
  if (space.kind() != SpaceKind::euclidean)
    throw std::invalid_argument("barycentric rotations act on Euclidean spaces");
  if (r.size() != space.dim())
    throw std::invalid_argument("rotation dimension mismatch");
  if (!is_orthogonal(r))
    throw std::invalid_argument("rotation matrix must be orthogonal");
  IsometryMap iso;
  iso.kind_ = Kind::rotation;
  iso.space_ = std::move(space);
  iso.q_ = std::move(r);
  return iso;
}

IsometryMap IsometryMap::quantile_flip(GroundSpace space) {
  require_line_space(space);
  IsometryMap iso;
  iso.kind_ = Kind::flip;
  iso.space_ = std::move(space);
  return iso;
}

std::string IsometryMap::variant_name() const {
  switch (kind_) {
    case Kind::pushforward: return "pushforward";
    case Kind::rotation: return "kloeckner_rotation";
    case Kind::flip: return "flip";
  }
  return "?";
}

bool IsometryMap::compatible_exponent(double p) const {
  switch (kind_) {
    case Kind::pushforward: return p > 0.0;
    case Kind::rotation: return p == 2.0;
    case Kind::flip: return p >= 1.0 && std::abs(p * space_.exponent() - 1.0) <= 1e-12;
  }
  return false;
}

DiscreteMeasure apply(const IsometryMap& iso, const DiscreteMeasure& mu) {
  if (!(mu.space() == iso.space()))
    throw std::invalid_argument("isometry and measure live on different spaces");
  switch (iso.kind()) {
    case IsometryMap::Kind::pushforward: {
      std::vector<WeightedAtom> atoms;
      for (const auto& a : mu.atoms())
        atoms.push_back({apply_matrix(iso.matrix(), a.point) + iso.shift(), a.weight});
      return DiscreteMeasure(mu.space(), std::move(atoms));
    }
    case IsometryMap::Kind::rotation: {
      const Point m = barycenter(mu);
      std::vector<WeightedAtom> atoms;
      for (const auto& a : mu.atoms())
        atoms.push_back({m + apply_matrix(iso.matrix(), a.point - m), a.weight});
      return DiscreteMeasure(mu.space(), std::move(atoms));
    }
    case IsometryMap::Kind::flip:
      return flip(mu);
  }
  throw std::logic_error("unreachable");
}

IsometryTrialReport verify_isometry(const IsometryMap& iso, double p, int trials,
                                    std::uint64_t seed, double tol) {
  if (trials < 1) throw std::invalid_argument("need at least one trial");
  IsometryTrialReport report;
  report.variant = iso.variant_name();
  report.p = p;
  report.trials = trials;

  MeasureGenOptions opts;
  if (iso.kind() == IsometryMap::Kind::flip) {
    opts.box_lo = 0.0;
    opts.box_hi = 1.0;
  }

  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, 0x150eull, static_cast<std::uint64_t>(trial)));
    const DiscreteMeasure mu = random_measure(rng, iso.space(), opts);
    const DiscreteMeasure nu = random_measure(rng, iso.space(), opts);
    const double before = wasserstein_distance(mu, nu, p);
    const double after = wasserstein_distance(apply(iso, mu), apply(iso, nu), p);
    const double dev = std::abs(after - before);
    report.max_deviation = std::max(report.max_deviation, dev);
    if (dev > tol)
      report.violations.push_back(
          {static_cast<std::uint64_t>(trial), before, after, dev});
  }
  return report;
}

DiracClassification dirac_image_classifier(const IsometryMap& iso,
                                           const std::vector<Point>& sample_points) {
  DiracClassification result;
  for (const auto& x : sample_points) {
    const DiscreteMeasure image = apply(iso, DiscreteMeasure::dirac(iso.space(), x));
    if (!image.is_dirac()) {
      result.preserves_diracs = false;
      result.split_point = x;
      result.split_image = image;
      return result;
    }
  }
  return result;
}

}  // namespace wlab
