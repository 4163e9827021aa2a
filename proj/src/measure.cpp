#include "wlab/measure.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace wlab {

namespace {

void validate_table(const std::vector<std::vector<double>>& t, bool ultrametric) {
  const std::size_t n = t.size();
  if (n == 0) throw std::invalid_argument("distance table is empty");
  for (const auto& row : t)
    if (row.size() != n) throw std::invalid_argument("distance table is not square");
  constexpr double tol = 1e-12;
  for (std::size_t i = 0; i < n; ++i) {
    if (t[i][i] != 0.0) throw std::invalid_argument("distance table diagonal must be zero");
    for (std::size_t j = 0; j < n; ++j) {
      if (!std::isfinite(t[i][j]) || t[i][j] < 0.0)
        throw std::invalid_argument("distance table entries must be finite and nonnegative");
      if (i != j && t[i][j] <= 0.0)
        throw std::invalid_argument("off-diagonal distances must be positive");
      if (t[i][j] != t[j][i])
        throw std::invalid_argument("distance table must be symmetric");
    }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k) {
        if (t[i][k] > t[i][j] + t[j][k] + tol)
          throw std::invalid_argument("distance table violates the triangle inequality");
        if (ultrametric && t[i][k] > std::max(t[i][j], t[j][k]) + tol)
          throw std::invalid_argument("table flagged ultrametric violates the max inequality");
      }
}

std::size_t table_index(const Point& x, std::size_t cardinality) {
  if (x.dim() != 1) throw std::invalid_argument("table-space points are single indices");
  const double c = x[0];
  if (!(c >= 0.0) || c != std::floor(c))
    throw std::invalid_argument("table-space point must be a nonnegative integer index");
  const auto idx = static_cast<std::size_t>(c);
  if (idx >= cardinality) throw std::out_of_range("table index out of range");
  return idx;
}

}  // namespace

GroundSpace GroundSpace::euclidean(std::size_t dim) {
  if (dim == 0) throw std::invalid_argument("dimension must be at least 1");
  GroundSpace s;
  s.kind_ = SpaceKind::euclidean;
  s.dim_ = dim;
  s.exponent_ = 1.0;
  return s;
}

GroundSpace GroundSpace::powered_euclidean(std::size_t dim, double exponent) {
  if (dim == 0) throw std::invalid_argument("dimension must be at least 1");
  if (!(exponent > 0.0) || exponent > 1.0)
    throw std::invalid_argument("powered metric exponent must lie in (0, 1]");
  GroundSpace s;
  s.kind_ = SpaceKind::powered_euclidean;
  s.dim_ = dim;
  s.exponent_ = exponent;
  return s;
}

GroundSpace GroundSpace::distance_table(std::vector<std::vector<double>> table,
                                        bool ultrametric) {
  validate_table(table, ultrametric);
  GroundSpace s;
  s.kind_ = SpaceKind::table;
  s.dim_ = 1;
  s.ultrametric_ = ultrametric;
  s.table_ = std::move(table);
  return s;
}

bool GroundSpace::strict_triangle() const {
  if (kind_ == SpaceKind::powered_euclidean) return exponent_ < 1.0;
  if (kind_ == SpaceKind::table) return ultrametric_;
  return false;
}

double pow_cost(double r, double p) {
  if (r == 0.0) return 0.0;
  if (p == 1.0) return r;
  if (p == 2.0) return r * r;
  if (p == 0.5) return std::sqrt(r);
  if (p > 0.0 && p <= 64.0 && p == std::floor(p)) {
    double acc = 1.0;
    double base = r;
    auto e = static_cast<unsigned>(p);
    while (e > 0) {
      if (e & 1u) acc *= base;
      base *= base;
      e >>= 1u;
    }
    return acc;
  }
  return std::pow(r, p);
}

double GroundSpace::distance(const Point& x, const Point& y) const {
  switch (kind_) {
    case SpaceKind::euclidean:
    case SpaceKind::powered_euclidean: {
      validate_point(x);
      validate_point(y);
      double s = 0.0;
      for (std::size_t i = 0; i < dim_; ++i) {
        const double d = x[i] - y[i];
        s += d * d;
      }
      const double r = std::sqrt(s);
      return kind_ == SpaceKind::euclidean ? r : pow_cost(r, exponent_);
    }
    case SpaceKind::table: {
      const std::size_t i = table_index(x, cardinality());
      const std::size_t j = table_index(y, cardinality());
      return table_[i][j];
    }
  }
  throw std::logic_error("unreachable");
}

void GroundSpace::validate_point(const Point& x) const {
  if (!all_finite(x)) throw std::invalid_argument("point has non-finite coordinates");
  if (kind_ == SpaceKind::table) {
    table_index(x, cardinality());
    return;
  }
  if (x.dim() != dim_) throw std::invalid_argument("point dimension mismatch");
}

bool GroundSpace::operator==(const GroundSpace& other) const {
  return kind_ == other.kind_ && dim_ == other.dim_ && exponent_ == other.exponent_ &&
         ultrametric_ == other.ultrametric_ && table_ == other.table_;
}

double total_mass(const std::vector<WeightedAtom>& atoms) {
  double s = 0.0;
  for (const auto& a : atoms) s += a.weight;
  return s;
}

DiscreteMeasure::DiscreteMeasure(GroundSpace space, std::vector<WeightedAtom> atoms)
    : space_(std::move(space)) {
  for (const auto& a : atoms) {
    space_.validate_point(a.point);
    if (!std::isfinite(a.weight) || a.weight < 0.0)
      throw std::invalid_argument("atom weights must be finite and nonnegative");
  }
  std::erase_if(atoms, [](const WeightedAtom& a) { return a.weight == 0.0; });
  if (atoms.empty()) throw std::invalid_argument("measure needs positive total mass");

  std::sort(atoms.begin(), atoms.end(), [](const WeightedAtom& a, const WeightedAtom& b) {
    return lex_less(a.point, b.point);
  });
  // Merge equal support points.
  for (auto& a : atoms) {
    if (!atoms_.empty() && atoms_.back().point == a.point)
      atoms_.back().weight += a.weight;
    else
      atoms_.push_back(a);
  }

  const double mass = total_mass(atoms_);
  if (!(mass > 0.0)) throw std::invalid_argument("measure needs positive total mass");
  if (mass != 1.0)
    for (auto& a : atoms_) a.weight /= mass;

  if (std::abs(total_mass(atoms_) - 1.0) > kWeightSumTol)
    throw std::logic_error("normalized weights failed the unit-mass invariant");
}

DiscreteMeasure DiscreteMeasure::dirac(GroundSpace space, Point x) {
  return DiscreteMeasure(std::move(space), {{std::move(x), 1.0}});
}

double DiscreteMeasure::mass_at(const Point& x) const {
  for (const auto& a : atoms_)
    if (a.point == x) return a.weight;
  return 0.0;
}

DiscreteMeasure normalize(GroundSpace space, std::vector<WeightedAtom> raw_atoms) {
  return DiscreteMeasure(std::move(space), std::move(raw_atoms));
}

double SignedDecomposition::shared_mass() const { return total_mass(meet); }
double SignedDecomposition::moved_mass() const { return total_mass(plus); }

SignedDecomposition lattice_decompose(const DiscreteMeasure& mu,
                                      const DiscreteMeasure& nu) {
  if (!(mu.space() == nu.space()))
    throw std::invalid_argument("decomposition needs a common ground space");

  SignedDecomposition dec;
  // Atoms are sorted, so a single merge pass suffices.
  std::size_t i = 0, j = 0;
  const auto& a = mu.atoms();
  const auto& b = nu.atoms();
  while (i < a.size() || j < b.size()) {
    if (j == b.size() || (i < a.size() && lex_less(a[i].point, b[j].point))) {
      dec.plus.push_back(a[i]);
      ++i;
    } else if (i == a.size() || lex_less(b[j].point, a[i].point)) {
      dec.minus.push_back(b[j]);
      ++j;
    } else {
      const double m = std::min(a[i].weight, b[j].weight);
      dec.meet.push_back({a[i].point, m});
      if (a[i].weight > m) dec.plus.push_back({a[i].point, a[i].weight - m});
      if (b[j].weight > m) dec.minus.push_back({b[j].point, b[j].weight - m});
      ++i;
      ++j;
    }
  }
  return dec;
}

}  // namespace wlab
