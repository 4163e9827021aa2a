#pragma once

#include <cstddef>
#include <vector>

#include "wlab/point.hpp"

namespace wlab {

enum class SpaceKind { euclidean, powered_euclidean, table };

// Metric structure on points: plain Euclidean, Euclidean distance raised to
// a power q in (0,1] (q < 1 gives the strict triangle inequality), or an
// explicit symmetric distance table indexed by integer-valued points.
class GroundSpace {
 public:
  static GroundSpace euclidean(std::size_t dim);
  static GroundSpace powered_euclidean(std::size_t dim, double exponent);
  static GroundSpace distance_table(std::vector<std::vector<double>> table,
                                    bool ultrametric = false);

  SpaceKind kind() const { return kind_; }
  std::size_t dim() const { return dim_; }

  // q for powered_euclidean; 1 for euclidean.
  double exponent() const { return exponent_; }
  std::size_t cardinality() const { return table_.size(); }
  bool ultrametric() const { return ultrametric_; }
  const std::vector<std::vector<double>>& table() const { return table_; }

  // True when the metric provably satisfies the strict triangle inequality:
  // powered Euclidean with q < 1, or a table flagged (and checked) ultrametric.
  bool strict_triangle() const;

  double distance(const Point& x, const Point& y) const;
  void validate_point(const Point& x) const;

  bool operator==(const GroundSpace& other) const;

 private:
  GroundSpace() = default;

  SpaceKind kind_ = SpaceKind::euclidean;
  std::size_t dim_ = 0;
  double exponent_ = 1.0;
  bool ultrametric_ = false;
  std::vector<std::vector<double>> table_;
};

// r^p with fast paths for integer p; exp/log only for fractional exponents.
double pow_cost(double r, double p);

}  // namespace wlab
