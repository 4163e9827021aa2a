#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wlab/measure.hpp"

namespace wlab {

using Matrix = std::vector<std::vector<double>>;

bool is_orthogonal(const Matrix& q, double tol = 1e-12);
Matrix matrix_product(const Matrix& a, const Matrix& b);
Point apply_matrix(const Matrix& q, const Point& x);

// A self-map of the Wasserstein space. Three constructions:
//  - pushforward of an affine isometry x -> Qx + v of Euclidean space,
//  - rotation R applied around the barycenter of each measure (W2 only),
//  - the quantile flip on [0,1] (the mass-splitting example).
class IsometryMap {
 public:
  enum class Kind { pushforward, rotation, flip };

  static IsometryMap pushforward(GroundSpace space, Matrix q, Point v);
  static IsometryMap translation(GroundSpace space, Point v);
  static IsometryMap rotation(GroundSpace space, Matrix r);
  static IsometryMap quantile_flip(GroundSpace space);

  Kind kind() const { return kind_; }
  const GroundSpace& space() const { return space_; }
  const Matrix& matrix() const { return q_; }
  const Point& shift() const { return v_; }
  std::string variant_name() const;

  // Exponents for which this map is a verified isometry class: any p for
  // pushforwards, p = 2 for rotations, p = 1/q for the flip on a powered
  // [0,1] line.
  bool compatible_exponent(double p) const;

 private:
  IsometryMap() = default;
  Kind kind_ = Kind::pushforward;
  GroundSpace space_ = GroundSpace::euclidean(1);
  Matrix q_;
  Point v_;
};

DiscreteMeasure apply(const IsometryMap& iso, const DiscreteMeasure& mu);

struct IsometryViolation {
  std::uint64_t trial = 0;
  double before = 0.0;
  double after = 0.0;
  double deviation = 0.0;
};

struct IsometryTrialReport {
  std::string variant;
  double p = 0.0;
  int trials = 0;
  double max_deviation = 0.0;
  std::vector<IsometryViolation> violations;

  bool all_within(double tol) const { return max_deviation <= tol; }
};

// Seeded randomized distance-preservation check: N measure pairs, each trial
// with its own (seed, trial) stream; records every deviation beyond tol.
IsometryTrialReport verify_isometry(const IsometryMap& iso, double p, int trials,
                                    std::uint64_t seed, double tol = 1e-8);

struct DiracClassification {
  bool preserves_diracs = true;
  std::optional<Point> split_point;
  std::optional<DiscreteMeasure> split_image;
};

DiracClassification dirac_image_classifier(const IsometryMap& iso,
                                           const std::vector<Point>& sample_points);

}  // namespace wlab
