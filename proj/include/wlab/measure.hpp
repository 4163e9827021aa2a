#pragma once

#include <cstddef>
#include <vector>

#include "wlab/point.hpp"
#include "wlab/space.hpp"

namespace wlab {

// Tolerances used across the library.
inline constexpr double kWeightSumTol = 1e-12;   // internal weight-sum invariant
inline constexpr double kIngestWeightTol = 1e-9; // weight-sum slack on JSON ingest
inline constexpr double kMarginalTol = 1e-12;    // plan marginal invariant

struct WeightedAtom {
  Point point;
  double weight = 0.0;

  bool operator==(const WeightedAtom& o) const {
    return point == o.point && weight == o.weight;
  }
};

// Finitely supported probability measure. Construction canonicalizes:
// zero weights dropped, duplicate support points merged (exact coordinate
// equality), atoms sorted lexicographically, weights rescaled to sum 1.
class DiscreteMeasure {
 public:
  DiscreteMeasure(GroundSpace space, std::vector<WeightedAtom> atoms);

  static DiscreteMeasure dirac(GroundSpace space, Point x);

  const GroundSpace& space() const { return space_; }
  const std::vector<WeightedAtom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }

  // Mass carried by an exact support point; 0 if absent.
  double mass_at(const Point& x) const;

  bool is_dirac() const { return atoms_.size() == 1; }

  bool operator==(const DiscreteMeasure& other) const {
    return space_ == other.space_ && atoms_ == other.atoms_;
  }
  bool operator!=(const DiscreteMeasure& other) const { return !(*this == other); }

 private:
  GroundSpace space_;
  std::vector<WeightedAtom> atoms_;
};

// Named constructor form of the canonicalization above.
DiscreteMeasure normalize(GroundSpace space, std::vector<WeightedAtom> raw_atoms);

// mu = meet + plus and nu = meet + minus, atom by atom; plus and minus have
// disjoint supports and equal total mass.
struct SignedDecomposition {
  std::vector<WeightedAtom> meet;
  std::vector<WeightedAtom> plus;
  std::vector<WeightedAtom> minus;

  double shared_mass() const;
  double moved_mass() const;
};

SignedDecomposition lattice_decompose(const DiscreteMeasure& mu,
                                      const DiscreteMeasure& nu);

double total_mass(const std::vector<WeightedAtom>& atoms);

}  // namespace wlab
