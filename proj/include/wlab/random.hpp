#pragma once

#include <cstdint>
#include <vector>

#include "wlab/measure.hpp"

namespace wlab {

std::uint64_t splitmix64(std::uint64_t& state);

// Seeded generator with explicit double construction so that streams are
// identical across standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed + 0x9e3779b97f4a7c15ull) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0,1).
  double uniform01() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

  // Inclusive bounds.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  // Multiple of 2^-bits in [0,1]; sums and differences of such values stay
  // exact in double arithmetic, which the exactness suites rely on.
  double dyadic01(int bits = 20);

  double gaussian();

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// Independent stream for (seed, index...) so trial order never matters.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0,
                          std::uint64_t c = 0);

struct MeasureGenOptions {
  int min_atoms = 1;
  int max_atoms = 6;
  double box_lo = -1.0;
  double box_hi = 1.0;
  bool dyadic = true;  // snap coordinates and weights to the 2^-20 grid
  int grid_bits = 20;
  double min_gap = 0.0;        // minimum pairwise support distance (Euclidean)
  double min_weight = 0.0;     // per-atom weight floor
};

// Random measure on a Euclidean or powered-Euclidean space: atom count
// uniform in [min_atoms, max_atoms], points uniform in the box, weights from
// a flat simplex distribution.
DiscreteMeasure random_measure(Rng& rng, const GroundSpace& space,
                               const MeasureGenOptions& opts = {});

// Random measure supported on table indices.
DiscreteMeasure random_table_measure(Rng& rng, const GroundSpace& space,
                                     int max_atoms = 6);

std::vector<double> random_simplex_weights(Rng& rng, int n, bool dyadic = true,
                                           int grid_bits = 20,
                                           double min_weight = 0.0);

Point random_unit_vector(Rng& rng, std::size_t dim);

// Haar-ish orthogonal matrix via Gram-Schmidt on Gaussian columns.
std::vector<std::vector<double>> random_orthogonal(Rng& rng, std::size_t dim);

// Random ultrametric on n points from a random binary merge tree with
// decreasing diameters.
std::vector<std::vector<double>> random_ultrametric(Rng& rng, std::size_t n,
                                                    int grid_bits = 10);

}  // namespace wlab
