#include "wlab/random.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace wlab {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi < lo) throw std::invalid_argument("empty integer range");
  const auto span = static_cast<std::uint64_t>(hi - lo) + 1;
  return lo + static_cast<std::int64_t>(next_u64() % span);
}

double Rng::dyadic01(int bits) {
  if (bits < 1 || bits > 52) throw std::invalid_argument("grid bits out of range");
  const std::uint64_t grid = 1ull << bits;
  return static_cast<double>(next_u64() % (grid + 1)) / static_cast<double>(grid);
}

double Rng::gaussian() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  double u, v, s;
  do {
    u = 2.0 * uniform01() - 1.0;
    v = 2.0 * uniform01() - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  const double factor = std::sqrt(-2.0 * std::log(s) / s);
  spare_ = v * factor;
  have_spare_ = true;
  return u * factor;
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                          std::uint64_t c) {
  std::uint64_t state = seed;
  splitmix64(state);
  state ^= 0x9e3779b97f4a7c15ull + a;
  splitmix64(state);
  state ^= 0xc2b2ae3d27d4eb4full + b;
  splitmix64(state);
  state ^= 0x165667b19e3779f9ull + c;
  return splitmix64(state);
}

std::vector<double> random_simplex_weights(Rng& rng, int n, bool dyadic, int grid_bits,
                                           double min_weight) {
  if (n < 1) throw std::invalid_argument("need at least one weight");
  if (n == 1) return {1.0};
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<double> w;
    if (dyadic) {
      const std::int64_t grid = 1ll << grid_bits;
      std::set<std::int64_t> cuts;
      while (static_cast<int>(cuts.size()) < n - 1)
        cuts.insert(rng.uniform_int(1, grid - 1));
      std::vector<std::int64_t> edges{0};
      edges.insert(edges.end(), cuts.begin(), cuts.end());
      edges.push_back(grid);
      for (int i = 0; i < n; ++i)
        w.push_back(static_cast<double>(edges[i + 1] - edges[i]) /
                    static_cast<double>(grid));
    } else {
      double total = 0.0;
      for (int i = 0; i < n; ++i) {
        w.push_back(-std::log(1.0 - rng.uniform01()));
        total += w.back();
      }
      for (double& x : w) x /= total;
    }
    if (*std::min_element(w.begin(), w.end()) >= min_weight) return w;
  }
  throw std::runtime_error("simplex weight rejection sampling exhausted");
}

namespace {

Point random_box_point(Rng& rng, std::size_t dim, const MeasureGenOptions& opts) {
  Point x = Point::zero(dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const double u = opts.dyadic ? rng.dyadic01(opts.grid_bits) : rng.uniform01();
    x[i] = opts.box_lo + (opts.box_hi - opts.box_lo) * u;
  }
  return x;
}

}  // namespace

DiscreteMeasure random_measure(Rng& rng, const GroundSpace& space,
                               const MeasureGenOptions& opts) {
  if (space.kind() == SpaceKind::table)
    throw std::invalid_argument("use random_table_measure for table spaces");
  const int n = static_cast<int>(rng.uniform_int(opts.min_atoms, opts.max_atoms));
  std::vector<Point> pts;
  for (int attempt = 0; attempt < 100000 && static_cast<int>(pts.size()) < n;
       ++attempt) {
    Point cand = random_box_point(rng, space.dim(), opts);
    bool ok = true;
    for (const auto& q : pts) {
      if (cand == q) ok = false;
      if (opts.min_gap > 0.0 && norm(cand - q) < opts.min_gap) ok = false;
    }
    if (ok) pts.push_back(std::move(cand));
  }
  if (static_cast<int>(pts.size()) < n)
    throw std::runtime_error("support rejection sampling exhausted");
  const auto w =
      random_simplex_weights(rng, n, opts.dyadic, opts.grid_bits, opts.min_weight);
  std::vector<WeightedAtom> atoms;
  for (int i = 0; i < n; ++i) atoms.push_back({pts[i], w[i]});
  return DiscreteMeasure(space, std::move(atoms));
}

DiscreteMeasure random_table_measure(Rng& rng, const GroundSpace& space,
                                     int max_atoms) {
  if (space.kind() != SpaceKind::table)
    throw std::invalid_argument("table measure needs a table space");
  const auto n = static_cast<std::int64_t>(space.cardinality());
  const int count =
      static_cast<int>(rng.uniform_int(1, std::min<std::int64_t>(max_atoms, n)));
  std::set<std::int64_t> idx;
  while (static_cast<int>(idx.size()) < count) idx.insert(rng.uniform_int(0, n - 1));
  const auto w = random_simplex_weights(rng, count, true, 20, 0.0);
  std::vector<WeightedAtom> atoms;
  int i = 0;
  for (std::int64_t id : idx) atoms.push_back({Point{static_cast<double>(id)}, w[i++]});
  return DiscreteMeasure(space, std::move(atoms));
}

Point random_unit_vector(Rng& rng, std::size_t dim) {
  while (true) {
    Point x = Point::zero(dim);
    for (std::size_t i = 0; i < dim; ++i) x[i] = rng.gaussian();
    const double n = norm(x);
    if (n > 1e-6) {
      x = (1.0 / n) * x;
      // One more normalization pass tightens |x| to 1 within an ulp or two.
      return (1.0 / norm(x)) * x;
    }
  }
}

std::vector<std::vector<double>> random_orthogonal(Rng& rng, std::size_t dim) {
  std::vector<Point> cols;
  while (cols.size() < dim) {
    Point v = Point::zero(dim);
    for (std::size_t i = 0; i < dim; ++i) v[i] = rng.gaussian();
    for (int pass = 0; pass < 2; ++pass)
      for (const auto& b : cols) v = v - dot(v, b) * b;
    const double n = norm(v);
    if (n < 1e-6) continue;
    v = (1.0 / n) * v;
    cols.push_back((1.0 / norm(v)) * v);
  }
  std::vector<std::vector<double>> q(dim, std::vector<double>(dim));
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) q[i][j] = cols[j][i];
  return q;
}

namespace {

void fill_ultrametric(Rng& rng, std::vector<std::size_t> block, double diameter,
                      int grid_bits, std::vector<std::vector<double>>& t) {
  if (block.size() <= 1) return;
  // Random nonempty split; cross-block distances take the block diameter.
  std::vector<std::size_t> left, right;
  while (left.empty() || right.empty()) {
    left.clear();
    right.clear();
    for (std::size_t id : block)
      (rng.next_u64() & 1u ? left : right).push_back(id);
  }
  for (std::size_t i : left)
    for (std::size_t j : right) t[i][j] = t[j][i] = diameter;
  const std::int64_t grid = 1ll << grid_bits;
  auto child = [&](double parent) {
    const auto lo = static_cast<std::int64_t>(grid / 4);
    const auto hi = static_cast<std::int64_t>((grid * 3) / 4);
    return parent * static_cast<double>(rng.uniform_int(lo, hi)) /
           static_cast<double>(grid);
  };
  fill_ultrametric(rng, std::move(left), child(diameter), grid_bits, t);
  fill_ultrametric(rng, std::move(right), child(diameter), grid_bits, t);
}

}  // namespace

std::vector<std::vector<double>> random_ultrametric(Rng& rng, std::size_t n,
                                                    int grid_bits) {
  if (n < 2) throw std::invalid_argument("ultrametric needs at least two points");
  std::vector<std::vector<double>> t(n, std::vector<double>(n, 0.0));
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  fill_ultrametric(rng, std::move(all), 1.0, grid_bits, t);
  return t;
}

}  // namespace wlab
