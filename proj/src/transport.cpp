#include "wlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace wlab {

namespace {

std::vector<double> cost_matrix(const GroundSpace& space,
                                const std::vector<Point>& src,
                                const std::vector<Point>& tgt, double p) {
  std::vector<double> c(src.size() * tgt.size());
  for (std::size_t i = 0; i < src.size(); ++i)
    for (std::size_t j = 0; j < tgt.size(); ++j)
      c[i * tgt.size() + j] = pow_cost(space.distance(src[i], tgt[j]), p);
  return c;
}

double table_cost(const std::vector<double>& mass, const std::vector<double>& cost) {
  long double acc = 0.0L;
  for (std::size_t k = 0; k < mass.size(); ++k)
    if (mass[k] != 0.0) acc += static_cast<long double>(mass[k]) * cost[k];
  return static_cast<double>(acc);
}

// Transportation simplex on the dense bipartite graph. Basis kept as a
// spanning tree over m row nodes and n column nodes; Bland's rule for both
// the entering cell (lowest index with negative reduced cost) and the
// leaving tie-break, so pivots are deterministic and never cycle.
class TransportationSimplex {
 public:
  TransportationSimplex(std::vector<double> supply, std::vector<double> demand,
                        const std::vector<double>& cost)
      : m_(supply.size()),
        n_(demand.size()),
        cost_(cost),
        mass_(m_ * n_, 0.0),
        in_basis_(m_ * n_, false) {
    northwest_corner(supply, demand);
    double cmax = 1.0;
    for (double c : cost_) cmax = std::max(cmax, std::abs(c));
    enter_tol_ = 1e-12 * cmax;
  }

  std::vector<double> run() {
    const std::size_t pivot_cap = 1000 + 64 * m_ * n_;
    for (std::size_t it = 0; it <= pivot_cap; ++it) {
      compute_duals();
      const auto entering = find_entering();
      if (!entering) {
        for (double& x : mass_)
          if (x < 0.0) x = 0.0;  // clamp pivot roundoff, never below -1e-13
        return mass_;
      }
      pivot(*entering);
    }
    throw std::runtime_error("transportation simplex exceeded its pivot cap");
  }

 private:
  std::size_t cell(std::size_t i, std::size_t j) const { return i * n_ + j; }

  void northwest_corner(std::vector<double> a, std::vector<double> b) {
    std::size_t i = 0, j = 0;
    while (true) {
      const std::size_t c = cell(i, j);
      const double x = std::min(a[i], b[j]);
      mass_[c] = x;
      in_basis_[c] = true;
      basis_.push_back(c);
      a[i] -= x;
      b[j] -= x;
      if (i + 1 == m_ && j + 1 == n_) break;
      // On ties advance the row only, leaving a degenerate zero cell next.
      if (a[i] <= b[j] && i + 1 < m_)
        ++i;
      else
        ++j;
    }
    if (basis_.size() != m_ + n_ - 1)
      throw std::logic_error("north-west corner produced a non-tree basis");
  }

  // Nodes: rows 0..m-1, columns m..m+n-1. Duals via tree traversal from row 0.
  void compute_duals() {
    u_.assign(m_, 0.0);
    v_.assign(n_, 0.0);
    adj_.assign(m_ + n_, {});
    for (std::size_t c : basis_) {
      const std::size_t i = c / n_, j = c % n_;
      adj_[i].push_back(c);
      adj_[m_ + j].push_back(c);
    }
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    u_[0] = 0.0;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      for (std::size_t c : adj_[node]) {
        const std::size_t i = c / n_, j = c % n_;
        const std::size_t other = node < m_ ? m_ + j : i;
        if (seen[other]) continue;
        seen[other] = 1;
        if (node < m_)
          v_[j] = cost_[c] - u_[i];
        else
          u_[i] = cost_[c] - v_[j];
        stack.push_back(other);
      }
    }
    for (char s : seen)
      if (!s) throw std::logic_error("basis tree is not spanning");
  }

  std::optional<std::size_t> find_entering() const {
    for (std::size_t c = 0; c < cost_.size(); ++c) {
      if (in_basis_[c]) continue;
      const double rc = cost_[c] - u_[c / n_] - v_[c % n_];
      if (rc < -enter_tol_) return c;
    }
    return std::nullopt;
  }

  // The unique tree path from the entering cell's row node to its column
  // node; cells along it alternate sign starting at -.
  std::vector<std::size_t> cycle_path(std::size_t entering) const {
    const std::size_t start = entering / n_;
    const std::size_t goal = m_ + entering % n_;
    std::vector<std::size_t> parent_edge(m_ + n_, SIZE_MAX);
    std::vector<std::size_t> parent_node(m_ + n_, SIZE_MAX);
    std::vector<char> seen(m_ + n_, 0);
    std::vector<std::size_t> stack{start};
    seen[start] = 1;
    while (!stack.empty()) {
      const std::size_t node = stack.back();
      stack.pop_back();
      if (node == goal) break;
      for (std::size_t c : adj_[node]) {
        const std::size_t i = c / n_, j = c % n_;
        const std::size_t other = node < m_ ? m_ + j : i;
        if (seen[other]) continue;
        seen[other] = 1;
        parent_edge[other] = c;
        parent_node[other] = node;
        stack.push_back(other);
      }
    }
    std::vector<std::size_t> path;
    for (std::size_t node = goal; node != start; node = parent_node[node]) {
      if (parent_edge[node] == SIZE_MAX)
        throw std::logic_error("entering cell has no basis cycle");
      path.push_back(parent_edge[node]);
    }
    std::reverse(path.begin(), path.end());
    return path;
  }

  void pivot(std::size_t entering) {
    const auto path = cycle_path(entering);
    // Entering cell takes +theta; path cells alternate starting with -.
    double theta = std::numeric_limits<double>::infinity();
    std::size_t leaving = SIZE_MAX;
    for (std::size_t k = 0; k < path.size(); k += 2) {
      const std::size_t c = path[k];
      if (mass_[c] < theta || (mass_[c] == theta && c < leaving)) {
        theta = mass_[c];
        leaving = c;
      }
    }
    if (leaving == SIZE_MAX) throw std::logic_error("unbounded pivot");
    mass_[entering] += theta;
    for (std::size_t k = 0; k < path.size(); ++k)
      mass_[path[k]] += (k % 2 == 0) ? -theta : theta;
    mass_[leaving] = 0.0;
    in_basis_[leaving] = false;
    in_basis_[entering] = true;
    *std::find(basis_.begin(), basis_.end(), leaving) = entering;
  }

  std::size_t m_, n_;
  const std::vector<double>& cost_;
  std::vector<double> mass_;
  std::vector<char> in_basis_;
  std::vector<std::size_t> basis_;
  std::vector<double> u_, v_;
  std::vector<std::vector<std::size_t>> adj_;
  double enter_tol_;
};

void require_common_space(const DiscreteMeasure& mu, const DiscreteMeasure& nu) {
  if (!(mu.space() == nu.space()))
    throw std::invalid_argument("measures live on different ground spaces");
}

std::vector<Point> support_points(const DiscreteMeasure& mu) {
  std::vector<Point> pts;
  pts.reserve(mu.size());
  for (const auto& a : mu.atoms()) pts.push_back(a.point);
  return pts;
}

std::vector<double> weights_of(const DiscreteMeasure& mu) {
  std::vector<double> w;
  w.reserve(mu.size());
  for (const auto& a : mu.atoms()) w.push_back(a.weight);
  return w;
}

}  // namespace

TransportPlan::TransportPlan(GroundSpace space, std::vector<Point> source_points,
                             std::vector<Point> target_points, std::vector<double> mass)
    : space_(std::move(space)),
      source_points_(std::move(source_points)),
      target_points_(std::move(target_points)),
      mass_(std::move(mass)) {
  if (source_points_.empty() || target_points_.empty())
    throw std::invalid_argument("plan needs nonempty supports");
  if (mass_.size() != source_points_.size() * target_points_.size())
    throw std::invalid_argument("mass table has the wrong shape");
  for (const auto& x : source_points_) space_.validate_point(x);
  for (const auto& y : target_points_) space_.validate_point(y);
  double total = 0.0;
  for (double x : mass_) {
    if (!std::isfinite(x) || x < -kMarginalTol)
      throw std::invalid_argument("plan mass entries must be nonnegative");
    total += x;
  }
  if (std::abs(total - 1.0) > 1e-9)
    throw std::invalid_argument("plan total mass must be 1");
}

TransportPlan TransportPlan::diagonal(const DiscreteMeasure& mu) {
  const std::size_t n = mu.size();
  std::vector<double> mass(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) mass[i * n + i] = mu.atoms()[i].weight;
  auto pts = support_points(mu);
  return TransportPlan(mu.space(), pts, pts, std::move(mass));
}

TransportPlan TransportPlan::product(const DiscreteMeasure& mu,
                                     const DiscreteMeasure& nu) {
  require_common_space(mu, nu);
  const std::size_t m = mu.size(), n = nu.size();
  std::vector<double> mass(m * n);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j)
      mass[i * n + j] = mu.atoms()[i].weight * nu.atoms()[j].weight;
  return TransportPlan(mu.space(), support_points(mu), support_points(nu),
                       std::move(mass));
}

std::vector<double> TransportPlan::row_sums() const {
  std::vector<double> r(rows(), 0.0);
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) r[i] += mass(i, j);
  return r;
}

std::vector<double> TransportPlan::col_sums() const {
  std::vector<double> c(cols(), 0.0);
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j) c[j] += mass(i, j);
  return c;
}

DiscreteMeasure TransportPlan::source_marginal() const {
  std::vector<WeightedAtom> atoms;
  const auto r = row_sums();
  for (std::size_t i = 0; i < rows(); ++i)
    if (r[i] > 0.0) atoms.push_back({source_points_[i], r[i]});
  return DiscreteMeasure(space_, std::move(atoms));
}

DiscreteMeasure TransportPlan::target_marginal() const {
  std::vector<WeightedAtom> atoms;
  const auto c = col_sums();
  for (std::size_t j = 0; j < cols(); ++j)
    if (c[j] > 0.0) atoms.push_back({target_points_[j], c[j]});
  return DiscreteMeasure(space_, std::move(atoms));
}

std::vector<std::pair<std::size_t, std::size_t>> TransportPlan::support(
    double tol) const {
  std::vector<std::pair<std::size_t, std::size_t>> cells;
  for (std::size_t i = 0; i < rows(); ++i)
    for (std::size_t j = 0; j < cols(); ++j)
      if (mass(i, j) > tol) cells.emplace_back(i, j);
  return cells;
}

double distance_from_cost(double cost, double p) {
  if (!(p > 0.0)) throw std::invalid_argument("exponent p must be positive");
  if (cost < 0.0) cost = 0.0;  // solver roundoff
  return p >= 1.0 ? std::pow(cost, 1.0 / p) : cost;
}

double plan_cost(const TransportPlan& plan, double p) {
  const auto c = cost_matrix(plan.space(), plan.source_points(), plan.target_points(), p);
  return table_cost(plan.mass_table(), c);
}

OTResult solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu, double p) {
  require_common_space(mu, nu);
  if (!(p > 0.0)) throw std::invalid_argument("exponent p must be positive");
  auto src = support_points(mu);
  auto tgt = support_points(nu);
  const auto cost = cost_matrix(mu.space(), src, tgt, p);
  TransportationSimplex simplex(weights_of(mu), weights_of(nu), cost);
  auto mass = simplex.run();
  const double c = table_cost(mass, cost);
  TransportPlan plan(mu.space(), std::move(src), std::move(tgt), std::move(mass));
  return OTResult{c, distance_from_cost(c, p), p, std::move(plan)};
}

double wasserstein_distance(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                            double p) {
  return solve(mu, nu, p).distance;
}

namespace {

// Enumerates spanning-tree supports of the m x n transportation polytope and
// solves the flows on each by leaf elimination.
class VertexEnumerator {
 public:
  VertexEnumerator(std::vector<double> supply, std::vector<double> demand,
                   const std::vector<double>& cost)
      : m_(supply.size()), n_(demand.size()), a_(std::move(supply)),
        b_(std::move(demand)), cost_(cost) {}

  // Calls visit(mass, cost) for every feasible vertex.
  template <typename Visit>
  void enumerate(Visit&& visit) {
    const std::size_t cells = m_ * n_;
    const std::size_t edges = m_ + n_ - 1;
    std::vector<std::size_t> comb(edges);
    std::iota(comb.begin(), comb.end(), 0);
    while (true) {
      try_tree(comb, visit);
      // next combination in lexicographic order
      std::size_t k = edges;
      while (k > 0 && comb[k - 1] == cells - edges + (k - 1)) --k;
      if (k == 0) break;
      ++comb[k - 1];
      for (std::size_t t = k; t < edges; ++t) comb[t] = comb[t - 1] + 1;
    }
  }

 private:
  template <typename Visit>
  void try_tree(const std::vector<std::size_t>& comb, Visit&& visit) {
    const std::size_t nodes = m_ + n_;
    std::vector<int> degree(nodes, 0);
    for (std::size_t c : comb) {
      ++degree[c / n_];
      ++degree[m_ + c % n_];
    }
    for (std::size_t v = 0; v < nodes; ++v)
      if (degree[v] == 0) return;  // not spanning

    // Leaf elimination both solves the flows and certifies the tree:
    // a connected graph on m+n nodes with m+n-1 edges is a tree iff
    // repeated leaf removal consumes every edge.
    std::vector<double> balance(nodes);
    for (std::size_t i = 0; i < m_; ++i) balance[i] = a_[i];
    for (std::size_t j = 0; j < n_; ++j) balance[m_ + j] = -b_[j];

    std::vector<std::vector<std::size_t>> adj(nodes);
    for (std::size_t c : comb) {
      adj[c / n_].push_back(c);
      adj[m_ + c % n_].push_back(c);
    }
    std::vector<char> edge_done(comb.size(), 0);
    std::vector<std::size_t> edge_index(m_ * n_, 0);
    for (std::size_t e = 0; e < comb.size(); ++e) edge_index[comb[e]] = e;

    std::vector<std::size_t> leaves;
    for (std::size_t v = 0; v < nodes; ++v)
      if (degree[v] == 1) leaves.push_back(v);

    std::vector<double> x(m_ * n_, 0.0);
    std::size_t removed = 0;
    while (!leaves.empty()) {
      const std::size_t v = leaves.back();
      leaves.pop_back();
      if (degree[v] != 1) continue;
      std::size_t c = SIZE_MAX;
      for (std::size_t e : adj[v])
        if (!edge_done[edge_index[e]]) {
          c = e;
          break;
        }
      if (c == SIZE_MAX) continue;
      const std::size_t i = c / n_, j = c % n_;
      const std::size_t other = (v < m_) ? m_ + j : i;
      const double flow = (v < m_) ? balance[v] : -balance[v];
      if (flow < -1e-12) return;  // infeasible support
      x[c] = std::max(flow, 0.0);
      balance[other] += balance[v];
      balance[v] = 0.0;
      edge_done[edge_index[c]] = 1;
      ++removed;
      --degree[v];
      if (--degree[other] == 1) leaves.push_back(other);
    }
    if (removed != comb.size()) return;  // cycle: not a tree

    visit(x, table_cost(x, cost_));
  }

  std::size_t m_, n_;
  std::vector<double> a_, b_;
  const std::vector<double>& cost_;
};

constexpr std::size_t kBruteForceCellLimit = 16;

}  // namespace

OTResult brute_force_solve(const DiscreteMeasure& mu, const DiscreteMeasure& nu,
                           double p) {
  require_common_space(mu, nu);
  if (!(p > 0.0)) throw std::invalid_argument("exponent p must be positive");
  if (mu.size() * nu.size() > kBruteForceCellLimit)
    throw std::invalid_argument("brute-force oracle limited to 16 cells");
  auto src = support_points(mu);
  auto tgt = support_points(nu);
  const auto cost = cost_matrix(mu.space(), src, tgt, p);
  VertexEnumerator en(weights_of(mu), weights_of(nu), cost);
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> best_mass;
  en.enumerate([&](const std::vector<double>& mass, double c) {
    if (c < best) {
      best = c;
      best_mass = mass;
    }
  });
  if (best_mass.empty()) throw std::logic_error("no feasible vertex found");
  TransportPlan plan(mu.space(), std::move(src), std::move(tgt), std::move(best_mass));
  return OTResult{best, distance_from_cost(best, p), p, std::move(plan)};
}

std::vector<TransportPlan> brute_force_optimal_vertices(const DiscreteMeasure& mu,
                                                        const DiscreteMeasure& nu,
                                                        double p, double tol) {
  require_common_space(mu, nu);
  if (mu.size() * nu.size() > kBruteForceCellLimit)
    throw std::invalid_argument("brute-force oracle limited to 16 cells");
  auto src = support_points(mu);
  auto tgt = support_points(nu);
  const auto cost = cost_matrix(mu.space(), src, tgt, p);

  std::vector<std::pair<std::vector<double>, double>> vertices;
  double best = std::numeric_limits<double>::infinity();
  VertexEnumerator en(weights_of(mu), weights_of(nu), cost);
  en.enumerate([&](const std::vector<double>& mass, double c) {
    best = std::min(best, c);
    vertices.emplace_back(mass, c);
  });

  std::vector<TransportPlan> optimal;
  for (auto& [mass, c] : vertices) {
    if (c > best + tol) continue;
    bool duplicate = false;
    for (const auto& kept : optimal) {
      double dev = 0.0;
      for (std::size_t k = 0; k < mass.size(); ++k)
        dev = std::max(dev, std::abs(mass[k] - kept.mass_table()[k]));
      if (dev <= 1e-12) {
        duplicate = true;
        break;
      }
    }
    if (!duplicate) optimal.emplace_back(mu.space(), src, tgt, mass);
  }
  return optimal;
}

TransportPlan glue(const TransportPlan& pi12, const TransportPlan& pi23) {
  if (!(pi12.space() == pi23.space()))
    throw std::invalid_argument("plans live on different ground spaces");

  // Match the middle supports point by point.
  const auto mid_w = pi12.col_sums();
  const auto mid_w2 = pi23.row_sums();
  const auto& mid_pts = pi12.target_points();
  const auto& mid_pts2 = pi23.source_points();
  std::vector<std::size_t> match(mid_pts.size(), SIZE_MAX);
  for (std::size_t j = 0; j < mid_pts.size(); ++j) {
    for (std::size_t l = 0; l < mid_pts2.size(); ++l)
      if (mid_pts[j] == mid_pts2[l]) {
        match[j] = l;
        break;
      }
    if (match[j] == SIZE_MAX) {
      if (mid_w[j] > kMarginalTol)
        throw std::invalid_argument("gluing: middle marginals have different supports");
      continue;
    }
    if (std::abs(mid_w[j] - mid_w2[match[j]]) > kMarginalTol)
      throw std::invalid_argument("gluing: middle marginals disagree");
  }
  for (std::size_t l = 0; l < mid_pts2.size(); ++l) {
    bool matched = false;
    for (std::size_t j = 0; j < mid_pts.size(); ++j) matched |= (match[j] == l);
    if (!matched && mid_w2[l] > kMarginalTol)
      throw std::invalid_argument("gluing: middle marginals have different supports");
  }

  const std::size_t m = pi12.rows(), n = pi23.cols();
  std::vector<double> mass(m * n, 0.0);
  for (std::size_t j = 0; j < mid_pts.size(); ++j) {
    if (match[j] == SIZE_MAX || mid_w[j] <= 0.0) continue;
    const std::size_t l = match[j];
    for (std::size_t i = 0; i < m; ++i) {
      const double mij = pi12.mass(i, j);
      if (mij == 0.0) continue;
      for (std::size_t k = 0; k < n; ++k) {
        const double mjk = pi23.mass(l, k);
        if (mjk == 0.0) continue;
        mass[i * n + k] += mij * (mjk / mid_w2[l]);
      }
    }
  }
  return TransportPlan(pi12.space(), pi12.source_points(), pi23.target_points(),
                       std::move(mass));
}

CMonotonicityReport check_c_monotone(const TransportPlan& plan, double p, double tol) {
  CMonotonicityReport report;
  const auto cells = plan.support();
  const auto& src = plan.source_points();
  const auto& tgt = plan.target_points();
  const auto& space = plan.space();
  auto c = [&](std::size_t i, std::size_t j) {
    return pow_cost(space.distance(src[i], tgt[j]), p);
  };
  for (std::size_t a = 0; a < cells.size(); ++a)
    for (std::size_t b = a + 1; b < cells.size(); ++b) {
      const auto [i1, j1] = cells[a];
      const auto [i2, j2] = cells[b];
      const double gap = c(i1, j1) + c(i2, j2) - c(i1, j2) - c(i2, j1);
      if (gap > tol) {
        report.monotone = false;
        report.worst_gap = std::max(report.worst_gap, gap);
        report.violations.push_back({i1, j1, i2, j2, gap});
      }
    }
  return report;
}

DiagonalMassReport diagonal_mass_check(const DiscreteMeasure& mu,
                                       const DiscreteMeasure& nu,
                                       const TransportPlan& plan, double tol) {
  if (!mu.space().strict_triangle())
    throw std::invalid_argument(
        "diagonal mass check needs a strict-triangle ground space");
  require_common_space(mu, nu);

  DiagonalMassReport report;
  report.ok = true;

  const auto& src = plan.source_points();
  const auto& tgt = plan.target_points();

  // Diagonal entries of the plan must equal the atom-wise minimum.
  for (std::size_t i = 0; i < src.size(); ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < tgt.size(); ++j)
      if (src[i] == tgt[j]) diag += plan.mass(i, j);
    const double expected = std::min(mu.mass_at(src[i]), nu.mass_at(src[i]));
    const double dev = std::abs(diag - expected);
    if (dev > report.max_diagonal_deviation) {
      report.max_diagonal_deviation = dev;
      if (dev > tol) report.offending_atom = src[i];
    }
  }

  // Off-diagonal marginals must be the residuals (mu-nu)_+ and (mu-nu)_-.
  const auto dec = lattice_decompose(mu, nu);
  auto residual_lookup = [](const std::vector<WeightedAtom>& part, const Point& x) {
    for (const auto& a : part)
      if (a.point == x) return a.weight;
    return 0.0;
  };
  for (std::size_t i = 0; i < src.size(); ++i) {
    double off = 0.0;
    for (std::size_t j = 0; j < tgt.size(); ++j)
      if (!(src[i] == tgt[j])) off += plan.mass(i, j);
    const double dev = std::abs(off - residual_lookup(dec.plus, src[i]));
    if (dev > report.max_residual_deviation) {
      report.max_residual_deviation = dev;
      if (dev > tol && !report.offending_atom) report.offending_atom = src[i];
    }
  }
  for (std::size_t j = 0; j < tgt.size(); ++j) {
    double off = 0.0;
    for (std::size_t i = 0; i < src.size(); ++i)
      if (!(src[i] == tgt[j])) off += plan.mass(i, j);
    const double dev = std::abs(off - residual_lookup(dec.minus, tgt[j]));
    if (dev > report.max_residual_deviation) {
      report.max_residual_deviation = dev;
      if (dev > tol && !report.offending_atom) report.offending_atom = tgt[j];
    }
  }

  report.ok = report.max_diagonal_deviation <= tol &&
              report.max_residual_deviation <= tol;
  return report;
}

}  // namespace wlab
