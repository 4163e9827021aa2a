#include "wlab/analysis.hpp"

#include <quadmath.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "wlab/random.hpp"

namespace wlab {

namespace {

using quad = __float128;

void require_euclidean(const GroundSpace& space, const char* what) {
  if (space.kind() != SpaceKind::euclidean)
    throw std::invalid_argument(std::string(what) + " needs a Euclidean ground space");
}

// r^p from the squared distance, evaluated in quad precision. The centered
// differences below cancel the potentials to O(step^{2k}) against values of
// order one; quad keeps that cancellation above the rounding floor at every
// step the probe schedules use.
quad qpow_from_sq(quad r2, double p) {
  if (r2 <= 0) return 0;
  if (p == 2.0) return r2;
  const double half = p / 2.0;
  if (half == std::floor(half) && half <= 32.0) {
    quad acc = 1;
    quad base = r2;
    auto e = static_cast<unsigned>(half);
    while (e > 0) {
      if (e & 1u) acc *= base;
      base *= base;
      e >>= 1u;
    }
    return acc;
  }
  if (p == std::floor(p) && p <= 64.0) {
    quad acc = sqrtq(r2);  // odd integer exponent
    quad base = r2;
    auto e = static_cast<unsigned>((p - 1.0) / 2.0);
    while (e > 0) {
      if (e & 1u) acc *= base;
      base *= base;
      e >>= 1u;
    }
    return acc;
  }
  return powq(r2, static_cast<quad>(half));
}

quad potential_q(const DiscreteMeasure& mu, double p, const std::vector<quad>& x) {
  quad acc = 0;
  const std::size_t d = x.size();
  for (const auto& a : mu.atoms()) {
    quad r2 = 0;
    for (std::size_t i = 0; i < d; ++i) {
      const quad diff = x[i] - static_cast<quad>(a.point[i]);
      r2 += diff * diff;
    }
    acc += static_cast<quad>(a.weight) * qpow_from_sq(r2, p);
  }
  return acc;
}

std::vector<quad> to_quad(const Point& x) {
  std::vector<quad> q(x.dim());
  for (std::size_t i = 0; i < x.dim(); ++i) q[i] = x[i];
  return q;
}

long long binomial_ll(int n, int r) {
  long long acc = 1;
  for (int i = 0; i < r; ++i) acc = acc * (n - i) / (i + 1);
  return acc;
}

double min_support_gap(const std::vector<Point>& pts) {
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j)
      gap = std::min(gap, norm(pts[i] - pts[j]));
  return gap;
}

}  // namespace

double potential(const DiscreteMeasure& mu, double p, const Point& x) {
  require_euclidean(mu.space(), "potential");
  mu.space().validate_point(x);
  if (!(p > 0.0)) throw std::invalid_argument("exponent p must be positive");
  return static_cast<double>(potential_q(mu, p, to_quad(x)));
}

int recovery_order(double p) {
  if (!(p > 0.0)) throw std::invalid_argument("exponent p must be positive");
  return static_cast<int>(std::ceil(p / 2.0));
}

bool is_even_integer(double p) {
  return p == std::floor(p) && std::fmod(p, 2.0) == 0.0;
}

double denominator_coefficient(double p, int k) {
  if (!(p > 0.0)) throw std::invalid_argument("exponent p must be positive");
  if (k < 1) throw std::invalid_argument("difference order k must be at least 1");
  double acc = 0.0;
  for (int j = 0; j <= 2 * k; ++j) {
    const double term = static_cast<double>(binomial_ll(2 * k, j)) *
                        pow_cost(std::abs(static_cast<double>(k - j)), p);
    acc += (j % 2 == 0) ? term : -term;
  }
  return acc;
}

long long comb_alternating_sum(int k, int m) {
  if (k < 1 || k > 8 || m < 1)
    throw std::invalid_argument("alternating sum needs 1 <= k <= 8 and m >= 1");
  long long acc = 0;
  for (int j = 0; j <= k - 1; ++j) {
    long long power = 1;
    for (int t = 0; t < 2 * m; ++t) power *= (k - j);
    const long long term = binomial_ll(2 * k, j) * power;
    acc += (j % 2 == 0) ? term : -term;
  }
  return acc;
}

CombIdentityReport comb_identity_check(int k, int m) {
  CombIdentityReport report;
  report.covered = (m >= 1 && m < k);
  report.value = comb_alternating_sum(k, m);
  report.zero = (report.value == 0);
  return report;
}

double peak_quotient(const Point& x, const Point& direction, double p, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  const double dn = norm(direction);
  if (dn == 0.0) throw std::invalid_argument("probe direction must be nonzero");
  const int k = recovery_order(p);

  const auto xq = to_quad(x);
  const auto hq = to_quad(direction);
  quad num = 0;
  for (int j = 0; j <= 2 * k; ++j) {
    const quad c = static_cast<quad>(step) * static_cast<quad>(k - j);
    quad r2 = 0;
    for (std::size_t i = 0; i < xq.size(); ++i) {
      const quad v = xq[i] + c * hq[i];
      r2 += v * v;
    }
    const quad term = static_cast<quad>(binomial_ll(2 * k, j)) * qpow_from_sq(r2, p);
    num += (j % 2 == 0) ? term : -term;
  }
  const quad den = static_cast<quad>(denominator_coefficient(p, k)) *
                   qpow_from_sq(static_cast<quad>(step * dn) * static_cast<quad>(step * dn), p);
  return static_cast<double>(num / den);
}

double atom_mass_quotient(const DiscreteMeasure& mu, double p, const Point& x,
                          const Point& direction, double step) {
  require_euclidean(mu.space(), "atom recovery");
  if (!(p > 0.0)) throw std::invalid_argument("exponent p must be positive");
  if (is_even_integer(p))
    throw std::invalid_argument("atom recovery excludes even integer exponents");
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  const double dn = norm(direction);
  if (dn == 0.0) throw std::invalid_argument("probe direction must be nonzero");
  const int k = recovery_order(p);

  const auto xq = to_quad(x);
  const auto hq = to_quad(direction);
  quad num = 0;
  for (int j = 0; j <= 2 * k; ++j) {
    const quad c = static_cast<quad>(step) * static_cast<quad>(k - j);
    std::vector<quad> probe(xq.size());
    for (std::size_t i = 0; i < xq.size(); ++i) probe[i] = xq[i] + c * hq[i];
    const quad term =
        static_cast<quad>(binomial_ll(2 * k, j)) * potential_q(mu, p, probe);
    num += (j % 2 == 0) ? term : -term;
  }
  const quad sq = static_cast<quad>(step * dn) * static_cast<quad>(step * dn);
  const quad den =
      static_cast<quad>(denominator_coefficient(p, k)) * qpow_from_sq(sq, p);
  return static_cast<double>(num / den);
}

FiniteDifferenceProbe make_probe(const DiscreteMeasure& mu, double p, const Point& x,
                                 std::uint64_t rng_seed, int num_steps) {
  require_euclidean(mu.space(), "atom recovery");
  if (is_even_integer(p))
    throw std::invalid_argument("atom recovery excludes even integer exponents");
  if (num_steps < 2) throw std::invalid_argument("probe needs at least two steps");

  FiniteDifferenceProbe probe;
  probe.p = p;
  probe.k = recovery_order(p);
  probe.base = x;

  std::vector<Point> pts;
  for (const auto& a : mu.atoms()) pts.push_back(a.point);
  if (std::none_of(pts.begin(), pts.end(), [&](const Point& y) { return y == x; }))
    pts.push_back(x);
  const double gap = pts.size() > 1 ? min_support_gap(pts) : 1.0;
  if (!(gap > 0.0)) throw std::invalid_argument("degenerate support gap");

  // Direction rejection: never orthogonal to an atom difference (no probe
  // point straddles two atoms symmetrically) and never too close to the line
  // through the base and an atom, which would null the leading term.
  Rng rng(rng_seed);
  const std::size_t d = mu.space().dim();
  Point dir;
  for (int attempt = 0; attempt < 4096; ++attempt) {
    dir = random_unit_vector(rng, d);
    bool ok = true;
    for (std::size_t i = 0; i < pts.size() && ok; ++i)
      for (std::size_t j = i + 1; j < pts.size() && ok; ++j) {
        const Point diff = pts[i] - pts[j];
        const double c = std::abs(dot(dir, diff)) / norm(diff);
        if (c < 1e-6) ok = false;
      }
    for (const auto& a : mu.atoms()) {
      if (a.point == x) continue;
      const Point diff = a.point - x;
      const double c = std::abs(dot(dir, diff)) / norm(diff);
      if (d > 1 && c > 0.9) ok = false;
    }
    if (ok) break;
  }
  probe.direction = dir;

  const double s0 = gap / (5.0 * probe.k);
  double s = s0;
  for (int m = 0; m < num_steps; ++m, s *= 0.5) probe.steps.push_back(s);
  return probe;
}

std::vector<AtomEstimate> atom_mass_estimate(const DiscreteMeasure& mu, double p,
                                             const Point& x,
                                             const FiniteDifferenceProbe& probe) {
  std::vector<AtomEstimate> seq;
  seq.reserve(probe.steps.size());
  for (double s : probe.steps)
    seq.push_back({s, atom_mass_quotient(mu, p, x, probe.direction, s)});
  return seq;
}

std::optional<double> estimate_convergence_order(const std::vector<AtomEstimate>& seq,
                                                 double target, double noise_floor) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& e : seq) {
    const double r = std::abs(e.estimate - target);
    if (r > noise_floor) pts.emplace_back(std::log(e.step), std::log(r));
  }
  if (pts.size() < 2) return std::nullopt;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [lx, ly] : pts) {
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double n = static_cast<double>(pts.size());
  const double denom = n * sxx - sx * sx;
  if (denom == 0.0) return std::nullopt;
  return (n * sxy - sx * sy) / denom;
}

IdentityReport measure_identity_via_potentials(const DiscreteMeasure& mu,
                                               const DiscreteMeasure& nu, double p,
                                               const std::vector<Point>& probe_grid,
                                               double tol) {
  require_euclidean(mu.space(), "measure identification");
  IdentityReport report;

  for (const auto& x : probe_grid) {
    const double gap = std::abs(potential(mu, p, x) - potential(nu, p, x));
    if (gap > report.max_potential_gap) {
      report.max_potential_gap = gap;
      if (gap > tol && !report.separating_point) report.separating_point = x;
    }
  }

  // For non-even exponents the finite-difference limit recovers atom masses,
  // so support points double as probes. Even exponents carry no such
  // information; there the comparison is potentials only, and distinct
  // moment-matched measures are genuinely indistinguishable.
  if (!is_even_integer(p) && p >= 1.0) {
    std::vector<Point> supports;
    for (const auto& a : mu.atoms()) supports.push_back(a.point);
    for (const auto& a : nu.atoms())
      if (std::none_of(supports.begin(), supports.end(),
                       [&](const Point& y) { return y == a.point; }))
        supports.push_back(a.point);
    for (const auto& x : supports) {
      const auto probe = make_probe(mu, p, x, 0x5eedull);
      const double step = probe.steps.back();
      const double est_mu = atom_mass_quotient(mu, p, x, probe.direction, step);
      const double est_nu = atom_mass_quotient(nu, p, x, probe.direction, step);
      const double gap = std::abs(est_mu - est_nu);
      if (gap > report.max_atom_gap) {
        report.max_atom_gap = gap;
        if (gap > 1e-3 && !report.separating_point) report.separating_point = x;
      }
    }
  }

  report.identified_equal =
      report.max_potential_gap <= tol && report.max_atom_gap <= 1e-3;
  return report;
}

double second_directional_functional(const DiscreteMeasure& mu, int p,
                                     const Point& unit_x) {
  require_euclidean(mu.space(), "second directional derivative");
  if (p < 4 || p % 2 != 0)
    throw std::invalid_argument("closed form needs an even exponent p >= 4");
  if (std::abs(norm(unit_x) - 1.0) > 1e-12)
    throw std::invalid_argument("direction must be a unit vector");
  const int k = p / 2;
  double acc = 0.0;
  for (const auto& a : mu.atoms()) {
    const double n2 = squared_norm(a.point);
    if (n2 == 0.0) continue;
    const double inner = dot(unit_x, a.point);
    acc += a.weight * (k * pow_cost(n2, (2 * k - 2) / 2.0) +
                       2.0 * k * (k - 1) * inner * inner *
                           pow_cost(n2, (2 * k - 4) / 2.0));
  }
  return acc;
}

double second_directional_quotient(const DiscreteMeasure& mu, int p,
                                   const Point& unit_x, double step) {
  require_euclidean(mu.space(), "second directional derivative");
  if (p < 4 || p % 2 != 0)
    throw std::invalid_argument("difference quotient needs an even exponent p >= 4");
  if (std::abs(norm(unit_x) - 1.0) > 1e-12)
    throw std::invalid_argument("direction must be a unit vector");
  if (!(step > 0.0)) throw std::invalid_argument("step must be positive");
  // Symmetric second difference at 0: odd terms (including the first
  // derivative) cancel, leaving the functional plus O(step^2).
  std::vector<quad> plus(unit_x.dim()), minus(unit_x.dim()), zero(unit_x.dim(), 0);
  for (std::size_t i = 0; i < unit_x.dim(); ++i) {
    plus[i] = static_cast<quad>(step) * static_cast<quad>(unit_x[i]);
    minus[i] = -plus[i];
  }
  const quad num = potential_q(mu, p, plus) + potential_q(mu, p, minus) -
                   2 * potential_q(mu, p, zero);
  return static_cast<double>(num / (2 * static_cast<quad>(step) * static_cast<quad>(step)));
}

namespace {

struct ZetaSplit {
  std::vector<double> diff;    // ||ax - y||^p - ||bx - y||^p per atom
  std::vector<double> weight;
  double base_cost = 0.0;      // integral of ||bx - y||^p
};

ZetaSplit zeta_split(const DiscreteMeasure& mu, const Point& x, double a, double b,
                     double p) {
  require_euclidean(mu.space(), "bisector recovery");
  if (norm(x) == 0.0) throw std::invalid_argument("zeta direction must be nonzero");
  if (a == b) throw std::invalid_argument("zeta endpoints must differ");
  ZetaSplit s;
  const Point ax = a * x;
  const Point bx = b * x;
  for (const auto& atom : mu.atoms()) {
    const double ca = pow_cost(norm(ax - atom.point), p);
    const double cb = pow_cost(norm(bx - atom.point), p);
    s.diff.push_back(ca - cb);
    s.weight.push_back(atom.weight);
    s.base_cost += atom.weight * cb;
  }
  return s;
}

}  // namespace

double zeta_cost(const DiscreteMeasure& mu, const Point& x, double a, double b,
                 double p, double alpha) {
  if (alpha < 0.0 || alpha > 1.0)
    throw std::invalid_argument("zeta weight must lie in [0,1]");
  ZetaSplit s = zeta_split(mu, x, a, b, p);
  std::vector<std::size_t> order(s.diff.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return s.diff[i] < s.diff[j]; });
  // Continuous-knapsack optimum: fill the alpha budget on the smallest
  // cost differences first.
  double cost = s.base_cost;
  double budget = alpha;
  for (std::size_t i : order) {
    if (budget <= 0.0) break;
    const double take = std::min(budget, s.weight[i]);
    cost += take * s.diff[i];
    budget -= take;
  }
  return cost;
}

double hyperplane_mass_via_bisector(const DiscreteMeasure& mu, const Point& x,
                                    double a, double b, double p) {
  ZetaSplit s = zeta_split(mu, x, a, b, p);
  double scale = 0.0;
  for (double d : s.diff) scale = std::max(scale, std::abs(d));
  const double tol = 1e-12 * (1.0 + scale);
  // The minimizing alpha-interval is [mass(diff < 0), mass(diff <= 0)].
  double on_bisector = 0.0;
  for (std::size_t i = 0; i < s.diff.size(); ++i)
    if (std::abs(s.diff[i]) <= tol) on_bisector += s.weight[i];
  return on_bisector;
}

double bisector_mass_direct(const DiscreteMeasure& mu, const Point& x, double a,
                            double b) {
  require_euclidean(mu.space(), "bisector mass");
  if (norm(x) == 0.0) throw std::invalid_argument("zeta direction must be nonzero");
  if (a == b) throw std::invalid_argument("zeta endpoints must differ");
  // y is equidistant from ax and bx iff <x,y> = (a+b)/2 |x|^2.
  const double rhs = 0.5 * (a + b) * squared_norm(x);
  double mass = 0.0;
  for (const auto& atom : mu.atoms()) {
    const double lhs = dot(x, atom.point);
    if (std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs) + std::abs(rhs)))
      mass += atom.weight;
  }
  return mass;
}

double bisector_mass_grid_scan(const DiscreteMeasure& mu, const Point& x, double a,
                               double b, double p, double grid_step) {
  if (!(grid_step > 0.0 && grid_step < 0.5))
    throw std::invalid_argument("grid step must lie in (0, 0.5)");
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> costs;
  std::vector<double> alphas;
  for (double alpha = 0.0; alpha <= 1.0 + 0.5 * grid_step; alpha += grid_step) {
    const double al = std::min(alpha, 1.0);
    alphas.push_back(al);
    costs.push_back(zeta_cost(mu, x, a, b, p, al));
    best = std::min(best, costs.back());
  }
  const double tol = 1e-9 * (1.0 + std::abs(best));
  double lo = 1.0, hi = 0.0;
  for (std::size_t i = 0; i < costs.size(); ++i)
    if (costs[i] <= best + tol) {
      lo = std::min(lo, alphas[i]);
      hi = std::max(hi, alphas[i]);
    }
  return std::max(0.0, hi - lo);
}

}  // namespace wlab
