// Command-line front end: exact transport distances and plans, geodesic
// sampling, quantile flips, isometry application, atom-mass probes, bisector
// masses, lattice decompositions, and the verification suites.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wlab/analysis.hpp"
#include "wlab/geometry.hpp"
#include "wlab/harness.hpp"
#include "wlab/isometries.hpp"
#include "wlab/json_io.hpp"
#include "wlab/onedim.hpp"
#include "wlab/transport.hpp"

namespace {

std::string fmt12(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", x);
  return buf;
}

std::vector<double> parse_components(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) values.push_back(std::stod(item));
  return values;
}

wlab::IsometryMap parse_isometry(const std::string& spec, const wlab::GroundSpace& space) {
  const auto colon = spec.find(':');
  const std::string head = spec.substr(0, colon);
  const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
  const std::size_t d = space.dim();

  if (head == "flip") return wlab::IsometryMap::quantile_flip(space);
  if (head == "translate")
    return wlab::IsometryMap::translation(space, wlab::Point(parse_components(args)));

  const auto entries = parse_components(args);
  if (entries.size() != d * d)
    throw std::invalid_argument("matrix spec needs " + std::to_string(d * d) +
                                " row-major entries");
  wlab::Matrix m(d, std::vector<double>(d));
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < d; ++j) m[i][j] = entries[i * d + j];
  if (head == "orthogonal")
    return wlab::IsometryMap::pushforward(space, std::move(m), wlab::Point::zero(d));
  if (head == "rotation") return wlab::IsometryMap::rotation(space, std::move(m));
  throw std::invalid_argument("unknown isometry spec: " + head);
}

std::uint64_t effective_seed(std::uint64_t cli_seed) {
  if (const char* env = std::getenv("WLAB_SEED")) return std::stoull(env);
  return cli_seed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"toolkit for p-Wasserstein spaces over finitely supported measures"};
  app.require_subcommand(1);

  std::string path_a, path_b, iso_spec, at_text, x_text, json_path, suite = "all";
  double p = 2.0;
  double za = 1.0, zb = -1.0;
  int samples = 10;
  int budget = 0;
  std::uint64_t seed = 0;
  bool show_plan = false;

  auto* dist = app.add_subcommand("dist", "Wasserstein distance between two measures");
  dist->add_option("mu", path_a)->required();
  dist->add_option("nu", path_b)->required();
  dist->add_option("--p", p, "exponent p > 0");
  dist->add_flag("--plan", show_plan, "also print an optimal plan as JSON");

  auto* geo = app.add_subcommand("geodesic", "sample the displacement geodesic");
  geo->add_option("mu", path_a)->required();
  geo->add_option("nu", path_b)->required();
  geo->add_option("--p", p, "exponent p > 1");
  geo->add_option("--samples", samples, "number of segments");

  std::string cdf_format;
  auto* fl = app.add_subcommand("flip", "quantile flip of a measure on [0,1]");
  fl->add_option("mu", path_a)->required();
  fl->add_option("--cdf", cdf_format,
                 "emit the flipped measure's CDF breakpoints/levels (json or csv)");

  auto* ap = app.add_subcommand("apply", "apply an isometry to a measure");
  ap->add_option("mu", path_a)->required();
  ap->add_option("--iso", iso_spec,
                 "translate:v1,..,vd | orthogonal:entries | rotation:entries | flip")
      ->required();

  auto* atoms = app.add_subcommand("atoms", "finite-difference atom-mass estimates");
  atoms->add_option("mu", path_a)->required();
  atoms->add_option("--p", p, "exponent p >= 1, not an even integer");
  atoms->add_option("--at", at_text, "probe point x1,...,xd")->required();
  atoms->add_option("--seed", seed, "probe direction seed");

  auto* bis = app.add_subcommand("bisector", "hyperplane mass via two-point measures");
  bis->add_option("mu", path_a)->required();
  bis->add_option("--x", x_text, "direction x1,...,xd")->required();
  bis->add_option("--a", za)->required();
  bis->add_option("--b", zb)->required();
  bis->add_option("--p", p, "exponent p > 0");

  auto* dec = app.add_subcommand("decompose", "lattice decomposition of two measures");
  dec->add_option("mu", path_a)->required();
  dec->add_option("nu", path_b)->required();

  auto* ver = app.add_subcommand("verify", "run verification suites");
  ver->add_option("suite", suite, "suite name or 'all'");
  ver->add_option("--seed", seed, "RNG seed (env WLAB_SEED overrides)");
  ver->add_option("--budget", budget, "trial budget override (0 = default)");
  ver->add_option("--json", json_path, "write the JSON report here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*dist) {
      const auto mu = wlab::load_measure(path_a);
      const auto nu = wlab::load_measure(path_b);
      const auto result = wlab::solve(mu, nu, p);
      std::cout << fmt12(result.distance) << "\n";
      if (show_plan) std::cout << wlab::plan_to_json(result.plan).dump(2) << "\n";
    } else if (*geo) {
      const auto mu = wlab::load_measure(path_a);
      const auto nu = wlab::load_measure(path_b);
      const auto curve = wlab::GeodesicCurve::between(mu, nu, p);
      for (int i = 0; i <= samples; ++i) {
        const double t = curve.total_length() * i / std::max(samples, 1);
        nlohmann::json line{{"t", t}, {"measure", wlab::measure_to_json(curve.at(t))}};
        std::cout << line.dump() << "\n";
      }
    } else if (*fl) {
      const auto flipped = wlab::flip(wlab::load_measure(path_a));
      if (cdf_format.empty()) {
        std::cout << wlab::measure_to_json(flipped).dump(2) << "\n";
      } else {
        const auto f = wlab::cdf(flipped);
        if (cdf_format == "csv") {
          std::cout << "breakpoint,level\n";
          for (std::size_t i = 0; i < f.pieces(); ++i)
            std::cout << fmt12(f.breaks()[i]) << "," << fmt12(f.levels()[i]) << "\n";
        } else if (cdf_format == "json") {
          nlohmann::json j{{"breakpoints", f.breaks()}, {"levels", f.levels()}};
          std::cout << j.dump(2) << "\n";
        } else {
          throw std::invalid_argument("--cdf expects json or csv");
        }
      }
    } else if (*ap) {
      const auto mu = wlab::load_measure(path_a);
      const auto iso = parse_isometry(iso_spec, mu.space());
      std::cout << wlab::measure_to_json(wlab::apply(iso, mu)).dump(2) << "\n";
    } else if (*atoms) {
      const auto mu = wlab::load_measure(path_a);
      const wlab::Point x(parse_components(at_text));
      const auto probe = wlab::make_probe(mu, p, x, effective_seed(seed));
      const auto seq = wlab::atom_mass_estimate(mu, p, x, probe);
      std::cout << "step,estimate,observed_order\n";
      for (std::size_t i = 0; i < seq.size(); ++i) {
        std::cout << fmt12(seq[i].step) << "," << fmt12(seq[i].estimate) << ",";
        // Rolling order against the final estimate.
        if (i + 1 < seq.size()) {
          const double r0 = std::abs(seq[i].estimate - seq.back().estimate);
          const double r1 = std::abs(seq[i + 1].estimate - seq.back().estimate);
          if (r0 > 0.0 && r1 > 0.0)
            std::cout << fmt12(std::log(r0 / r1) /
                               std::log(seq[i].step / seq[i + 1].step));
        }
        std::cout << "\n";
      }
    } else if (*bis) {
      const auto mu = wlab::load_measure(path_a);
      const wlab::Point x(parse_components(x_text));
      std::cout << fmt12(wlab::hyperplane_mass_via_bisector(mu, x, za, zb, p)) << "\n";
    } else if (*dec) {
      const auto mu = wlab::load_measure(path_a);
      const auto nu = wlab::load_measure(path_b);
      const auto d = wlab::lattice_decompose(mu, nu);
      std::cout << wlab::decomposition_to_json(mu.space(), d).dump(2) << "\n";
    } else if (*ver) {
      const std::uint64_t s = effective_seed(seed);
      wlab::harness::AggregateReport aggregate;
      if (suite == "all") {
        aggregate = wlab::harness::run_all(s);
      } else {
        aggregate.suites.push_back(wlab::harness::run_suite(suite, s, budget));
        aggregate.wall_seconds = aggregate.suites.front().wall_seconds;
      }
      std::cout << wlab::harness::human_table(aggregate);
      if (!json_path.empty()) {
        std::ofstream out(json_path);
        if (!out) throw std::runtime_error("cannot write " + json_path);
        out << aggregate.to_json().dump(2) << "\n";
      }
      return aggregate.all_passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
