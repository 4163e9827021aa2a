#include "wlab/json_io.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

namespace wlab {

using nlohmann::json;

json space_to_json(const GroundSpace& space) {
  json j;
  switch (space.kind()) {
    case SpaceKind::euclidean:
      j["kind"] = "euclidean";
      j["dim"] = space.dim();
      break;
    case SpaceKind::powered_euclidean:
      j["kind"] = "powered_euclidean";
      j["dim"] = space.dim();
      j["q"] = space.exponent();
      break;
    case SpaceKind::table:
      j["kind"] = "table";
      j["dim"] = 1;
      j["table"] = space.table();
      if (space.ultrametric()) j["ultrametric"] = true;
      break;
  }
  return j;
}

GroundSpace space_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "euclidean") return GroundSpace::euclidean(j.at("dim").get<std::size_t>());
  if (kind == "powered_euclidean")
    return GroundSpace::powered_euclidean(j.at("dim").get<std::size_t>(),
                                          j.at("q").get<double>());
  if (kind == "table")
    return GroundSpace::distance_table(
        j.at("table").get<std::vector<std::vector<double>>>(),
        j.value("ultrametric", false));
  throw std::invalid_argument("unknown space kind: " + kind);
}

json measure_to_json(const DiscreteMeasure& mu) {
  json atoms = json::array();
  for (const auto& a : mu.atoms())
    atoms.push_back({{"point", a.point.coords}, {"weight", a.weight}});
  return {{"space", space_to_json(mu.space())}, {"atoms", atoms}};
}

DiscreteMeasure measure_from_json(const json& j) {
  GroundSpace space = space_from_json(j.at("space"));
  std::vector<WeightedAtom> atoms;
  double total = 0.0;
  for (const auto& a : j.at("atoms")) {
    WeightedAtom atom{Point(a.at("point").get<std::vector<double>>()),
                      a.at("weight").get<double>()};
    total += atom.weight;
    atoms.push_back(std::move(atom));
  }
  if (std::abs(total - 1.0) > kIngestWeightTol)
    throw std::invalid_argument("measure weights must sum to 1 within 1e-9");
  return DiscreteMeasure(std::move(space), std::move(atoms));
}

DiscreteMeasure load_measure(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  json j;
  in >> j;
  return measure_from_json(j);
}

void save_measure(const DiscreteMeasure& mu, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  out << measure_to_json(mu).dump(2) << "\n";
}

json plan_to_json(const TransportPlan& plan) {
  std::vector<std::vector<double>> mass(plan.rows(), std::vector<double>(plan.cols()));
  for (std::size_t i = 0; i < plan.rows(); ++i)
    for (std::size_t j = 0; j < plan.cols(); ++j) mass[i][j] = plan.mass(i, j);
  return {{"source", measure_to_json(plan.source_marginal())},
          {"target", measure_to_json(plan.target_marginal())},
          {"mass", mass}};
}

TransportPlan plan_from_json(const json& j) {
  const DiscreteMeasure source = measure_from_json(j.at("source"));
  const DiscreteMeasure target = measure_from_json(j.at("target"));
  const auto mass = j.at("mass").get<std::vector<std::vector<double>>>();
  if (mass.size() != source.size())
    throw std::invalid_argument("mass row count does not match the source support");
  std::vector<double> flat;
  for (const auto& row : mass) {
    if (row.size() != target.size())
      throw std::invalid_argument("mass column count does not match the target support");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  std::vector<Point> src, tgt;
  for (const auto& a : source.atoms()) src.push_back(a.point);
  for (const auto& a : target.atoms()) tgt.push_back(a.point);
  return TransportPlan(source.space(), std::move(src), std::move(tgt), std::move(flat));
}

json decomposition_to_json(const GroundSpace& space, const SignedDecomposition& dec) {
  auto part = [](const std::vector<WeightedAtom>& atoms) {
    json arr = json::array();
    for (const auto& a : atoms)
      arr.push_back({{"point", a.point.coords}, {"weight", a.weight}});
    return arr;
  };
  return {{"space", space_to_json(space)},
          {"meet", part(dec.meet)},
          {"plus", part(dec.plus)},
          {"minus", part(dec.minus)},
          {"shared_mass", dec.shared_mass()},
          {"moved_mass", dec.moved_mass()}};
}

json isometry_report_to_json(const IsometryTrialReport& report) {
  json violations = json::array();
  for (const auto& v : report.violations)
    violations.push_back({{"trial", v.trial},
                          {"before", v.before},
                          {"after", v.after},
                          {"deviation", v.deviation}});
  return {{"variant", report.variant},
          {"p", report.p},
          {"trials", report.trials},
          {"max_deviation", report.max_deviation},
          {"violations", violations}};
}

}  // namespace wlab
