#pragma once

// JSON spec ingestion for the CLI and any file-driven harness: measures,
// generators, and slit systems. Parse errors name the offending field.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "diskflow/generator.hpp"
#include "diskflow/herglotz.hpp"
#include "diskflow/multislit.hpp"

namespace diskflow::specio {

using json = nlohmann::ordered_json;

namespace detail {

inline double need_number(const json& j, const char* field,
                          const std::string& context) {
  if (!j.contains(field) || !j[field].is_number())
    throw argument_error("missing or non-numeric field '" + std::string(field) +
                         "' in " + context);
  return j[field].get<double>();
}

inline std::vector<HerglotzMeasure::Atom> parse_atoms(const json& arr,
                                                      const std::string& context) {
  if (!arr.is_array())
    throw argument_error("field '" + context + "' must be an array");
  std::vector<HerglotzMeasure::Atom> atoms;
  for (const auto& a : arr)
    atoms.push_back({need_number(a, "angle", context),
                     need_number(a, "mass", context)});
  return atoms;
}

}  // namespace detail

inline HerglotzMeasure parse_measure(const json& spec) {
  std::vector<HerglotzMeasure::Atom> atoms;
  if (spec.contains("atoms"))
    atoms = detail::parse_atoms(spec["atoms"], "atoms");

  if (!spec.contains("density"))
    return HerglotzMeasure(std::move(atoms), std::monostate{});

  const auto& d = spec["density"];
  if (!d.contains("type") || !d["type"].is_string())
    throw argument_error("missing field 'type' in density");
  const std::string type = d["type"].get<std::string>();
  if (type == "uniform") {
    return HerglotzMeasure(std::move(atoms),
                           HerglotzMeasure::UniformDensity{
                               detail::need_number(d, "level", "density")});
  }
  if (type == "step") {
    if (!d.contains("pieces") || !d["pieces"].is_array())
      throw argument_error("missing field 'pieces' in step density");
    std::vector<HerglotzMeasure::StepPiece> pieces;
    for (const auto& p : d["pieces"])
      pieces.push_back({detail::need_number(p, "from", "step piece"),
                        detail::need_number(p, "to", "step piece"),
                        detail::need_number(p, "slope", "step piece")});
    return HerglotzMeasure(std::move(atoms),
                           HerglotzMeasure::StepDensity{std::move(pieces)});
  }
  if (type == "power_cusp") {
    const double alpha = detail::need_number(d, "exponent", "power_cusp");
    const double center = detail::need_number(d, "center", "power_cusp");
    CuspProfile cusp = CuspProfile::standard(alpha, center);
    if (d.contains("scale")) cusp.scale = detail::need_number(d, "scale", "power_cusp");
    return HerglotzMeasure(std::move(atoms), cusp);
  }
  throw argument_error("unknown density type '" + type + "'");
}

inline Generator parse_generator(const json& spec) {
  if (!spec.contains("tau"))
    throw argument_error("missing field 'tau' in generator spec");
  if (!spec.contains("source") || !spec["source"].is_object())
    throw argument_error("missing field 'source' in generator spec");

  const auto& src = spec["source"];
  PFunction p;
  std::optional<HerglotzMeasure> mu;
  if (src.contains("measure")) {
    mu = parse_measure(src["measure"]);
  } else if (src.contains("atoms_p")) {
    p = std::make_shared<AtomSumP>(detail::parse_atoms(src["atoms_p"], "atoms_p"));
  } else if (src.contains("atoms_reciprocal_p")) {
    p = std::make_shared<ReciprocalP>(std::make_shared<AtomSumP>(
        detail::parse_atoms(src["atoms_reciprocal_p"], "atoms_reciprocal_p")));
  } else {
    throw argument_error(
        "generator source must contain 'measure', 'atoms_p' or "
        "'atoms_reciprocal_p'");
  }

  const auto& tau = spec["tau"];
  const std::string label = spec.value("label", std::string{});
  if (tau.contains("angle")) {
    BoundaryPoint bp(detail::need_number(tau, "angle", "tau"));
    if (mu) return Generator::from_measure(bp, std::move(*mu), label);
    return Generator(bp, std::move(p), label);
  }
  DiskPoint dp(detail::need_number(tau, "re", "tau"),
               detail::need_number(tau, "im", "tau"));
  if (mu) return Generator::from_measure(dp, std::move(*mu), label);
  return Generator(dp, std::move(p), label);
}

struct SlitSpec {
  std::optional<std::vector<double>> tips;
  std::optional<std::vector<HerglotzMeasure::Atom>> pole_atoms;
  bool normalize = false;
};

inline SlitSpec parse_slit(const json& spec) {
  SlitSpec out;
  if (spec.contains("tips")) {
    if (!spec["tips"].is_array())
      throw argument_error("field 'tips' must be an array of angles");
    std::vector<double> tips;
    for (const auto& t : spec["tips"]) {
      if (!t.is_number()) throw argument_error("non-numeric entry in 'tips'");
      tips.push_back(t.get<double>());
    }
    out.tips = std::move(tips);
  }
  if (spec.contains("pole_atoms"))
    out.pole_atoms = detail::parse_atoms(spec["pole_atoms"], "pole_atoms");
  if (!out.tips && !out.pole_atoms)
    throw argument_error("slit spec needs 'tips' or 'pole_atoms'");
  out.normalize = spec.value("normalize", false);
  return out;
}

}  // namespace diskflow::specio
