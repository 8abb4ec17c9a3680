#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "equid/delange.hpp"
#include "equid/polysystem.hpp"

namespace equid {

using json = nlohmann::json;

// Decimal strings, lowest degree first. Plain JSON integers are accepted on input.
json poly_to_json(const IntPoly& p);
IntPoly poly_from_json(const json& j);

json system_to_json(const PolySystem& system);
json matrix_to_json(const IntMatrix& m);

/// A named family of additive functions, as read from a system file:
///   {"name": ..., "functions": [{"poly": [...], "rule": "strong", ...}]}
/// or the bare form {"polys": [[...], ...]} with the STRONG rule.
struct SystemSpec {
  std::string name;
  std::vector<AdditiveFunction> functions;

  std::vector<IntPoly> polys() const;
  PolySystem system() const { return PolySystem::build(polys()); }
};

SystemSpec parse_system(const json& j);
json system_spec_to_json(const SystemSpec& spec);
SystemSpec load_system_file(const std::string& path);

}  // namespace equid
