#include "equid/json_io.hpp"

#include <fstream>

#include "equid/errors.hpp"

namespace equid {

json poly_to_json(const IntPoly& p) {
  json out = json::array();
  for (const auto& c : p.coeffs()) out.push_back(c.str());
  return out;
}

IntPoly poly_from_json(const json& j) {
  if (!j.is_array()) throw PreconditionError("polynomial must be a JSON array of coefficients");
  std::vector<BigInt> coeffs;
  for (const auto& c : j) {
    if (c.is_number_integer()) {
      coeffs.emplace_back(c.get<long long>());
    } else if (c.is_string()) {
      const auto s = c.get<std::string>();
      const std::size_t start = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
      if (s.size() == start || s.find_first_not_of("0123456789", start) != std::string::npos)
        throw PreconditionError("bad coefficient '" + s + "'");
      coeffs.emplace_back(s[0] == '+' ? s.substr(1) : s);
    } else {
      throw PreconditionError("coefficient must be an integer or a decimal string");
    }
  }
  return IntPoly(std::move(coeffs));
}

json matrix_to_json(const IntMatrix& m) {
  json out = json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j).str());
    out.push_back(row);
  }
  return out;
}

json system_to_json(const PolySystem& system) {
  json out;
  out["polys"] = json::array();
  for (const auto& p : system.polys()) out["polys"].push_back(poly_to_json(p));
  out["D"] = system.D();
  out["Dmin"] = system.Dmin();
  out["invariant_factors"] = json::array();
  for (const auto& b : system.invariant_factors()) out["invariant_factors"].push_back(b.str());
  out["C0"] = system.C0() ? json(system.C0()->str()) : json(nullptr);
  return out;
}

std::vector<IntPoly> SystemSpec::polys() const {
  std::vector<IntPoly> out;
  for (const auto& g : functions) out.push_back(g.G());
  return out;
}

namespace {

AdditiveFunction parse_function(const json& f) {
  if (!f.is_object() || !f.contains("poly")) throw PreconditionError("function entry needs a \"poly\" field");
  IntPoly G = poly_from_json(f.at("poly"));
  const std::string rule_name = f.value("rule", std::string("strong"));
  const PrimePowerRule rule = parse_rule(rule_name);
  if (rule != PrimePowerRule::Table) return AdditiveFunction::with_rule(std::move(G), rule);
  if (!f.contains("table")) throw PreconditionError("table rule needs a \"table\" field");
  std::vector<BigInt> values;
  for (const auto& v : f.at("table")) {
    json wrapped = json::array({v});
    values.push_back(poly_from_json(wrapped).coeff(0));
  }
  std::optional<int> parity;
  if (f.contains("eventual_parity") && !f.at("eventual_parity").is_null()) parity = f.at("eventual_parity").get<int>();
  const PrimePowerRule fallback = parse_rule(f.value("fallback", std::string("strong")));
  return AdditiveFunction::table(std::move(G), std::move(values), parity, fallback);
}

}  // namespace

SystemSpec parse_system(const json& j) {
  if (!j.is_object()) throw PreconditionError("system file must hold a JSON object");
  SystemSpec spec;
  spec.name = j.value("name", std::string());
  if (j.contains("functions")) {
    for (const auto& f : j.at("functions")) spec.functions.push_back(parse_function(f));
  } else if (j.contains("polys")) {
    for (const auto& p : j.at("polys")) spec.functions.push_back(AdditiveFunction::strong(poly_from_json(p)));
  } else {
    throw PreconditionError("system file needs \"functions\" or \"polys\"");
  }
  if (spec.functions.empty()) throw PreconditionError("system file defines no functions");
  return spec;
}

json system_spec_to_json(const SystemSpec& spec) {
  json out;
  out["name"] = spec.name;
  out["functions"] = json::array();
  for (const auto& g : spec.functions) {
    json f;
    f["poly"] = poly_to_json(g.G());
    f["rule"] = to_string(g.rule());
    if (g.rule() == PrimePowerRule::Table) {
      f["table"] = json::array();
      for (const auto& v : g.two_power_table()) f["table"].push_back(v.str());
      f["eventual_parity"] = g.eventual_parity() ? json(*g.eventual_parity()) : json(nullptr);
      f["fallback"] = to_string(g.fallback());
    }
    out["functions"].push_back(f);
  }
  return out;
}

SystemSpec load_system_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open system file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw PreconditionError("system file " + path + ": " + e.what());
  }
  return parse_system(j);
}

}  // namespace equid
