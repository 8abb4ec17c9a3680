#include "equid/corpus.hpp"

#include "equid/errors.hpp"

namespace equid {

namespace {

SystemSpec strong_spec(std::string name, std::vector<IntPoly> polys) {
  SystemSpec s{std::move(name), {}};
  for (auto& p : polys) s.functions.push_back(AdditiveFunction::strong(std::move(p)));
  return s;
}

}  // namespace

std::vector<SystemSpec> corpus() {
  const IntPoly T{0, 1};
  const IntPoly Tm1{-1, 1};
  std::vector<SystemSpec> out;
  out.push_back({"A", {AdditiveFunction::complete(T)}});
  out.push_back(strong_spec("T", {T}));
  out.push_back(strong_spec("T-1", {Tm1}));
  out.push_back(strong_spec("T,T^3", {T, T.pow(3)}));
  out.push_back(strong_spec("T,T^2", {T, T.pow(2)}));
  out.push_back(strong_spec("T-1,(T-1)^2", {Tm1, Tm1.pow(2)}));
  out.push_back(strong_spec("T,2T+1", {T, IntPoly{1, 2}}));
  return out;
}

SystemSpec corpus_entry(const std::string& name) {
  for (auto& s : corpus())
    if (s.name == name) return s;
  throw PreconditionError("no corpus system named '" + name + "'");
}

}  // namespace equid
