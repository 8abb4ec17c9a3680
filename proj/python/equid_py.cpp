#include <sstream>

#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "equid/charsum.hpp"
#include "equid/cli.hpp"
#include "equid/delange.hpp"
#include "equid/errors.hpp"
#include "equid/polysystem.hpp"
#include "equid/sieve.hpp"
#include "equid/vcount.hpp"

namespace py = pybind11;
using namespace equid;

namespace {

BigInt to_big(const py::handle& h) { return BigInt(py::str(h).cast<std::string>()); }

py::int_ from_big(const BigInt& v) { return py::int_(py::module_::import("builtins").attr("int")(v.str())); }

// A polynomial is a list of integer coefficients, lowest degree first.
IntPoly to_poly(const py::handle& h) {
  std::vector<BigInt> c;
  for (auto item : h) c.push_back(to_big(item));
  return IntPoly(std::move(c));
}

std::vector<IntPoly> to_polys(const py::sequence& s) {
  std::vector<IntPoly> out;
  for (auto item : s) out.push_back(to_poly(item));
  return out;
}

py::list from_poly(const IntPoly& p) {
  py::list l;
  for (const auto& c : p.coeffs()) l.append(from_big(c));
  return l;
}

std::vector<AdditiveFunction> to_functions(const py::sequence& polys, const std::optional<std::vector<std::string>>& rules) {
  const auto ps = to_polys(polys);
  if (rules && rules->size() != ps.size()) throw PreconditionError("rules: one entry per polynomial");
  std::vector<AdditiveFunction> gs;
  for (std::size_t i = 0; i < ps.size(); ++i)
    gs.push_back(AdditiveFunction::with_rule(ps[i], rules ? parse_rule((*rules)[i]) : PrimePowerRule::Strong));
  return gs;
}

py::dict verdict_dict(const EquidVerdict& v) {
  py::dict d;
  d["equidistributed"] = v.equidistributed;
  d["path"] = v.path;
  if (v.witness) {
    py::dict w;
    w["kind"] = to_string(v.witness->kind);
    w["prime"] = v.witness->prime;
    w["combination"] = v.witness->combination;
    w["reason"] = v.witness->reason;
    d["witness"] = w;
  } else {
    d["witness"] = py::none();
  }
  return d;
}

}  // namespace

PYBIND11_MODULE(_equid, m) {
  m.doc() = "Equidistribution of polynomially-defined additive functions";

  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<BudgetExceeded>(m, "BudgetExceeded", PyExc_RuntimeError);
  py::register_exception<PrecisionLoss>(m, "PrecisionLoss", PyExc_ArithmeticError);
  py::register_exception<InvariantViolation>(m, "InvariantViolation", PyExc_AssertionError);

  m.def(
      "factor",
      [](u64 q) {
        const auto fq = factor(q);
        std::vector<std::pair<u64, unsigned>> out;
        for (const auto& f : fq.factors()) out.emplace_back(f.prime, f.exponent);
        return out;
      },
      py::arg("q"), "Prime factorization of q as (p, e) pairs");

  m.def(
      "poly_eval_mod", [](const py::sequence& p, u64 v, u64 mod) { return poly_eval_mod(to_poly(p), v, mod); },
      py::arg("poly"), py::arg("v"), py::arg("m"));

  m.def(
      "system_info",
      [](const py::sequence& polys) {
        const auto sys = PolySystem::build(to_polys(polys));
        py::dict d;
        d["M"] = sys.M();
        d["D"] = sys.D();
        d["Dmin"] = sys.Dmin();
        py::list betas;
        for (const auto& b : sys.invariant_factors()) betas.append(from_big(b));
        d["invariant_factors"] = betas;
        d["derivatives_independent"] = sys.derivatives_independent();
        d["C0"] = sys.C0() ? py::object(from_big(*sys.C0())) : py::object(py::none());
        py::list derivs;
        for (const auto& p : sys.derivatives()) derivs.append(from_poly(p));
        d["derivatives"] = derivs;
        return d;
      },
      py::arg("polys"), "Coefficient-matrix data of a polynomial system");

  m.def(
      "is_jointly_equidistributed",
      [](const py::sequence& polys, u64 q, std::optional<std::vector<std::string>> rules, bool force_slow,
         u64 work_bound) {
        const auto gs = to_functions(polys, rules);
        return verdict_dict(is_jointly_equidistributed(gs, factor(q), {force_slow, work_bound}));
      },
      py::arg("polys"), py::arg("q"), py::arg("rules") = py::none(), py::arg("force_slow") = false,
      py::arg("work_bound") = JointOptions{}.work_bound);

  m.def(
      "count_exact",
      [](const py::sequence& polys, unsigned N, u64 q, std::vector<u64> w) {
        return count_exact(to_polys(polys), N, factor(q), w);
      },
      py::arg("polys"), py::arg("N"), py::arg("q"), py::arg("w"));

  m.def(
      "count_by_orthogonality",
      [](const py::sequence& polys, unsigned N, u64 q, std::vector<u64> w) {
        return count_V_by_orthogonality(to_polys(polys), N, factor(q), w);
      },
      py::arg("polys"), py::arg("N"), py::arg("q"), py::arg("w"));

  m.def(
      "distribution",
      [](const py::sequence& polys, unsigned N, u64 q) { return distribution(to_polys(polys), N, factor(q)).counts; },
      py::arg("polys"), py::arg("N"), py::arg("q"), "Counts indexed by w_1 + q w_2 + ...");

  m.def(
      "expsum",
      [](const py::sequence& polys, std::vector<u64> r, u64 mod) {
        return expsum(to_polys(polys), r, factor(mod)).value;
      },
      py::arg("polys"), py::arg("r"), py::arg("m"));

  m.def(
      "verify_weil",
      [](const py::sequence& polys, u64 ell) {
        const auto rep = verify_weil(to_polys(polys), ell);
        py::dict d;
        d["checked"] = rep.checked;
        d["max_ratio"] = rep.max_ratio;
        d["argmax"] = rep.argmax;
        d["violations"] = rep.violations.size();
        return d;
      },
      py::arg("polys"), py::arg("ell"));

  m.def(
      "joint_counts",
      [](const py::sequence& polys, u64 q, u64 x, const std::string& restriction,
         std::optional<std::vector<std::string>> rules) {
        const auto gs = to_functions(polys, rules);
        const auto sieve = build_sieve(x);
        const auto t = joint_counts(gs, q, sieve, x, parse_restriction(restriction, static_cast<double>(x)));
        py::dict d;
        d["counts"] = t.counts;
        d["total"] = t.total_restricted;
        d["max_rel_dev"] = t.total_restricted ? py::object(py::float_(discrepancy(t).max_rel_dev))
                                              : py::object(py::none());
        return d;
      },
      py::arg("polys"), py::arg("q"), py::arg("x"), py::arg("restriction") = "none", py::arg("rules") = py::none());

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        const int code = dispatch(args, out, err);
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Run the command-line tool in-process; returns (exit_code, stdout, stderr)");
}
