#include "equid/cli.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "equid/charsum.hpp"
#include "equid/delange.hpp"
#include "equid/errors.hpp"
#include "equid/experiments.hpp"
#include "equid/sieve.hpp"
#include "equid/vcount.hpp"

namespace equid {

// ---------------------------------------------------------------------------
// Manifest

namespace {

const std::set<std::string> kSwitches = {"dry-run", "force-slow"};
const std::set<std::string> kOutputFlags = {"out", "full-table"};

}  // namespace

json ExperimentManifest::to_json() const {
  json j;
  j["command"] = command;
  j["system"] = system;
  j["parameters"] = parameters;
  j["seed"] = seed;
  j["outputs"] = outputs;
  return j;
}

ExperimentManifest ExperimentManifest::from_json(const json& j) {
  if (!j.is_object() || !j.contains("command")) throw PreconditionError("manifest: missing \"command\"");
  ExperimentManifest m;
  try {
    m.command = j.at("command").get<std::vector<std::string>>();
    m.system = j.value("system", std::string());
    if (j.contains("parameters")) m.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
    m.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("outputs")) m.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
  } catch (const json::exception& e) {
    throw PreconditionError(std::string("manifest: ") + e.what());
  }
  if (m.command.empty()) throw PreconditionError("manifest: empty command");
  return m;
}

std::vector<std::string> ExperimentManifest::to_args() const {
  std::vector<std::string> args = command;
  if (!system.empty()) {
    args.push_back("--system");
    args.push_back(system);
  }
  for (const auto& [name, value] : parameters) {
    args.push_back("--" + name);
    if (!kSwitches.contains(name)) args.push_back(value);
  }
  args.push_back("--seed");
  args.push_back(std::to_string(seed));
  for (const auto& [name, path] : outputs) {
    args.push_back("--" + name);
    args.push_back(path);
  }
  return args;
}

// ---------------------------------------------------------------------------

namespace {

struct Options {
  std::string system;
  std::string q, qs, x, N, w, r, M, a, b, R, C, K;
  std::string mod, sweep, restrict_ = "none";
  std::string out, full_table, manifest_out;
  std::string budget;
  unsigned threads = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 1000;
  bool dry_run = false;
  bool force_slow = false;
  std::string experiment;
  std::string manifest_file;
};

u64 parse_u64(const std::string& text, const std::string& what) {
  if (text.empty()) throw PreconditionError("missing --" + what);
  try {
    std::size_t used = 0;
    if (text.find_first_of("eE.") != std::string::npos) {
      const double v = std::stod(text, &used);
      if (used != text.size() || !(v >= 0) || v != std::floor(v) || v >= 0x1p64)
        throw PreconditionError("--" + what + ": expected a nonnegative integer, got '" + text + "'");
      return static_cast<u64>(v);
    }
    if (text[0] == '-') throw PreconditionError("--" + what + ": expected a nonnegative integer, got '" + text + "'");
    const u64 v = std::stoull(text, &used);
    if (used != text.size()) throw PreconditionError("--" + what + ": trailing characters in '" + text + "'");
    return v;
  } catch (const std::logic_error& e) {
    if (dynamic_cast<const PreconditionError*>(&e)) throw;
    throw PreconditionError("--" + what + ": cannot parse '" + text + "'");
  }
}

std::vector<std::string> split_list(const std::string& text) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : text) {
    if (c == ',') {
      parts.push_back(cur);
      cur.clear();
    } else if (c != ' ') {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<u64> parse_u64_list(const std::string& text, const std::string& what) {
  std::vector<u64> out;
  for (const auto& p : split_list(text)) out.push_back(parse_u64(p, what));
  return out;
}

std::vector<BigInt> parse_int_list(const std::string& text, const std::string& what) {
  std::vector<BigInt> out;
  for (const auto& p : split_list(text)) {
    const std::size_t start = (!p.empty() && p[0] == '-') ? 1 : 0;
    if (p.size() == start || p.find_first_not_of("0123456789", start) != std::string::npos)
      throw PreconditionError("--" + what + ": bad integer '" + p + "'");
    out.emplace_back(p);
  }
  return out;
}

std::optional<u64> budget_of(const Options& o) {
  if (const char* env = std::getenv("EQUID_BUDGET"); env && *env) return parse_u64(env, "budget (EQUID_BUDGET)");
  if (!o.budget.empty()) return parse_u64(o.budget, "budget");
  return std::nullopt;
}

unsigned threads_of(const Options& o) {
  if (o.threads > 0) return o.threads;
  return std::max(1u, std::thread::hardware_concurrency());
}

SystemSpec load_spec(const Options& o) {
  if (o.system.empty()) throw PreconditionError("missing --system");
  return load_system_file(o.system);
}

std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join_tuple(std::span<const u64> t) {
  std::string s;
  for (std::size_t i = 0; i < t.size(); ++i) s += (i ? ";" : "") + std::to_string(t[i]);
  return s;
}

json tuple_json(std::span<const u64> t) { return json(std::vector<u64>(t.begin(), t.end())); }

// Writes via a callback either to --out or to the given stream.
template <typename F>
void emit(const std::string& path, std::ostream& fallback, F&& write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream f(path);
  if (!f) throw PreconditionError("cannot open output file " + path);
  write(f);
}

void print_json(std::ostream& out, const json& j) { out << j.dump(2) << "\n"; }

json dry_run_report(const std::string& command) {
  return json{{"dry_run", true}, {"command", command}, {"valid", true}};
}

json witness_json(const Witness& w) {
  json j{{"kind", to_string(w.kind)}, {"reason", w.reason}};
  if (w.prime) j["prime"] = w.prime;
  if (!w.combination.empty()) j["combination"] = w.combination;
  return j;
}

// ---------------------------------------------------------------------------
// Subcommands

int cmd_check(const Options& o, std::ostream& out) {
  const auto spec = load_spec(o);
  const FactoredModulus q(parse_u64(o.q, "q"));
  JointOptions jo;
  jo.force_slow = o.force_slow;
  if (auto b = budget_of(o)) jo.work_bound = *b;
  if (o.dry_run) {
    print_json(out, dry_run_report("check"));
    return kExitOk;
  }
  const auto v = is_jointly_equidistributed(spec.functions, q, jo);
  json j{{"system", spec.name}, {"q", q.value()}, {"equidistributed", v.equidistributed}, {"path", v.path}};
  if (v.witness) j["witness"] = witness_json(*v.witness);
  emit(o.out, out, [&](std::ostream& s) { print_json(s, j); });
  return kExitOk;
}

int cmd_snf(const Options& o, std::ostream& out) {
  const auto spec = load_spec(o);
  const auto sys = spec.system();
  if (o.dry_run) {
    print_json(out, dry_run_report("snf"));
    return kExitOk;
  }
  json j = system_to_json(sys);
  j["name"] = spec.name;
  j["A0"] = matrix_to_json(sys.A0());
  j["S"] = matrix_to_json(sys.smith().S);
  j["P"] = matrix_to_json(sys.smith().P);
  j["R"] = matrix_to_json(sys.smith().R);
  j["derivatives_independent"] = sys.derivatives_independent();
  emit(o.out, out, [&](std::ostream& s) { print_json(s, j); });
  return kExitOk;
}

void write_sum_rows(std::ostream& s, std::span<const SumCheckRow> rows) {
  s << "modulus,tuple,abs_Z,bound,ratio\n";
  for (const auto& r : rows)
    s << r.modulus << "," << join_tuple(r.tuple) << "," << fmt_double(r.abs_Z) << "," << fmt_double(r.bound) << ","
      << fmt_double(r.ratio) << "\n";
}

int cmd_charsum(const Options& o, std::ostream& out) {
  const auto spec = load_spec(o);
  const auto polys = spec.polys();
  const std::size_t M = polys.size();
  const FactoredModulus m(parse_u64(o.mod, "mod"));
  const std::string sweep = o.sweep.empty() ? "none" : o.sweep;
  if (sweep != "none" && sweep != "weil" && sweep != "cz" && sweep != "valuation")
    throw PreconditionError("--sweep: expected weil, cz or valuation, got '" + sweep + "'");
  if ((sweep == "weil" || sweep == "valuation") && !is_prime(m.value()))
    throw PreconditionError("--sweep " + sweep + " needs a prime --mod");
  if (sweep == "cz" && !m.is_prime_power()) throw PreconditionError("--sweep cz needs a prime-power --mod");
  std::vector<u64> r;
  if (sweep == "none") {
    r = parse_u64_list(o.r.empty() ? o.w : o.r, "r");
    if (r.size() != M) throw PreconditionError("--r: expected " + std::to_string(M) + " entries");
  }
  if (o.dry_run) {
    print_json(out, dry_run_report("charsum"));
    return kExitOk;
  }

  if (sweep == "none") {
    const auto z = expsum(polys, r, m);
    json j{{"modulus", m.value()},      {"tuple", tuple_json(r)},   {"re", z.value.real()},
           {"im", z.value.imag()},      {"abs", std::abs(z.value)}, {"abs_error_bound", z.abs_error_bound}};
    emit(o.out, out, [&](std::ostream& s) { print_json(s, j); });
    return kExitOk;
  }

  if (sweep == "weil") {
    const auto rep = verify_weil(polys, m.value(), true);
    emit(o.out, out, [&](std::ostream& s) { write_sum_rows(s, rep.rows); });
    json j{{"sweep", "weil"},         {"ell", rep.ell},
           {"checked", rep.checked},  {"max_ratio", rep.max_ratio},
           {"argmax", rep.argmax},    {"skipped", rep.skipped.size()},
           {"violations", rep.violations.size()}};
    if (!o.out.empty()) print_json(out, j);
    if (!rep.violations.empty()) throw InvariantViolation("Weil bound exceeded for " + std::to_string(rep.violations.size()) + " tuples");
    return kExitOk;
  }

  const u64 ell = m.factors()[0].prime;
  if (sweep == "cz") {
    const unsigned e = m.factors()[0].exponent;
    std::vector<SumCheckRow> rows;
    std::size_t skipped = 0, violations = 0;
    double max_ratio = 0.0;
    const u64 total = ipow(ell, static_cast<unsigned>(M));
    std::vector<u64> t(M);
    for (u64 code = 1; code < total; ++code) {
      u64 c = code;
      for (std::size_t i = 0; i < M; ++i) {
        t[i] = c % ell;
        c /= ell;
      }
      std::vector<BigInt> k(t.begin(), t.end());
      const IntPoly F = linear_combination(polys, k);
      if (F.is_constant_mod(ell)) {
        ++skipped;
        continue;
      }
      const auto rep = verify_cz(F, ell, e);
      if (!rep.applicable) {
        ++skipped;
        continue;
      }
      rows.push_back({m.value(), t, rep.abs_Z, rep.bound, rep.ratio});
      max_ratio = std::max(max_ratio, rep.ratio);
      if (!rep.holds) ++violations;
    }
    emit(o.out, out, [&](std::ostream& s) { write_sum_rows(s, rows); });
    json j{{"sweep", "cz"},        {"modulus", m.value()}, {"checked", rows.size()},
           {"skipped", skipped},   {"max_ratio", max_ratio}, {"violations", violations}};
    if (!o.out.empty()) print_json(out, j);
    if (violations) throw InvariantViolation("prime-power bound exceeded for " + std::to_string(violations) + " tuples");
    return kExitOk;
  }

  // valuation: sampled integer tuples with ell not dividing their gcd
  const auto sys = PolySystem::build(polys);
  std::mt19937_64 rng(o.seed);
  std::uniform_int_distribution<long long> dist(-1'000'000, 1'000'000);
  std::size_t violations = 0;
  std::ostringstream rows;
  rows << "modulus,tuple,t,bound,holds\n";
  for (std::size_t s = 0; s < o.samples;) {
    std::vector<BigInt> k(M);
    bool unit = false;
    for (auto& ki : k) {
      ki = dist(rng);
      if (reduce(ki, ell) != 0) unit = true;
    }
    if (!unit) continue;
    ++s;
    const auto v = invariant_factor_valuation(sys, ell, k);
    if (!v.holds) ++violations;
    std::string tuple;
    for (std::size_t i = 0; i < M; ++i) tuple += (i ? ";" : "") + k[i].str();
    rows << ell << "," << tuple << "," << v.t.to_string() << "," << v.bound.to_string() << ","
         << (v.holds ? "true" : "false") << "\n";
  }
  emit(o.out, out, [&](std::ostream& s) { s << rows.str(); });
  json j{{"sweep", "valuation"}, {"ell", ell}, {"samples", o.samples}, {"seed", o.seed}, {"violations", violations}};
  if (!o.out.empty()) print_json(out, j);
  if (violations) throw InvariantViolation("valuation bound exceeded for " + std::to_string(violations) + " tuples");
  return kExitOk;
}

int cmd_vcount(const Options& o, std::ostream& out) {
  const auto spec = load_spec(o);
  const auto polys = spec.polys();
  const FactoredModulus q(parse_u64(o.q, "q"));
  const u64 N = parse_u64(o.N, "N");
  if (N == 0 || N > 1000) throw PreconditionError("--N must lie in [1, 1000]");
  std::vector<u64> w = o.w.empty() ? std::vector<u64>(polys.size(), 0) : parse_u64_list(o.w, "w");
  if (w.size() != polys.size()) throw PreconditionError("--w: expected " + std::to_string(polys.size()) + " entries");
  const u64 budget = budget_of(o).value_or(kDefaultCountBudget);
  const bool prop32 = !o.C.empty() || !o.R.empty();
  u64 C = 0, R = 0;
  if (prop32) {
    C = parse_u64(o.C, "C");
    R = parse_u64(o.R, "R");
  }
  if (o.dry_run) {
    print_json(out, dry_run_report("vcount"));
    return kExitOk;
  }
  const unsigned n = static_cast<unsigned>(N);
  json j{{"q", q.value()}, {"N", N}, {"w", w}, {"count", count_exact(polys, n, q, w, budget)}};
  if (prop32) {
    const auto rep = validate_prop32(spec.system(), n, q, w, C, static_cast<unsigned>(R), budget);
    j["prop32"] = json{{"C", rep.C},
                       {"R", rep.R},
                       {"Q0", rep.Q0},
                       {"count_Q0", rep.count_Q0},
                       {"lhs", rep.lhs},
                       {"main_term", rep.main_term},
                       {"deviation", rep.deviation},
                       {"inv_C_pow_N", rep.inv_C_pow_N},
                       {"tail_envelope", rep.tail_envelope},
                       {"envelope", rep.envelope()}};
  }
  if (!o.full_table.empty()) {
    const auto dist = distribution(polys, n, q, budget);
    emit(o.full_table, out, [&](std::ostream& s) { write_distribution_csv(dist, s); });
  }
  emit(o.out, out, [&](std::ostream& s) { print_json(s, j); });
  return kExitOk;
}

json discrepancy_json(const JointCountTable& t) {
  json j{{"x", t.x},
         {"q", t.q},
         {"M", t.M},
         {"restriction", t.restriction.to_string()},
         {"total", t.total_restricted}};
  if (t.total_restricted > 0) {
    const auto d = discrepancy(t);
    j["max_rel_dev"] = d.max_rel_dev;
    j["argmax"] = d.argmax;
  } else {
    j["max_rel_dev"] = nullptr;
  }
  return j;
}

int cmd_count(const Options& o, std::ostream& out) {
  const auto spec = load_spec(o);
  const u64 q = parse_u64(o.q, "q");
  const u64 x = parse_u64(o.x, "x");
  if (q < 2) throw PreconditionError("--q must be >= 2");
  const auto restriction = parse_restriction(o.restrict_, static_cast<double>(x));
  const u64 budget = budget_of(o).value_or(kDefaultSieveBudget);
  if (x > budget) throw BudgetExceeded("--x exceeds the budget " + std::to_string(budget));
  if (o.dry_run) {
    print_json(out, dry_run_report("count"));
    return kExitOk;
  }
  const auto sieve = build_sieve(x, budget);
  const auto table = joint_counts(spec.functions, q, sieve, x, restriction, threads_of(o));
  emit(o.out, out, [&](std::ostream& s) { write_counts_csv(table, s); });
  if (!o.out.empty()) print_json(out, discrepancy_json(table));
  return kExitOk;
}

// "3-20", "3,5,7" or a mix such as "3-6,11".
std::vector<u64> parse_q_list(const std::string& text) {
  std::vector<u64> qs;
  for (const auto& part : split_list(text)) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      qs.push_back(parse_u64(part, "qs"));
      continue;
    }
    const u64 lo = parse_u64(part.substr(0, dash), "qs"), hi = parse_u64(part.substr(dash + 1), "qs");
    if (lo > hi) throw PreconditionError("--qs: empty range '" + part + "'");
    for (u64 q = lo; q <= hi; ++q) qs.push_back(q);
  }
  for (u64 q : qs)
    if (q < 2) throw PreconditionError("--qs: every modulus must be >= 2");
  return qs;
}

int cmd_discrepancy(const Options& o, std::ostream& out) {
  const auto spec = load_spec(o);
  const auto qs = parse_q_list(o.qs);
  const u64 x = parse_u64(o.x, "x");
  const auto restriction = parse_restriction(o.restrict_, static_cast<double>(x));
  const u64 budget = budget_of(o).value_or(kDefaultSieveBudget);
  if (x > budget) throw BudgetExceeded("--x exceeds the budget " + std::to_string(budget));
  if (o.dry_run) {
    print_json(out, dry_run_report("discrepancy"));
    return kExitOk;
  }
  const auto sieve = build_sieve(x, budget);
  std::vector<DiscrepancyReport> reports;
  for (u64 q : qs) reports.push_back(discrepancy(joint_counts(spec.functions, q, sieve, x, restriction, threads_of(o))));
  emit(o.out, out, [&](std::ostream& s) { write_discrepancy_csv(reports, s); });
  return kExitOk;
}

int cmd_experiment(const Options& o, std::ostream& out) {
  const std::string& name = o.experiment;
  static const std::set<std::string> known = {"thm1.2", "thm1.3", "cex4.1", "cex6.1", "thm1.4"};
  if (!known.contains(name)) throw PreconditionError("unknown experiment '" + name + "'");
  const u64 q = parse_u64(o.q, "q");
  const u64 x = parse_u64(o.x, "x");
  if (q < 2) throw PreconditionError("--q must be >= 2");
  const double K = o.K.empty() ? kDefaultLogPowerK : std::stod(o.K);
  const u64 budget = budget_of(o).value_or(kDefaultSieveBudget);
  if (x > budget) throw BudgetExceeded("--x exceeds the budget " + std::to_string(budget));

  std::optional<SystemSpec> spec;
  if (name != "cex6.1") spec = load_spec(o);
  if (o.dry_run) {
    print_json(out, dry_run_report("experiment " + name));
    return kExitOk;
  }
  const auto sieve = build_sieve(x, budget);
  json j{{"experiment", name}, {"q", q}, {"x", x}};
  JointCountTable table;

  if (name == "thm1.2" || name == "thm1.3") {
    auto rep = name == "thm1.2" ? run_thm_1_2(spec->functions, q, x, sieve) : run_thm_1_3(spec->functions, q, x, sieve);
    j["k"] = rep.k;
    j["in_Q"] = rep.in_Q ? json(*rep.in_Q) : json(nullptr);
    j["total_unrestricted"] = rep.unrestricted.total_restricted;
    j["total_restricted"] = rep.restricted.total_restricted;
    j["dev_unrestricted"] = rep.dev_unrestricted;
    j["dev_restricted"] = rep.dev_restricted ? json(*rep.dev_restricted) : json(nullptr);
    j["restricted_not_worse"] = rep.restricted_not_worse();
    table = std::move(rep.restricted);
  } else if (name == "cex4.1") {
    if (spec->functions.size() != 1) throw PreconditionError("cex4.1: the system must hold the single polynomial G");
    const u64 M = o.M.empty() ? 2 : parse_u64(o.M, "M");
    auto rep = run_counterexample_4_1(spec->functions[0].G(), M, q, x, sieve, K);
    j["G"] = rep.G.to_string();
    j["a"] = rep.a.str();
    j["M"] = rep.M;
    j["C0"] = rep.C0.str();
    j["count_zero_class"] = rep.count_zero_class;
    j["expected"] = rep.expected;
    j["ratio"] = rep.ratio;
    j["primes_in_class"] = rep.primes_in_class;
    table = std::move(rep.table);
  } else if (name == "cex6.1") {
    auto rep = run_counterexample_6_1(q, x, sieve, K);
    j["C0"] = rep.C0.str();
    j["count_zero_class"] = rep.count_zero_class;
    j["total_restricted"] = rep.total_restricted;
    j["expected_restricted"] = rep.expected_restricted;
    j["expected_plain"] = rep.expected_plain;
    j["predicted_scale"] = rep.predicted_scale;
    j["ratio_restricted"] = rep.ratio_restricted;
    table = std::move(rep.table);
  } else {
    const auto polys = spec->polys();
    if (polys.size() < 2) throw PreconditionError("thm1.4: the system must hold G_1..G_M with M >= 2");
    const std::vector<IntPoly> Gs(polys.begin(), polys.end() - 1);
    const auto a = parse_int_list(o.a, "a");
    const auto b = o.b.empty() ? std::vector<BigInt>(Gs.size(), BigInt(0)) : parse_int_list(o.b, "b");
    const u64 R = parse_u64(o.R, "R");
    auto rep = run_thm_1_4(Gs, a, polys.back(), static_cast<unsigned>(R), q, x, b, sieve, K);
    j["b_M"] = rep.b_M.str();
    j["class"] = rep.b;
    j["computable_constant"] = rep.computable_constant.str();
    j["R_exceeds_constant"] = rep.R_exceeds_constant;
    j["count"] = rep.count;
    j["total_restricted"] = rep.total_restricted;
    j["expected_plain"] = rep.expected_plain;
    j["predicted_scale"] = rep.predicted_scale;
    j["ratio_plain"] = rep.ratio_plain;
    table = std::move(rep.table);
  }
  if (!o.out.empty()) emit(o.out, out, [&](std::ostream& s) { write_counts_csv(table, s); });
  print_json(out, j);
  return kExitOk;
}

int run_manifest(const Options& o, std::ostream& out, std::ostream& err) {
  std::ifstream in(o.manifest_file);
  if (!in) throw PreconditionError("cannot open manifest " + o.manifest_file);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw PreconditionError(std::string("manifest: ") + e.what());
  }
  const auto m = ExperimentManifest::from_json(j);
  if (m.command.front() == "manifest") throw PreconditionError("manifest: refusing to replay a manifest command");
  auto args = m.to_args();
  if (o.dry_run && !m.parameters.contains("dry-run")) args.push_back("--dry-run");
  return dispatch(args, out, err);
}

void add_common(CLI::App* sub, Options& o) {
  sub->add_option("--budget", o.budget, "work budget (env EQUID_BUDGET overrides)");
  sub->add_option("--threads", o.threads, "worker threads (default: available parallelism)");
  sub->add_option("--seed", o.seed, "seed for sampled checks");
  sub->add_flag("--dry-run", o.dry_run, "validate inputs without computing");
  sub->add_option("--manifest-out", o.manifest_out, "record this invocation as a manifest");
}

ExperimentManifest record(const CLI::App* sub, const Options& o) {
  ExperimentManifest m;
  m.command.push_back(sub->get_name());
  if (sub->get_name() == "experiment") m.command.push_back(o.experiment);
  m.system = o.system;
  m.seed = o.seed;
  for (const CLI::Option* opt : sub->get_options()) {
    if (opt->count() == 0 || opt->get_lnames().empty()) continue;
    const std::string name = opt->get_lnames().front();
    if (name == "system" || name == "manifest-out" || name == "seed" || name == "help") continue;
    if (kOutputFlags.contains(name)) {
      m.outputs[name] = opt->as<std::string>();
    } else if (kSwitches.contains(name)) {
      m.parameters[name] = "";
    } else {
      m.parameters[name] = opt->as<std::string>();
    }
  }
  return m;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"equid: joint equidistribution of polynomially-defined additive functions", "equid"};
  app.require_subcommand(1);
  Options o;

  auto* check = app.add_subcommand("check", "decide joint equidistribution mod q");
  check->add_option("--system", o.system, "system file")->required();
  check->add_option("--q", o.q, "modulus")->required();
  check->add_flag("--force-slow", o.force_slow, "always use the exhaustive path");
  check->add_option("--out", o.out, "JSON output file");

  auto* snf = app.add_subcommand("snf", "coefficient matrix, Smith form and C0");
  snf->add_option("--system", o.system, "system file")->required();
  snf->add_option("--out", o.out, "JSON output file");

  auto* charsum = app.add_subcommand("charsum", "exponential sums and their bounds");
  charsum->add_option("--system", o.system, "system file")->required();
  charsum->add_option("--mod", o.mod, "modulus")->required();
  charsum->add_option("--sweep", o.sweep, "weil | cz | valuation (omit for a single sum)");
  charsum->add_option("--r", o.r, "tuple r_1,...,r_M for a single sum");
  charsum->add_option("--samples", o.samples, "sample count for --sweep valuation");
  charsum->add_option("--out", o.out, "CSV/JSON output file");

  auto* vcount = app.add_subcommand("vcount", "exact #V_{N,M}(q; w)");
  vcount->add_option("--system", o.system, "system file")->required();
  vcount->add_option("--N", o.N, "number of prime variables")->required();
  vcount->add_option("--q", o.q, "modulus")->required();
  vcount->add_option("--w", o.w, "target w_1,...,w_M (default zeros)");
  vcount->add_option("--C", o.C, "surrogate C for the reduction check");
  vcount->add_option("--R", o.R, "surrogate R for the reduction check");
  vcount->add_option("--full-table", o.full_table, "write the whole distribution as CSV");
  vcount->add_option("--out", o.out, "JSON output file");

  auto* count = app.add_subcommand("count", "residue class counts of (g_1(n)..g_M(n)) for n <= x");
  count->add_option("--system", o.system, "system file")->required();
  count->add_option("--q", o.q, "modulus")->required();
  count->add_option("--x", o.x, "upper bound (accepts 1e7)")->required();
  count->add_option("--restrict", o.restrict_, "none | pk:K | convenient");
  count->add_option("--out", o.out, "CSV output file");

  auto* disc = app.add_subcommand("discrepancy", "max relative deviation for a list of moduli");
  disc->add_option("--system", o.system, "system file")->required();
  disc->add_option("--qs", o.qs, "moduli, e.g. 3-20 or 3,5,7")->required();
  disc->add_option("--x", o.x, "upper bound (accepts 1e7)")->required();
  disc->add_option("--restrict", o.restrict_, "none | pk:K | convenient");
  disc->add_option("--out", o.out, "CSV output file");

  auto* experiment = app.add_subcommand("experiment", "experiment drivers");
  experiment->add_option("name", o.experiment, "thm1.2 | thm1.3 | cex4.1 | cex6.1 | thm1.4")->required();
  experiment->add_option("--system", o.system, "system file");
  experiment->add_option("--q", o.q, "modulus")->required();
  experiment->add_option("--x", o.x, "upper bound (accepts 1e7)")->required();
  experiment->add_option("--M", o.M, "cex4.1: number of powers of G");
  experiment->add_option("--a", o.a, "thm1.4: a_1,...,a_{M-1}");
  experiment->add_option("--b", o.b, "thm1.4: b_1,...,b_{M-1}");
  experiment->add_option("--R", o.R, "thm1.4: restriction P_R(n) > q");
  experiment->add_option("--K", o.K, "admissible range q <= (log x)^K");
  experiment->add_option("--out", o.out, "CSV output file for the count table");

  auto* manifest = app.add_subcommand("manifest", "replay a recorded manifest");
  manifest->add_option("file", o.manifest_file, "manifest JSON")->required();

  for (auto* sub : {check, snf, charsum, vcount, count, disc, experiment}) add_common(sub, o);
  manifest->add_flag("--dry-run", o.dry_run, "validate without computing");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    const auto subs = app.get_subcommands();
    err << (subs.empty() ? app.help() : subs.front()->help());
    return kExitUsage;
  }

  try {
    CLI::App* sub = app.get_subcommands().front();
    if (sub == manifest) return run_manifest(o, out, err);
    if (!o.manifest_out.empty()) {
      std::ofstream mf(o.manifest_out);
      if (!mf) throw PreconditionError("cannot open manifest file " + o.manifest_out);
      mf << record(sub, o).to_json().dump(2) << "\n";
    }
    if (sub == check) return cmd_check(o, out);
    if (sub == snf) return cmd_snf(o, out);
    if (sub == charsum) return cmd_charsum(o, out);
    if (sub == vcount) return cmd_vcount(o, out);
    if (sub == count) return cmd_count(o, out);
    if (sub == disc) return cmd_discrepancy(o, out);
    return cmd_experiment(o, out);
  } catch (const PreconditionError& e) {
    err << "precondition: " << e.what() << "\n";
    return kExitPrecondition;
  } catch (const BudgetExceeded& e) {
    err << "budget: " << e.what() << "\n";
    return kExitBudget;
  } catch (const PrecisionLoss& e) {
    err << "undecided: " << e.what() << "\n";
    return kExitBudget;
  } catch (const InvariantViolation& e) {
    err << "invariant violation: " << e.what() << "\n";
    return kExitInvariant;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitPrecondition;
  }
}

int dispatch(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return dispatch(args, std::cout, std::cerr);
}

}  // namespace equid
