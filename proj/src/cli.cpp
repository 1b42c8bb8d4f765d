#include "potts/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "potts/error.hpp"
#include "potts/io.hpp"
#include "potts/random_cluster.hpp"
#include "potts/sampler.hpp"
#include "potts/verifier.hpp"

namespace potts::cli {

namespace {

using io::json;

constexpr double kCouplingTolerance = 1e-10;
constexpr double kTowerTolerance = 1e-10;

class Emitter {
 public:
  Emitter(std::ostream& out, bool csv) : out_(out), csv_(csv) {}

  void line(const json& doc) { out_ << doc.dump() << '\n'; }

  void summary(const json& doc) {
    if (!csv_) {
      line(doc);
      return;
    }
    std::string header;
    std::string row;
    for (const auto& [key, value] : doc.items()) {
      if (!header.empty()) {
        header += ',';
        row += ',';
      }
      header += key;
      row += value.is_string() ? value.get<std::string>() : value.dump();
    }
    out_ << header << '\n' << row << '\n';
  }

 private:
  std::ostream& out_;
  bool csv_;
};

struct CommonOptions {
  std::string model_path;
  std::string f_spec;
  std::string f1_spec;
  std::string r_list;
  std::string s_list;
  double tol = kDefaultVerifyTolerance;
  std::optional<int> max_exponent;
  std::optional<std::uint64_t> cap;
  unsigned jobs = 1;
  bool csv = false;
};

EnumerationLimits limits_from(const CommonOptions& o) {
  EnumerationLimits limits;
  if (const char* env = std::getenv("POTTS_GKS_CAP")) {
    char* end = nullptr;
    const unsigned long long value = std::strtoull(env, &end, 10);
    if (end == env || *end != '\0' || value == 0) {
      throw Error(ErrorCode::BadInput, "POTTS_GKS_CAP must be a positive integer");
    }
    limits.cap = value;
  }
  if (o.cap) limits.cap = *o.cap;
  limits.jobs = std::max(1u, o.jobs);
  return limits;
}

Coordinate parse_coordinate(const PottsModel& model, const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw Error(ErrorCode::BadInput, "coordinate must be edge:N or vertex:NAME");
  const std::string kind = text.substr(0, colon);
  const std::string rest = text.substr(colon + 1);
  if (kind == "edge") {
    std::size_t pos = 0;
    unsigned long index = 0;
    try {
      index = std::stoul(rest, &pos);
    } catch (const std::exception&) {
      pos = 0;
    }
    if (pos == 0 || pos != rest.size() || index >= model.num_edges()) {
      throw Error(ErrorCode::BadInput, "edge coordinate out of range");
    }
    return {Coordinate::Kind::Edge, index};
  }
  if (kind == "vertex") {
    const auto v = model.find_vertex(rest);
    if (!v) throw Error(ErrorCode::BadInput, "unknown vertex '" + rest + "'");
    return {Coordinate::Kind::Vertex, *v};
  }
  throw Error(ErrorCode::BadInput, "coordinate must be edge:N or vertex:NAME");
}

std::string coordinate_name(const PottsModel& model, Coordinate c) {
  if (c.kind == Coordinate::Kind::Edge) return "edge:" + std::to_string(c.index);
  return "vertex:" + model.vertices[c.index];
}

void add_common(CLI::App* cmd, CommonOptions& o, bool needs_function) {
  cmd->add_option("--model", o.model_path, "Model JSON file")->required();
  auto* f = cmd->add_option("--f", o.f_spec, "Function: A, B, familyA, familyB, inline JSON or JSON file");
  if (needs_function) f->required();
  cmd->add_option("--R", o.r_list, "Region R as comma-separated vertex ids");
  cmd->add_option("--S", o.s_list, "Region S as comma-separated vertex ids");
  cmd->add_option("--tol", o.tol, "Verification tolerance");
  cmd->add_option("--M", o.max_exponent, "Moment exponent bound");
  cmd->add_option("--cap", o.cap, "Enumeration cap (overrides POTTS_GKS_CAP)");
  cmd->add_option("--jobs", o.jobs, "Worker threads");
  cmd->add_flag("--csv", o.csv, "Emit the summary as CSV");
}

int finish(Emitter& emit, json summary, std::size_t failures) {
  summary["type"] = "summary";
  summary["failures"] = failures;
  summary["status"] = failures == 0 ? "pass" : "fail";
  emit.summary(summary);
  return failures == 0 ? kExitOk : kExitViolation;
}

int cmd_exact(const CommonOptions& o, bool dump_model, Emitter& emit) {
  const PottsModel model = io::load_model(o.model_path);
  if (dump_model) {
    emit.line(io::model_to_json(model));
    return finish(emit, {{"command", "exact"}}, 0);
  }
  const auto limits = limits_from(o);
  emit.line({{"type", "partition_function"}, {"log_Z", log_partition_function(model, limits)}});
  json summary = {{"command", "exact"}};
  const Region r = io::parse_region(model, o.r_list);
  const Region s = io::parse_region(model, o.s_list);
  if (!o.f_spec.empty()) {
    const SpinFunction f = io::resolve_function(o.f_spec, model.q);
    const SpinFunction g = o.f1_spec.empty() ? f : io::resolve_function(o.f1_spec, model.q);
    std::vector<Observable> observables = {{{Factor{f, r}}, std::nullopt}};
    std::vector<std::string> names = {"f^R"};
    if (!o.s_list.empty()) {
      observables.push_back({{Factor{g, s}}, std::nullopt});
      observables.push_back({{Factor{f, r}, Factor{g, s}}, std::nullopt});
      names.insert(names.end(), {"g^S", "f^R g^S"});
    }
    const auto means = potts_expectations(model, observables, limits);
    for (std::size_t i = 0; i < means.size(); ++i) {
      emit.line({{"type", "expectation"}, {"observable", names[i]}, {"mean", io::complex_to_json(means[i])}});
    }
    summary["expectations"] = means.size();
  }
  return finish(emit, summary, 0);
}

int cmd_rc(const CommonOptions& o, bool list_probabilities, Emitter& emit) {
  const PottsModel model = io::load_model(o.model_path);
  const auto limits = limits_from(o);
  const AugmentedGraph aug = augment(model);
  std::size_t failures = 0;

  const double z = for_each_bond_config(aug, limits, [](const BondConfig&, const ClusterPartition&, double) {});
  emit.line({{"type", "rc_partition_function"}, {"Z", z}, {"edges", aug.num_edges()}});
  if (list_probabilities) {
    for_each_bond_config(aug, limits, [&](const BondConfig& omega, const ClusterPartition& part, double w) {
      std::string bits;
      for (auto b : omega) bits += b ? '1' : '0';
      emit.line({{"type", "bond_config"}, {"omega", bits}, {"k", part.k()}, {"probability", w / z}});
    });
  }

  const auto marginal = coupled_spin_marginal(aug, limits);
  const auto pi = spin_distribution(model, limits);
  CompensatedSum tv;
  for (std::size_t i = 0; i < pi.size(); ++i) tv.add(std::abs(marginal[i] - pi[i]));
  const double distance = 0.5 * tv.value();
  const bool coupling_ok = distance <= kCouplingTolerance;
  failures += coupling_ok ? 0 : 1;
  emit.line({{"type", "coupling"},
             {"total_variation", distance},
             {"tolerance", kCouplingTolerance},
             {"verdict", coupling_ok ? "pass" : "fail"}});

  if (!o.f_spec.empty()) {
    const SpinFunction f = io::resolve_function(o.f_spec, model.q);
    const Region r = io::parse_region(model, o.r_list);
    const Factor factor{f, r};
    const Complex via_rc = rc_expectation(
        aug, [&](const BondConfig&, const ClusterPartition& part) {
          return conditional_expectation(part, model.q, std::span(&factor, 1));
        },
        limits);
    const Complex direct = potts_expectation(model, std::span(&factor, 1), limits);
    const double diff = std::abs(via_rc - direct);
    const bool ok = diff <= kTowerTolerance;
    failures += ok ? 0 : 1;
    emit.line({{"type", "tower"},
               {"rc_mean", io::complex_to_json(via_rc)},
               {"potts_mean", io::complex_to_json(direct)},
               {"difference", diff},
               {"tolerance", kTowerTolerance},
               {"verdict", ok ? "pass" : "fail"}});
  }
  return finish(emit, {{"command", "rc"}}, failures);
}

int cmd_fclass(const std::string& kind, int q, const std::string& values, const std::string& f_spec, int M,
               double tol, int index, Emitter& emit) {
  SpinFunction f;
  if (!f_spec.empty()) {
    f = io::resolve_function(f_spec, q);
  } else {
    json doc = {{"kind", kind}, {"q", q}};
    if (!values.empty()) {
      json vals = json::array();
      std::istringstream in(values);
      std::string item;
      while (std::getline(in, item, ',')) {
        try {
          vals.push_back(std::stod(item));
        } catch (const std::exception&) {
          throw Error(ErrorCode::BadInput, "bad value '" + item + "' in --values");
        }
      }
      doc["values"] = vals;
    }
    f = io::parse_function(doc);
  }
  if (index < 0 || index >= f.q()) throw Error(ErrorCode::BadInput, "--index out of range");
  const MembershipReport report = check_Fq_i(f, index, M, tol);
  const MomentTable table = moments(f, M);
  json sums = json::array();
  for (const auto& s : table.sums) sums.push_back({s.real(), s.imag()});
  emit.line({{"type", "function"}, {"function", io::function_to_json(f)}});
  emit.line({{"type", "moments"}, {"S", sums}});
  emit.line(io::to_json(report));
  return finish(emit, {{"command", "fclass"}, {"in_Fq", report.in_Fq}, {"index", index}},
                report.passed() ? 0 : 1);
}

int cmd_verify(const std::string& claim, const CommonOptions& o, const std::string& coordinate, Emitter& emit) {
  const PottsModel model = io::load_model(o.model_path);
  const SpinFunction f = io::resolve_function(o.f_spec, model.q);
  const Region r = io::parse_region(model, o.r_list);
  const Region s = io::parse_region(model, o.s_list);
  VerifyOptions opts;
  opts.tol = o.tol;
  opts.max_exponent = o.max_exponent;
  opts.limits = limits_from(o);

  std::vector<VerificationReport> reports;
  const bool all = claim == "all";
  if (claim == "real" || all) reports.push_back(verify_real_nonneg(model, f, r, opts));
  if (claim == "gks" || all) reports.push_back(verify_gks_pair(model, f, r, s, opts));
  if (claim == "monotone" || all) {
    std::vector<Coordinate> coords;
    if (!coordinate.empty()) {
      coords.push_back(parse_coordinate(model, coordinate));
    } else {
      const int bound = o.max_exponent.value_or(default_moment_bound(r.size()));
      coords = monotone_coordinates(model, f, bound, opts.moment_tol);
    }
    for (Coordinate c : coords) {
      for (auto& rep : verify_monotone(model, f, r, c, opts)) {
        rep.claim += "[" + coordinate_name(model, c) + "]";
        reports.push_back(std::move(rep));
      }
    }
  }
  if (claim == "disjoint" || (all && !o.f1_spec.empty())) {
    if (o.f1_spec.empty()) throw Error(ErrorCode::BadInput, "disjoint needs --f1");
    const SpinFunction f1 = io::resolve_function(o.f1_spec, model.q);
    reports.push_back(verify_disjoint_support(model, f, f1, r, s, opts));
  }
  std::size_t failures = 0;
  for (const auto& rep : reports) {
    emit.line(io::to_json(rep));
    failures += rep.pass ? 0 : 1;
  }
  return finish(emit, {{"command", "verify"}, {"claim", claim}, {"checks", reports.size()}}, failures);
}

int cmd_mc(const CommonOptions& o, std::uint64_t sweeps, std::optional<std::uint64_t> burn_in, std::uint64_t seed,
           bool rao_blackwell, unsigned chains, Emitter& emit) {
  const PottsModel model = io::load_model(o.model_path);
  const SpinFunction f = io::resolve_function(o.f_spec, model.q);
  const SpinFunction g = o.f1_spec.empty() ? f : io::resolve_function(o.f1_spec, model.q);
  std::vector<Factor> factors = {{f, io::parse_region(model, o.r_list)}};
  if (!o.s_list.empty()) factors.push_back({g, io::parse_region(model, o.s_list)});

  EstimateOptions opts;
  opts.sweeps = sweeps;
  opts.burn_in = burn_in;
  opts.mode = rao_blackwell ? EstimatorMode::RaoBlackwell : EstimatorMode::Raw;
  std::vector<std::uint64_t> seeds;
  for (unsigned c = 0; c < std::max(1u, chains); ++c) seeds.push_back(seed + c);
  const auto estimates = estimate_chains(model, factors, opts, seeds, std::max(1u, o.jobs));
  for (std::size_t i = 0; i < estimates.size(); ++i) {
    json doc = io::to_json(estimates[i]);
    doc["seed"] = seeds[i];
    emit.line(doc);
  }
  return finish(emit, {{"command", "mc"}, {"chains", estimates.size()}, {"mode", rao_blackwell ? "rao_blackwell" : "raw"}},
                0);
}

int cmd_fuzz(FuzzConfig cfg, const CommonOptions& o, Emitter& emit) {
  cfg.limits = limits_from(o);
  cfg.jobs = std::max(1u, o.jobs);
  cfg.tol = o.tol;
  const FuzzOutcome outcome = fuzz(cfg);
  for (const auto& v : outcome.violations) emit.line(io::to_json(v));
  return finish(emit,
                {{"command", "fuzz"},
                 {"seed", cfg.seed},
                 {"trials", outcome.trials},
                 {"checks", outcome.checks},
                 {"skipped_not_certified", outcome.skipped_not_certified},
                 {"skipped_infeasible", outcome.skipped_infeasible}},
                outcome.violations.size());
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Potts model correlation inequalities: exact enumeration, random-cluster coupling, Monte Carlo"};
  app.require_subcommand(1);
  CommonOptions common;

  auto* exact = app.add_subcommand("exact", "Exact means of spin products by enumeration");
  add_common(exact, common, false);
  exact->add_option("--f1", common.f1_spec, "Function applied on S (default: --f)");
  bool dump_model = false;
  exact->add_flag("--dump-model", dump_model, "Print the parsed model as JSON");

  auto* rc = app.add_subcommand("rc", "Random-cluster measure, coupling and tower checks");
  add_common(rc, common, false);
  bool list_probabilities = false;
  rc->add_flag("--probabilities", list_probabilities, "List phi(omega) for every bond configuration");

  auto* fclass = app.add_subcommand("fclass", "Moment-class membership of a spin function");
  std::string kind = "table";
  int q = 2;
  std::string values;
  std::string f_spec;
  int M = kMinimumMomentBound;
  double moment_tol = kDefaultMomentTolerance;
  int index = 0;
  bool fclass_csv = false;
  fclass->add_option("--kind", kind, "A, B, C or table")->check(CLI::IsMember({"A", "B", "C", "table"}));
  fclass->add_option("--q", q, "Number of states")->required();
  fclass->add_option("--values", values, "Comma-separated real values (C and table)");
  fclass->add_option("--f", f_spec, "Function spec instead of --kind/--values");
  fclass->add_option("--M", M, "Moment exponent bound");
  fclass->add_option("--tol", moment_tol, "Moment tolerance");
  fclass->add_option("--index", index, "State index for the max-modulus condition");
  fclass->add_flag("--csv", fclass_csv, "Emit the summary as CSV");

  auto* verify = app.add_subcommand("verify", "Check correlation inequalities on one instance");
  std::string claim;
  std::string coordinate;
  verify->add_option("claim", claim, "real, monotone, gks, disjoint or all")
      ->required()
      ->check(CLI::IsMember({"real", "monotone", "gks", "disjoint", "all"}));
  add_common(verify, common, true);
  verify->add_option("--f1", common.f1_spec, "Second function (disjoint support check)");
  verify->add_option("--coordinate", coordinate, "edge:N or vertex:NAME (default: all)");

  auto* mc = app.add_subcommand("mc", "Swendsen-Wang estimate of a spin product");
  add_common(mc, common, true);
  mc->add_option("--f1", common.f1_spec, "Function applied on S (default: --f)");
  std::uint64_t sweeps = 100000;
  std::optional<std::uint64_t> burn_in;
  std::uint64_t seed = 0;
  bool rao_blackwell = false;
  unsigned chains = 1;
  mc->add_option("--sweeps", sweeps, "Total sweeps per chain");
  mc->add_option("--burn-in", burn_in, "Discarded sweeps (default: 10%)");
  mc->add_option("--seed", seed, "Random seed")->required();
  mc->add_flag("--rao-blackwell", rao_blackwell, "Average conditional expectations given the bonds");
  mc->add_option("--chains", chains, "Independent chains with seeds seed, seed+1, ...");

  auto* fz = app.add_subcommand("fuzz", "Randomized search for inequality violations");
  FuzzConfig cfg;
  CommonOptions fuzz_common;
  fz->add_option("--trials", cfg.trials, "Number of random instances")->required();
  fz->add_option("--seed", cfg.seed, "Random seed")->required();
  fz->add_option("--q-min", cfg.q_min);
  fz->add_option("--q-max", cfg.q_max);
  fz->add_option("--vertices-min", cfg.vertices_min);
  fz->add_option("--vertices-max", cfg.vertices_max);
  fz->add_option("--density", cfg.edge_density, "Edge probability");
  fz->add_option("--j-min", cfg.couplings.lo);
  fz->add_option("--j-max", cfg.couplings.hi);
  fz->add_option("--h-min", cfg.fields.lo);
  fz->add_option("--h-max", cfg.fields.hi);
  fz->add_option("--tol", fuzz_common.tol, "Verification tolerance");
  fz->add_option("--cap", fuzz_common.cap, "Enumeration cap");
  fz->add_option("--jobs", fuzz_common.jobs, "Worker threads");
  fz->add_flag("--csv", fuzz_common.csv, "Emit the summary as CSV");

  std::vector<const char*> argv;
  argv.reserve(args.size());
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitInputError;
  }

  const bool csv = fz->parsed() ? fuzz_common.csv : fclass->parsed() ? fclass_csv : common.csv;
  Emitter emit(out, csv);
  try {
    if (exact->parsed()) return cmd_exact(common, dump_model, emit);
    if (rc->parsed()) return cmd_rc(common, list_probabilities, emit);
    if (fclass->parsed()) return cmd_fclass(kind, q, values, f_spec, M, moment_tol, index, emit);
    if (verify->parsed()) return cmd_verify(claim, common, coordinate, emit);
    if (mc->parsed()) return cmd_mc(common, sweeps, burn_in, seed, rao_blackwell, chains, emit);
    if (fz->parsed()) return cmd_fuzz(cfg, fuzz_common, emit);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    emit.summary({{"type", "summary"}, {"status", "error"}, {"error", std::string(to_string(e.code()))},
                  {"message", e.what()}});
    return kExitInputError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    emit.summary({{"type", "summary"}, {"status", "error"}, {"error", "Internal"}, {"message", e.what()}});
    return kExitInputError;
  }
  return kExitInputError;
}

}  // namespace potts::cli
