#include "potts/verifier.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <thread>

#include "potts/error.hpp"

namespace potts {

namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

VerificationReport make_report(std::string claim, std::string digest, double lhs, double rhs, double imag,
                               double tol) {
  VerificationReport r;
  r.claim = std::move(claim);
  r.digest = std::move(digest);
  r.lhs = lhs;
  r.rhs = rhs;
  r.margin = lhs - rhs;
  r.imag_residual = imag;
  r.tolerance = tol;
  r.pass = r.margin >= -tol && imag <= tol;
  return r;
}

std::string coordinate_tag(Coordinate c) {
  return (c.kind == Coordinate::Kind::Edge ? "edge:" : "vertex:") + std::to_string(c.index);
}

std::string format_step(double step) {
  std::ostringstream os;
  os << step;
  return os.str();
}

}  // namespace

std::string inputs_digest(const PottsModel& model, std::span<const SpinFunction> functions,
                          std::span<const Region> regions, std::string_view extra) {
  std::ostringstream os;
  os << std::hexfloat << "q=" << model.q << ";V=";
  for (const auto& v : model.vertices) os << v << ',';
  os << ";E=";
  for (const auto& e : model.edges) os << e.u << '-' << e.v << ':' << e.coupling << ',';
  os << ";h=";
  for (double h : model.fields) os << h << ',';
  for (const auto& f : functions) {
    os << ";f=";
    for (const auto& z : f.values()) os << z.real() << '+' << z.imag() << "i,";
  }
  for (const auto& r : regions) {
    os << ";R=";
    for (VertexId v : r.members()) os << v << ',';
  }
  os << ';' << extra;
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(os.str())));
  return buf;
}

MembershipReport certify(const SpinFunction& f, bool field_free_suffices, int max_exponent, double moment_tol) {
  MembershipReport report =
      field_free_suffices ? check_Fq(f, max_exponent, moment_tol) : check_Fq_i(f, 0, max_exponent, moment_tol);
  if (!report.passed()) {
    std::string why = field_free_suffices ? "function is not in F_q" : "function is not in F_q^0";
    const auto& v = report.first_violation ? report.first_violation : report.index_violation;
    if (v) {
      why += " (" + std::string(to_string(v->condition)) + " at m=" + std::to_string(v->m) +
             ", n=" + std::to_string(v->n) + ")";
    }
    throw Error(ErrorCode::NotCertified, why);
  }
  return report;
}

VerificationReport verify_real_nonneg(const PottsModel& model, const SpinFunction& f, const Region& r,
                                      const VerifyOptions& opts) {
  validate_model(model);
  const int bound = opts.max_exponent.value_or(default_moment_bound(r.size()));
  certify(f, model.field_free(), bound, opts.moment_tol);
  const Factor factor{f, r};
  const Complex mean = potts_expectation(model, std::span(&factor, 1), opts.limits);
  return make_report("real_nonneg", inputs_digest(model, std::span(&f, 1), std::span(&r, 1)), mean.real(),
                     0.0, std::abs(mean.imag()), opts.tol);
}

std::vector<Coordinate> monotone_coordinates(const PottsModel& model, const SpinFunction& f, int max_exponent,
                                             double moment_tol) {
  std::vector<Coordinate> coords;
  const bool in_fq0 = check_Fq_i(f, 0, max_exponent, moment_tol).passed();
  if (!in_fq0 && !(model.field_free() && check_Fq(f, max_exponent, moment_tol).passed())) return coords;
  for (std::size_t e = 0; e < model.num_edges(); ++e) coords.push_back({Coordinate::Kind::Edge, e});
  if (in_fq0) {
    for (std::size_t v = 0; v < model.num_vertices(); ++v) coords.push_back({Coordinate::Kind::Vertex, v});
  }
  return coords;
}

std::vector<VerificationReport> verify_monotone(const PottsModel& model, const SpinFunction& f, const Region& r,
                                                Coordinate coordinate, const VerifyOptions& opts) {
  validate_model(model);
  const std::size_t limit = coordinate.kind == Coordinate::Kind::Edge ? model.num_edges() : model.num_vertices();
  if (coordinate.index >= limit) throw Error(ErrorCode::BadInput, "coordinate index out of range");
  const int bound = opts.max_exponent.value_or(default_moment_bound(r.size()));
  certify(f, model.field_free() && coordinate.kind == Coordinate::Kind::Edge, bound, opts.moment_tol);

  const std::string digest =
      inputs_digest(model, std::span(&f, 1), std::span(&r, 1), coordinate_tag(coordinate));
  const Factor factor{f, r};
  const Observable observables[] = {
      {{factor}, std::nullopt},
      {{factor}, coordinate},
      {{}, coordinate},
  };
  const auto means = potts_expectations(model, observables, opts.limits);
  const Complex derivative = means[1] - means[0] * means[2];

  std::vector<VerificationReport> reports;
  reports.push_back(make_report("monotone.derivative", digest, means[1].real(),
                                (means[0] * means[2]).real(), std::abs(derivative.imag()), opts.tol));

  const double base = coordinate_value(model, coordinate);
  for (double step : kFiniteSteps) {
    const PottsModel shifted = with_coordinate(model, coordinate, base + step);
    const Complex moved = potts_expectation(shifted, std::span(&factor, 1), opts.limits);
    reports.push_back(make_report("monotone.step=" + format_step(step), digest, moved.real(),
                                  means[0].real(), std::max(std::abs(moved.imag()), std::abs(means[0].imag())),
                                  opts.tol));
  }
  return reports;
}

VerificationReport verify_gks_pair(const PottsModel& model, const SpinFunction& f, const Region& r,
                                   const Region& s, const VerifyOptions& opts) {
  validate_model(model);
  const int bound = opts.max_exponent.value_or(default_moment_bound(r.size() + s.size()));
  certify(f, model.field_free(), bound, opts.moment_tol);
  const Factor fr{f, r};
  const Factor fs{f, s};
  const Observable observables[] = {
      {{fr, fs}, std::nullopt},
      {{fr}, std::nullopt},
      {{fs}, std::nullopt},
  };
  const auto means = potts_expectations(model, observables, opts.limits);
  const double imag = std::max({std::abs(means[0].imag()), std::abs(means[1].imag()), std::abs(means[2].imag())});
  const Region regions[] = {r, s};
  return make_report("gks_pair", inputs_digest(model, std::span(&f, 1), regions), means[0].real(),
                     means[1].real() * means[2].real(), imag, opts.tol);
}

VerificationReport verify_disjoint_support(const PottsModel& model, const SpinFunction& f0,
                                           const SpinFunction& f1, const Region& r, const Region& s,
                                           const VerifyOptions& opts) {
  validate_model(model);
  if (f0.q() != f1.q()) throw Error(ErrorCode::BadInput, "functions have different q");
  for (int x = 0; x < f0.q(); ++x) {
    if (f0(x) != Complex{} && f1(x) != Complex{}) {
      throw Error(ErrorCode::NotDisjoint, "f0 and f1 are both non-zero at x=" + std::to_string(x));
    }
  }
  const int bound = opts.max_exponent.value_or(default_moment_bound(r.size() + s.size()));
  certify(f0, model.field_free(), bound, opts.moment_tol);
  if (!check_real_nonneg_moments(f1, bound, opts.moment_tol).in_Fq) {
    throw Error(ErrorCode::NotCertified, "f1 has a moment that is not real and non-negative");
  }
  const Factor f0r{f0, r};
  const Factor f1s{f1, s};
  const Observable observables[] = {
      {{f0r, f1s}, std::nullopt},
      {{f0r}, std::nullopt},
      {{f1s}, std::nullopt},
  };
  const auto means = potts_expectations(model, observables, opts.limits);
  const double imag = std::max({std::abs(means[0].imag()), std::abs(means[1].imag()), std::abs(means[2].imag())});
  const SpinFunction functions[] = {f0, f1};
  const Region regions[] = {r, s};
  return make_report("disjoint_support", inputs_digest(model, functions, regions),
                     means[1].real() * means[2].real(), means[0].real(), imag, opts.tol);
}

// ---------------------------------------------------------------------------

PottsModel random_model(Rng& rng, int q, std::size_t num_vertices, double edge_density,
                        const ParameterRange& couplings, const ParameterRange& fields, double boundary_probability,
                        bool field_free) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  PottsModel model;
  model.q = q;
  for (std::size_t v = 0; v < num_vertices; ++v) model.vertices.push_back("v" + std::to_string(v));
  for (std::size_t u = 0; u < num_vertices; ++u) {
    for (std::size_t v = u + 1; v < num_vertices; ++v) {
      if (unit(rng) >= edge_density) continue;
      const double j = unit(rng) < boundary_probability ? 0.0 : couplings.sample(rng);
      model.edges.push_back({u, v, j});
    }
  }
  model.fields.assign(num_vertices, 0.0);
  if (!field_free) {
    for (double& h : model.fields) h = unit(rng) < boundary_probability ? 0.0 : fields.sample(rng);
  }
  return model;
}

Region random_region(const PottsModel& model, Rng& rng) {
  std::bernoulli_distribution pick(0.5);
  std::vector<VertexId> members;
  for (VertexId v = 0; v < model.num_vertices(); ++v) {
    if (pick(rng)) members.push_back(v);
  }
  return Region::from_indices(model, std::move(members));
}

SpinFunction random_family_c(int q, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<Complex> values(static_cast<std::size_t>(q));
  const double top = 0.5 + 1.5 * unit(rng);
  values[0] = top;
  for (int x = 1; x < q; ++x) values[static_cast<std::size_t>(x)] = unit(rng) < 0.1 ? 0.0 : top * unit(rng);
  return make_family(Family::C, q, values);
}

SpinFunction random_certified_table(int q, Rng& rng, int max_exponent) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  constexpr int kAttempts = 256;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<Complex> values(static_cast<std::size_t>(q));
    const double scale = 0.5 + unit(rng);
    switch (rng() % 3) {
      case 0:  // generic real table, f(0) the largest modulus
        values[0] = 1.0;
        for (int x = 1; x < q; ++x) values[static_cast<std::size_t>(x)] = 2.0 * unit(rng) - 1.0;
        break;
      case 1: {  // symmetric about zero, hence all odd moments vanish
        std::vector<double> pool = {-1.0};
        while (static_cast<int>(pool.size()) + 2 < q) {
          const double a = unit(rng);
          pool.push_back(a);
          pool.push_back(-a);
        }
        if (static_cast<int>(pool.size()) + 1 < q) pool.push_back(0.0);
        std::shuffle(pool.begin(), pool.end(), rng);
        values[0] = 1.0;
        for (int x = 1; x < q; ++x) values[static_cast<std::size_t>(x)] = pool[static_cast<std::size_t>(x - 1)];
        break;
      }
      default: {  // x -> exp(2 pi i k x / q)
        const int k = static_cast<int>(rng() % static_cast<unsigned>(q));
        for (int x = 0; x < q; ++x) {
          values[static_cast<std::size_t>(x)] = std::polar(1.0, 2.0 * std::numbers::pi * k * x / q);
        }
        break;
      }
    }
    for (auto& z : values) z *= scale;
    SpinFunction f(std::move(values));
    if (check_Fq_i(f, 0, max_exponent).passed()) return f;
  }
  return random_family_c(q, rng);
}

std::pair<SpinFunction, SpinFunction> random_disjoint_pair(int q, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<bool> in_f0(static_cast<std::size_t>(q), false);
  in_f0[0] = true;
  for (int x = 1; x < q; ++x) in_f0[static_cast<std::size_t>(x)] = unit(rng) < 0.5;
  // Keep at least one state for f1.
  if (std::all_of(in_f0.begin(), in_f0.end(), [](bool b) { return b; })) {
    in_f0[1 + rng() % static_cast<unsigned>(q - 1)] = false;
  }
  std::vector<Complex> v0(static_cast<std::size_t>(q), 0.0);
  std::vector<Complex> v1(static_cast<std::size_t>(q), 0.0);
  const double top = 0.5 + unit(rng);
  const bool indicator = unit(rng) < 0.3;
  v0[0] = indicator ? 1.0 : top;
  for (int x = 1; x < q; ++x) {
    const auto i = static_cast<std::size_t>(x);
    if (in_f0[i]) {
      v0[i] = indicator ? 0.0 : top * unit(rng);
    } else {
      v1[i] = indicator ? 0.0 : 2.0 * unit(rng);
    }
  }
  if (indicator) {
    for (int x = 1; x < q; ++x) {
      if (!in_f0[static_cast<std::size_t>(x)]) {
        v1[static_cast<std::size_t>(x)] = 1.0;
        break;
      }
    }
  }
  return {SpinFunction(std::move(v0)), SpinFunction(std::move(v1))};
}

namespace {

struct TrialResult {
  std::vector<VerificationReport> violations;
  std::uint64_t checks = 0;
  bool not_certified = false;
  bool infeasible = false;
};

TrialResult run_trial(const FuzzConfig& cfg, std::uint64_t trial) {
  TrialResult out;
  std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                    static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
  Rng rng(seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  const int q = std::uniform_int_distribution<int>(cfg.q_min, cfg.q_max)(rng);
  const std::size_t n = std::uniform_int_distribution<std::size_t>(cfg.vertices_min, cfg.vertices_max)(rng);
  const bool field_free = unit(rng) < cfg.boundary_probability;
  const PottsModel model = random_model(rng, q, n, cfg.edge_density, cfg.couplings, cfg.fields,
                                        cfg.boundary_probability, field_free);
  try {
    checked_state_count(model, cfg.limits);
  } catch (const Error&) {
    out.infeasible = true;
    return out;
  }

  const Region r = random_region(model, rng);
  const Region s = random_region(model, rng);
  const int bound = default_moment_bound(r.size() + s.size());

  const std::array<double, 5> weights = {cfg.mix.a, cfg.mix.b, cfg.mix.c, cfg.mix.table, cfg.mix.adversarial};
  const int kind = std::discrete_distribution<int>(weights.begin(), weights.end())(rng);
  SpinFunction f;
  switch (kind) {
    case 0: f = make_family(Family::A, q); break;
    case 1: f = make_family(Family::B, q); break;
    case 2: f = random_family_c(q, rng); break;
    case 3: f = random_certified_table(q, rng, bound); break;
    default: {
      std::vector<Complex> values(static_cast<std::size_t>(q));
      for (auto& z : values) z = Complex(4.0 * unit(rng) - 2.0, unit(rng) < 0.5 ? 0.0 : 2.0 * unit(rng) - 1.0);
      f = SpinFunction(std::move(values));
      break;
    }
  }
  // Without a field, exercise members of F_q outside F_q^0.
  if (field_free && kind != 4 && unit(rng) < 0.5) {
    f = relabel(f, 1 + static_cast<int>(rng() % static_cast<unsigned>(q - 1)));
  }

  try {
    certify(f, field_free, bound, kDefaultMomentTolerance);
  } catch (const Error&) {
    out.not_certified = true;
    return out;
  }

  VerifyOptions opts;
  opts.tol = cfg.tol;
  opts.max_exponent = bound;
  opts.limits = cfg.limits;
  opts.limits.jobs = 1;

  std::vector<VerificationReport> reports;
  reports.push_back(verify_real_nonneg(model, f, r, opts));
  reports.push_back(verify_gks_pair(model, f, r, s, opts));
  for (Coordinate c : monotone_coordinates(model, f, bound, kDefaultMomentTolerance)) {
    for (auto& rep : verify_monotone(model, f, r, c, opts)) reports.push_back(std::move(rep));
  }
  const auto [f0, f1] = random_disjoint_pair(q, rng);
  reports.push_back(verify_disjoint_support(model, f0, f1, r, s, opts));

  out.checks = reports.size();
  for (auto& rep : reports) {
    if (!rep.pass) out.violations.push_back(std::move(rep));
  }
  return out;
}

}  // namespace

FuzzOutcome fuzz(const FuzzConfig& config) {
  if (config.q_min < 2 || config.q_max < config.q_min || config.vertices_max < config.vertices_min ||
      !config.couplings.valid() || !config.fields.valid()) {
    throw Error(ErrorCode::BadInput, "inconsistent fuzz configuration");
  }
  std::vector<TrialResult> results(config.trials);
  const unsigned workers =
      static_cast<unsigned>(std::min<std::uint64_t>(std::max(1u, config.jobs), std::max<std::uint64_t>(1, config.trials)));
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (std::uint64_t t = next++; t < config.trials; t = next++) results[t] = run_trial(config, t);
  };
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  FuzzOutcome outcome;
  outcome.trials = config.trials;
  for (auto& r : results) {
    outcome.checks += r.checks;
    outcome.skipped_not_certified += r.not_certified ? 1 : 0;
    outcome.skipped_infeasible += r.infeasible ? 1 : 0;
    for (auto& v : r.violations) outcome.violations.push_back(std::move(v));
  }
  return outcome;
}

}  // namespace potts
