#include <cmath>

#include "doctest.h"
#include "oracle.hpp"
#include "potts/error.hpp"
#include "potts/function_classes.hpp"
#include "potts/verifier.hpp"
#include "suite.hpp"

using namespace potts;

namespace {

PottsModel edge_model(int q, double j) {
  PottsModel m;
  m.q = q;
  m.vertices = {"u", "v"};
  m.edges = {{0, 1, j}};
  m.fields = {0.0, 0.0};
  return m;
}

PottsModel triangle(int q, double j) {
  PottsModel m;
  m.q = q;
  m.vertices = {"u", "v", "w"};
  m.edges = {{0, 1, j}, {1, 2, j}, {0, 2, j}};
  m.fields = {0.0, 0.0, 0.0};
  return m;
}

PottsModel single_vertex(int q, double h) {
  PottsModel m;
  m.q = q;
  m.vertices = {"u"};
  m.fields = {h};
  return m;
}

SpinFunction delta(int q, int at) {
  std::vector<double> v(static_cast<std::size_t>(q), 0.0);
  v[static_cast<std::size_t>(at)] = 1.0;
  return SpinFunction::real(v);
}

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return ErrorCode::BadInput;
}

}  // namespace

TEST_CASE("verify_real_nonneg examples") {
  const PottsModel tri = triangle(3, 1.0);
  const SpinFunction b = make_family(Family::B, 3);
  const Region uv = Region::from_indices(tri, {0, 1});
  const auto report = verify_real_nonneg(tri, b, uv);
  const Complex want = oracle::product_mean(tri, {b.values().begin(), b.values().end()}, {0, 1});
  CHECK(report.pass);
  CHECK(report.claim == "real_nonneg");
  CHECK(report.lhs == doctest::Approx(want.real()).epsilon(1e-12));
  CHECK(want.real() > 0.0);
  CHECK(std::abs(want.imag()) < 1e-14);
  CHECK(report.imag_residual <= 1e-12);

  const auto empty = verify_real_nonneg(tri, b, Region::from_indices(tri, {}));
  CHECK(empty.pass);
  CHECK(empty.lhs == doctest::Approx(1.0).epsilon(1e-15));

  const PottsModel e = edge_model(2, std::log(3.0));
  const auto a = verify_real_nonneg(e, make_family(Family::A, 2), Region::from_indices(e, {0, 1}));
  CHECK(a.pass);
  CHECK(a.lhs == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(a.margin == doctest::Approx(0.125).epsilon(1e-14));
}

TEST_CASE("verify_monotone examples") {
  const PottsModel v = single_vertex(3, 0.0);
  const SpinFunction d0 = delta(3, 0);
  const Region u = Region::from_indices(v, {0});
  const auto reports = verify_monotone(v, d0, u, Coordinate{Coordinate::Kind::Vertex, 0});
  REQUIRE(reports.size() == 3);
  CHECK(reports[0].claim == "monotone.derivative");
  CHECK(reports[1].claim == "monotone.step=0.1");
  CHECK(reports[2].claim == "monotone.step=1");
  // Var(delta_0) at the uniform law: 1/3 - 1/9.
  CHECK(reports[0].margin == doctest::Approx(2.0 / 9.0).epsilon(1e-14));
  CHECK(reports[1].margin == doctest::Approx(std::exp(0.1) / (std::exp(0.1) + 2.0) - 1.0 / 3.0).epsilon(1e-12));
  CHECK(reports[2].margin == doctest::Approx(std::exp(1.0) / (std::exp(1.0) + 2.0) - 1.0 / 3.0).epsilon(1e-12));
  for (const auto& r : reports) CHECK(r.pass);

  const std::vector<Factor> at_ln2{{d0, u}};
  CHECK(potts_expectation(single_vertex(3, std::log(2.0)), at_ln2).real() == doctest::Approx(0.5).epsilon(1e-14));

  const PottsModel e = edge_model(2, std::log(3.0));
  const Region uv = Region::from_indices(e, {0, 1});
  for (const auto& r : verify_monotone(e, SpinFunction::constant(2, 1.0), uv, Coordinate{Coordinate::Kind::Edge, 0})) {
    CHECK(r.pass);
    CHECK(std::abs(r.margin) <= 1e-15);
  }

  const auto a = verify_monotone(e, make_family(Family::A, 2), uv, Coordinate{Coordinate::Kind::Edge, 0});
  // <f^R delta_e> - <f^R><delta_e> = 3/16 - 3/32.
  CHECK(a[0].margin == doctest::Approx(3.0 / 32.0).epsilon(1e-13));
}

TEST_CASE("verify_gks_pair examples") {
  const PottsModel e = edge_model(2, std::log(3.0));
  const SpinFunction a = make_family(Family::A, 2);
  const Region u = Region::from_indices(e, {0});
  const Region v = Region::from_indices(e, {1});
  const auto report = verify_gks_pair(e, a, u, v);
  CHECK(report.claim == "gks_pair");
  CHECK(report.pass);
  CHECK(report.lhs == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(std::abs(report.rhs) <= 1e-15);

  const auto empty = verify_gks_pair(e, a, Region::from_indices(e, {}), v);
  CHECK(std::abs(empty.margin) <= 1e-15);

  const PottsModel free = edge_model(3, 0.0);
  const SpinFunction c = SpinFunction::real(std::vector<double>{1.0, 0.25, 0.5});
  const auto indep = verify_gks_pair(free, c, Region::from_indices(free, {0}), Region::from_indices(free, {1}));
  CHECK(indep.pass);
  CHECK(std::abs(indep.margin) <= 1e-15);
}

TEST_CASE("verify_disjoint_support examples") {
  const PottsModel e = edge_model(2, std::log(3.0));
  const Region u = Region::from_indices(e, {0});
  const Region v = Region::from_indices(e, {1});
  const auto schonmann = verify_disjoint_support(e, delta(2, 0), delta(2, 1), u, v);
  CHECK(schonmann.claim == "disjoint_support");
  CHECK(schonmann.pass);
  CHECK(schonmann.lhs == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(schonmann.rhs == doctest::Approx(0.125).epsilon(1e-14));
  CHECK(schonmann.margin == doctest::Approx(0.125).epsilon(1e-14));

  const auto zero = verify_disjoint_support(e, delta(2, 0), SpinFunction::constant(2, 0.0), u, v);
  CHECK(zero.pass);
  CHECK(zero.margin == 0.0);

  const PottsModel free = edge_model(3, 0.0);
  const auto indep = verify_disjoint_support(free, delta(3, 0), SpinFunction::real(std::vector<double>{0.0, 1.0, 2.0}),
                                             Region::from_indices(free, {0}), Region::from_indices(free, {1}));
  CHECK(indep.pass);
  CHECK(std::abs(indep.margin) <= 1e-15);
}

TEST_CASE("hypotheses are enforced") {
  PottsModel e = edge_model(3, 1.0);
  e.fields = {0.5, 0.0};
  const Region u = Region::from_indices(e, {0});
  const Region v = Region::from_indices(e, {1});
  const SpinFunction shifted = relabel(make_family(Family::A, 3), 1);
  const SpinFunction bad = SpinFunction::real(std::vector<double>{1.0, -2.0, 0.0});

  CHECK(code_of([&] { verify_real_nonneg(e, bad, u); }) == ErrorCode::NotCertified);
  CHECK(code_of([&] { verify_gks_pair(e, shifted, u, v); }) == ErrorCode::NotCertified);
  CHECK(code_of([&] { verify_monotone(e, shifted, u, Coordinate{Coordinate::Kind::Edge, 0}); }) ==
        ErrorCode::NotCertified);
  CHECK(code_of([&] { verify_disjoint_support(e, delta(3, 0), delta(3, 0), u, v); }) == ErrorCode::NotDisjoint);
  CHECK(code_of([&] { verify_disjoint_support(e, shifted, delta(3, 0), u, v); }) == ErrorCode::NotCertified);

  // Without a field the shifted function is admissible for edge coordinates
  // but not for raising a field.
  e.fields = {0.0, 0.0};
  CHECK(verify_gks_pair(e, shifted, u, v).pass);
  CHECK(code_of([&] { verify_monotone(e, shifted, u, Coordinate{Coordinate::Kind::Vertex, 0}); }) ==
        ErrorCode::NotCertified);
}

TEST_CASE("field raising really needs F_q^0") {
  // The reason vertex coordinates stay gated: f = (-1, 1, 0) is in F_3 but
  // its mean falls as h_u grows from 0.
  const PottsModel v = single_vertex(3, 0.0);
  const SpinFunction f = SpinFunction::real(std::vector<double>{-1.0, 1.0, 0.0});
  CHECK(check_Fq(f, 32).in_Fq);
  const std::vector<Factor> factors{{f, Region::from_indices(v, {0})}};
  CHECK(potts_expectation(single_vertex(3, 0.1), factors).real() < potts_expectation(v, factors).real());
}

TEST_CASE("inequality checks pass on the instance suite") {
  Rng rng(17);
  for (const auto& inst : suite::full_suite()) {
    const PottsModel& m = inst.model;
    INFO(inst.name);
    for (const SpinFunction& f : {make_family(Family::A, m.q), make_family(Family::B, m.q), random_family_c(m.q, rng),
                                  random_certified_table(m.q, rng, 16)}) {
      const Region r = random_region(m, rng);
      const Region s = random_region(m, rng);
      CHECK(verify_real_nonneg(m, f, r).pass);
      CHECK(verify_gks_pair(m, f, r, s).pass);
      for (const auto& c : monotone_coordinates(m, f, default_moment_bound(r.size()), kDefaultMomentTolerance)) {
        for (const auto& rep : verify_monotone(m, f, r, c)) CHECK(rep.pass);
      }
    }
    auto [f0, f1] = random_disjoint_pair(m.q, rng);
    CHECK(verify_disjoint_support(m, f0, f1, random_region(m, rng), random_region(m, rng)).pass);
  }
}

TEST_CASE("derivative and finite-step checks agree in sign") {
  Rng rng(23);
  int strict = 0;
  for (const auto& inst : suite::random_instances(20, 404)) {
    const PottsModel& m = inst.model;
    const SpinFunction f = random_certified_table(m.q, rng, 16);
    const Region r = random_region(m, rng);
    for (const auto& c : monotone_coordinates(m, f, default_moment_bound(r.size()), kDefaultMomentTolerance)) {
      const auto reps = verify_monotone(m, f, r, c);
      const double d = reps[0].margin;
      for (std::size_t k = 1; k < reps.size(); ++k) {
        if (d > 1e-8) {
          CHECK(reps[k].margin > -1e-8);
          ++strict;
        }
        if (reps[k].margin > 1e-8) CHECK(d > -1e-8);
      }
    }
  }
  CHECK(strict > 20);
}

TEST_CASE("h = 0 relaxation admits F_q minus F_q^0") {
  for (int q = 2; q <= 4; ++q) {
    const SpinFunction f = relabel(make_family(Family::A, q), 1);
    CHECK(check_Fq(f, 32).in_Fq);
    CHECK_FALSE(check_Fq_i(f, 0, 32).passed());
  }
  Rng rng(5);
  for (const auto& inst : suite::field_free_instances()) {
    const PottsModel& m = inst.model;
    const SpinFunction f = relabel(make_family(Family::A, m.q), 1);
    const Region r = random_region(m, rng);
    const Region s = random_region(m, rng);
    INFO(inst.name);
    CHECK(verify_real_nonneg(m, f, r).pass);
    CHECK(verify_gks_pair(m, f, r, s).pass);
    for (std::size_t e = 0; e < m.num_edges(); ++e) {
      for (const auto& rep : verify_monotone(m, f, r, Coordinate{Coordinate::Kind::Edge, e})) CHECK(rep.pass);
    }
  }
}

TEST_CASE("digest is stable and input sensitive") {
  const PottsModel e = edge_model(2, std::log(3.0));
  const SpinFunction a = make_family(Family::A, 2);
  const Region u = Region::from_indices(e, {0});
  const auto first = verify_real_nonneg(e, a, u);
  const auto again = verify_real_nonneg(e, a, u);
  CHECK(first.digest == again.digest);
  CHECK(first.digest.size() == 16);
  PottsModel other = e;
  other.edges[0].coupling = 1.0;
  CHECK(verify_real_nonneg(other, a, u).digest != first.digest);
}

TEST_CASE("fuzz") {
  FuzzConfig empty;
  empty.trials = 0;
  const auto none = fuzz(empty);
  CHECK(none.violations.empty());
  CHECK(none.checks == 0);

  FuzzConfig cfg;
  cfg.trials = 300;
  cfg.seed = 42;
  const auto once = fuzz(cfg);
  CHECK(once.violations.empty());
  CHECK(once.trials == 300);
  CHECK(once.checks > 300);

  cfg.jobs = 4;
  const auto parallel = fuzz(cfg);
  CHECK(parallel.checks == once.checks);
  CHECK(parallel.skipped_not_certified == once.skipped_not_certified);
  CHECK(parallel.skipped_infeasible == once.skipped_infeasible);

  FuzzConfig adversarial;
  adversarial.trials = 200;
  adversarial.seed = 7;
  adversarial.mix = FamilyMix{0.0, 0.0, 0.0, 0.0, 1.0};
  const auto gated = fuzz(adversarial);
  CHECK(gated.violations.empty());
  CHECK(gated.skipped_not_certified > 0);
}
