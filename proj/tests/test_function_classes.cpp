#include <cmath>

#include "doctest.h"
#include "potts/error.hpp"
#include "potts/function_classes.hpp"
#include "potts/random_cluster.hpp"

using namespace potts;

namespace {

bool near(Complex a, Complex b, double tol = 1e-12) { return std::abs(a - b) <= tol; }

}  // namespace

TEST_CASE("moments of the worked examples") {
  const MomentTable b3 = moments(make_family(Family::B, 3), 6);
  CHECK(near(b3[0], 3.0));
  CHECK(near(b3[1], 0.0));
  CHECK(near(b3[2], 0.0));
  CHECK(near(b3[3], 3.0));
  CHECK(near(b3[6], 3.0));

  const MomentTable a2 = moments(make_family(Family::A, 2), 4);
  CHECK(near(a2[1], 0.0));
  CHECK(near(a2[2], 0.5));
  CHECK(near(a2[3], 0.0));
  CHECK(near(a2[4], 0.125));

  const MomentTable a3 = moments(make_family(Family::A, 3), 5);
  const double want[] = {3, 0, 2, 0, 2, 0};
  for (int m = 0; m <= 5; ++m) CHECK(a3[m] == Complex{want[m], 0.0});
}

TEST_CASE("S_0 = q even when f vanishes somewhere") {
  const SpinFunction f = SpinFunction::real(std::vector<double>{0.0, 0.0, 2.0});
  const MomentTable t = moments(f, 3);
  CHECK(t[0] == Complex{3.0, 0.0});
  CHECK(t[1] == Complex{2.0, 0.0});
  CHECK(t.mean(3) == Complex{8.0 / 3.0, 0.0});
}

TEST_CASE("check_Fq examples") {
  for (int q = 2; q <= 6; ++q) {
    const auto report = check_Fq(SpinFunction::constant(q, 1.0), 20);
    CHECK(report.in_Fq);
    CHECK_FALSE(report.first_violation.has_value());
  }

  const auto bad = check_Fq(SpinFunction::real(std::vector<double>{1.0, -2.0}), 8);
  CHECK_FALSE(bad.in_Fq);
  REQUIRE(bad.first_violation.has_value());
  CHECK(bad.first_violation->condition == MomentViolation::Condition::Negative);
  CHECK(bad.first_violation->m == 1);
  CHECK(bad.first_violation->margin < 0.0);

  const auto roots = check_Fq(make_family(Family::B, 4), 200);
  CHECK(roots.in_Fq);
  CHECK(roots.max_exponent == 200);

  // Complex moment: f = (1, i) has S_1 = 1 + i.
  const auto imag = check_Fq(SpinFunction({{1.0, 0.0}, {0.0, 1.0}}), 4);
  CHECK_FALSE(imag.in_Fq);
  CHECK(imag.first_violation->condition == MomentViolation::Condition::Imaginary);

  // Verdict agrees with a direct check of q S_3 >= S_1 S_2.
  const SpinFunction f = SpinFunction::real(std::vector<double>{1.0, 0.9, -1.0});
  const auto t = moments(f, 4);
  const bool violates = 3.0 * t[3].real() < t[1].real() * t[2].real();
  CHECK(check_Fq(f, 4).in_Fq == !violates);
}

TEST_CASE("check_Fq_i examples") {
  const auto a = check_Fq_i(SpinFunction::real(std::vector<double>{1.0, 0.0, -1.0}), 0, 16);
  CHECK(a.passed());
  CHECK(a.in_Fq_i == 0);

  const auto wrong_max = check_Fq_i(SpinFunction::real(std::vector<double>{0.0, 1.0, 0.0}), 0, 16);
  CHECK_FALSE(wrong_max.passed());
  CHECK_FALSE(wrong_max.in_Fq_i.has_value());
  REQUIRE(wrong_max.index_violation.has_value());
  CHECK(wrong_max.index_violation->margin == doctest::Approx(-1.0));

  CHECK(check_Fq_i(SpinFunction::real(std::vector<double>{1.0, 1.0}), 0, 16).passed());

  // Same moments as family B but f(1) is the modulus maximiser only up to phase.
  CHECK_FALSE(check_Fq_i(make_family(Family::B, 3), 1, 16).passed());
  CHECK(check_Fq_i(make_family(Family::B, 3), 0, 16).passed());
  CHECK_THROWS_AS(check_Fq_i(make_family(Family::B, 3), 3, 16), Error);
}

TEST_CASE("make_family") {
  const SpinFunction a = make_family(Family::A, 3);
  CHECK(a(0) == Complex{1.0, 0.0});
  CHECK(a(1) == Complex{0.0, 0.0});
  CHECK(a(2) == Complex{-1.0, 0.0});

  const SpinFunction b = make_family(Family::B, 4);
  CHECK(b(0) == Complex{1.0, 0.0});
  CHECK(b(1) == Complex{0.0, 1.0});
  CHECK(b(2) == Complex{-1.0, 0.0});
  CHECK(b(3) == Complex{0.0, -1.0});

  const std::vector<Complex> ok = {1.0, 0.5, 0.0};
  CHECK(make_family(Family::C, 3, ok)(1) == Complex{0.5, 0.0});
  const std::vector<Complex> too_big = {1.0, 2.0, 0.0};
  const std::vector<Complex> negative = {1.0, -0.5, 0.0};
  const std::vector<Complex> short_list = {1.0, 0.5};
  for (const auto* bad : {&too_big, &negative, &short_list}) {
    try {
      make_family(Family::C, 3, *bad);
      FAIL("expected BadFamilyC");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::BadFamilyC);
    }
  }
}

TEST_CASE("all three families are in F_q^0 for q = 2..12 up to M = 48") {
  Rng rng(77);
  for (int q = 2; q <= 12; ++q) {
    CHECK(check_Fq_i(make_family(Family::A, q), 0, 48, 1e-9).passed());
    CHECK(check_Fq_i(make_family(Family::B, q), 0, 48, 1e-9).passed());
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Complex> c(static_cast<std::size_t>(q));
    c[0] = 1.0 + u(rng);
    for (int x = 1; x < q; ++x) c[static_cast<std::size_t>(x)] = c[0] * u(rng);
    CHECK(check_Fq_i(make_family(Family::C, q, c), 0, 48, 1e-9).passed());
  }
}

TEST_CASE("family B moment identity S_m = q 1{q | m}") {
  for (int q = 2; q <= 12; ++q) {
    const MomentTable t = moments(make_family(Family::B, q), 48);
    for (int m = 0; m <= 48; ++m) {
      const double want = m % q == 0 ? q : 0.0;
      CHECK(std::abs(t[m] - Complex{want, 0.0}) <= 1e-12);
    }
  }
}

TEST_CASE("family A odd moments vanish and even moments are positive") {
  for (int q = 2; q <= 12; ++q) {
    const MomentTable t = moments(make_family(Family::A, q), 24);
    for (int m = 1; m <= 24; ++m) {
      if (m % 2 == 1) {
        CHECK(t[m].real() == 0.0);
      } else {
        CHECK(t[m].real() > 0.0);
      }
    }
  }
}

TEST_CASE("membership is invariant under positive scaling") {
  Rng rng(4);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  int members = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const int q = 2 + trial % 5;
    std::vector<double> v(static_cast<std::size_t>(q));
    for (auto& x : v) x = u(rng);
    const SpinFunction f = SpinFunction::real(v);
    const bool in = check_Fq(f, 16).in_Fq;
    if (!in) continue;
    ++members;
    for (double c : {0.5, 2.0, 10.0}) {
      std::vector<double> scaled = v;
      for (auto& x : scaled) x *= c;
      CHECK(check_Fq(SpinFunction::real(scaled), 16).in_Fq);
    }
  }
  CHECK(members > 10);
}

TEST_CASE("every non-negative table satisfies q S_{m+n} >= S_m S_n") {
  Rng rng(12);
  std::uniform_real_distribution<double> u(0.0, 3.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int q = 2 + trial % 9;
    std::vector<double> v(static_cast<std::size_t>(q));
    for (auto& x : v) x = trial % 7 == 0 && q > 2 ? 0.0 : u(rng);
    v[0] = u(rng);
    CHECK(check_Fq(SpinFunction::real(v), 32).in_Fq);
  }
}

TEST_CASE("relabel shifts the argument") {
  const SpinFunction a = make_family(Family::A, 3);
  const SpinFunction r = relabel(a, 1);
  CHECK(r(0) == a(1));
  CHECK(r(2) == a(0));
  // Same multiset of values, so the same moments, but no longer maximal at 0.
  CHECK(check_Fq(r, 16).in_Fq);
  CHECK_FALSE(check_Fq_i(relabel(a, 2), 0, 16).passed());
}
