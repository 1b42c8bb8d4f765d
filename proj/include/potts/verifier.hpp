#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "potts/function_classes.hpp"
#include "potts/model.hpp"
#include "potts/random_cluster.hpp"

namespace potts {

// Outcome of one inequality check. `margin` is lhs - rhs for the stated
// inequality (oriented so that non-negative means it holds);
// `imag_residual` is the largest |Im| among the means involved.
struct VerificationReport {
  std::string claim;
  std::string digest;
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double imag_residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

inline constexpr double kDefaultVerifyTolerance = 1e-8;

struct VerifyOptions {
  double tol = kDefaultVerifyTolerance;
  double moment_tol = kDefaultMomentTolerance;
  std::optional<int> max_exponent;  // default: default_moment_bound(|R| + |S|)
  EnumerationLimits limits;
};

// Stable 64-bit hex digest of a check's inputs.
std::string inputs_digest(const PottsModel& model, std::span<const SpinFunction> functions,
                          std::span<const Region> regions, std::string_view extra = {});

// Membership required by the positive-correlation checks: F_q^0, or F_q
// when `field_free_suffices` (zero field and the check never leaves it).
// Throws NotCertified.
MembershipReport certify(const SpinFunction& f, bool field_free_suffices, int max_exponent, double moment_tol);

// <f^R> is real and non-negative.
VerificationReport verify_real_nonneg(const PottsModel& model, const SpinFunction& f, const Region& r,
                                      const VerifyOptions& opts = {});

inline constexpr std::array<double, 2> kFiniteSteps = {0.1, 1.0};

// <f^R> is non-decreasing in one coupling or field. Returns the
// covariance-derivative check followed by the finite-step checks.
std::vector<VerificationReport> verify_monotone(const PottsModel& model, const SpinFunction& f, const Region& r,
                                                Coordinate coordinate, const VerifyOptions& opts = {});

// <f^R f^S> >= <f^R><f^S>.
VerificationReport verify_gks_pair(const PottsModel& model, const SpinFunction& f, const Region& r,
                                   const Region& s, const VerifyOptions& opts = {});

// <f0^R f1^S> <= <f0^R><f1^S> for f0 f1 == 0.
VerificationReport verify_disjoint_support(const PottsModel& model, const SpinFunction& f0,
                                           const SpinFunction& f1, const Region& r, const Region& s,
                                           const VerifyOptions& opts = {});

// Every coordinate the monotonicity claim covers for `f` on `model`.
std::vector<Coordinate> monotone_coordinates(const PottsModel& model, const SpinFunction& f, int max_exponent,
                                             double moment_tol);

// ---------------------------------------------------------------------------
// Randomized search.

struct FamilyMix {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
  double table = 1.0;        // rejection-sampled certified tables
  double adversarial = 0.1;  // unconstrained tables, expected to be gated out
};

// Uniform range [lo, hi] for couplings or fields.
struct ParameterRange {
  double lo = 0.0;
  double hi = 3.0;

  bool valid() const noexcept { return lo >= 0.0 && hi >= lo; }
  double sample(Rng& rng) const { return std::uniform_real_distribution<double>(lo, hi)(rng); }
};

struct FuzzConfig {
  int q_min = 2;
  int q_max = 5;
  std::size_t vertices_min = 1;
  std::size_t vertices_max = 5;
  double edge_density = 0.5;
  ParameterRange couplings;
  ParameterRange fields;
  double boundary_probability = 0.1;
  FamilyMix mix;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  double tol = kDefaultVerifyTolerance;
  unsigned jobs = 1;
  EnumerationLimits limits;
};

struct FuzzOutcome {
  std::vector<VerificationReport> violations;
  std::uint64_t trials = 0;
  std::uint64_t checks = 0;
  std::uint64_t skipped_not_certified = 0;
  std::uint64_t skipped_infeasible = 0;
};

FuzzOutcome fuzz(const FuzzConfig& config);

// Instance generators shared by the fuzzer and the test suites.
// Erdos-Renyi graph; each parameter is 0 with `boundary_probability`.
PottsModel random_model(Rng& rng, int q, std::size_t num_vertices, double edge_density,
                        const ParameterRange& couplings, const ParameterRange& fields, double boundary_probability,
                        bool field_free);
Region random_region(const PottsModel& model, Rng& rng);
// Random table in F_q^0 (rejection sampling, with a family C fallback).
SpinFunction random_certified_table(int q, Rng& rng, int max_exponent);
// (f0, f1) with f0 in F_q^0 of family C type, f1 >= 0, f0 f1 == 0.
std::pair<SpinFunction, SpinFunction> random_disjoint_pair(int q, Rng& rng);
// Random family C member.
SpinFunction random_family_c(int q, Rng& rng);

}  // namespace potts
