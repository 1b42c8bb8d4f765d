#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "potts/model.hpp"

namespace potts {

// Power sums S_m = sum_x f(x)^m for m = 0..max_exponent, with 0^0 = 1.
struct MomentTable {
  int q = 0;
  int max_exponent = 0;
  std::vector<Complex> sums;

  Complex operator[](int m) const { return sums.at(static_cast<std::size_t>(m)); }
  // E f(X)^m for X uniform on {0, ..., q-1}.
  Complex mean(int m) const { return (*this)[m] / static_cast<double>(q); }
};

MomentTable moments(const SpinFunction& f, int max_exponent);

struct MomentViolation {
  enum class Condition { Imaginary, Negative, Supermultiplicative, MaxModulus };
  Condition condition = Condition::Imaginary;
  int m = 0;
  int n = 0;
  double margin = 0.0;
};

std::string_view to_string(MomentViolation::Condition c);

struct MembershipReport {
  bool in_Fq = false;
  std::optional<int> in_Fq_i;  // set when the index condition was checked and holds
  int max_exponent = 0;
  double tolerance = 0.0;
  std::optional<MomentViolation> first_violation;  // present iff !in_Fq
  std::optional<MomentViolation> index_violation;  // failure of the max-modulus condition

  bool passed() const noexcept { return in_Fq && (!index_checked || in_Fq_i.has_value()); }
  bool index_checked = false;
};

inline constexpr double kDefaultMomentTolerance = 1e-9;
inline constexpr int kMinimumMomentBound = 16;

// Exponent bound used to certify a function for regions of the given sizes.
int default_moment_bound(std::size_t region_size_total) noexcept;

// Moment conditions (reality, non-negativity, q S_{m+n} >= S_m S_n) for all
// m + n <= max_exponent. The check is run on f / max|f|; membership is
// invariant under positive scaling and this keeps `tol` meaningful at
// high exponents.
MembershipReport check_Fq(const SpinFunction& f, int max_exponent, double tol = kDefaultMomentTolerance);

// check_Fq plus f(i) = max_x |f(x)|.
MembershipReport check_Fq_i(const SpinFunction& f, int i, int max_exponent,
                            double tol = kDefaultMomentTolerance);

// Reality and non-negativity of every S_m only (no supermultiplicativity).
MembershipReport check_real_nonneg_moments(const SpinFunction& f, int max_exponent,
                                           double tol = kDefaultMomentTolerance);

enum class Family { A, B, C };

// A: f(x) = (q-1)/2 - x.  B: f(x) = exp(2 pi i x / q).  C: caller-supplied
// non-negative values bounded by f(0); throws BadFamilyC otherwise.
SpinFunction make_family(Family kind, int q, std::span<const Complex> values = {});

// f(x) -> f(perm(x)) with perm(x) = (x + shift) mod q.
SpinFunction relabel(const SpinFunction& f, int shift);

}  // namespace potts
