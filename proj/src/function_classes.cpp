#include "potts/function_classes.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "potts/error.hpp"

namespace potts {

std::string_view to_string(MomentViolation::Condition c) {
  switch (c) {
    case MomentViolation::Condition::Imaginary: return "imaginary";
    case MomentViolation::Condition::Negative: return "negative";
    case MomentViolation::Condition::Supermultiplicative: return "supermultiplicative";
    case MomentViolation::Condition::MaxModulus: return "max_modulus";
  }
  return "unknown";
}

MomentTable moments(const SpinFunction& f, int max_exponent) {
  if (max_exponent < 0) throw Error(ErrorCode::BadInput, "moment bound must be non-negative");
  MomentTable table;
  table.q = f.q();
  table.max_exponent = max_exponent;
  std::vector<ComplexCompensatedSum> sums(static_cast<std::size_t>(max_exponent) + 1);
  for (const Complex& z : f.values()) {
    Complex power{1.0, 0.0};
    for (int m = 0; m <= max_exponent; ++m) {
      sums[static_cast<std::size_t>(m)].add(power);
      power *= z;
    }
  }
  table.sums.reserve(sums.size());
  for (const auto& s : sums) table.sums.push_back(s.value());
  return table;
}

int default_moment_bound(std::size_t region_size_total) noexcept {
  return std::max(2 * static_cast<int>(region_size_total), kMinimumMomentBound);
}

namespace {

SpinFunction normalized(const SpinFunction& f) {
  const double scale = f.max_modulus();
  if (scale == 0.0) return f;
  std::vector<Complex> values(f.values().begin(), f.values().end());
  for (auto& z : values) z /= scale;
  return SpinFunction(std::move(values));
}

// Scans degrees in increasing order so the reported violation is the one
// of lowest total exponent.
MembershipReport check_moments(const SpinFunction& f, int max_exponent, double tol,
                               bool supermultiplicative) {
  if (max_exponent < 1) throw Error(ErrorCode::BadInput, "moment bound must be at least 1");
  MembershipReport report;
  report.max_exponent = max_exponent;
  report.tolerance = tol;
  const MomentTable table = moments(normalized(f), max_exponent);
  const double q = static_cast<double>(table.q);

  auto fail = [&](MomentViolation::Condition c, int m, int n, double margin) {
    report.in_Fq = false;
    report.first_violation = MomentViolation{c, m, n, margin};
    return report;
  };

  for (int d = 0; d <= max_exponent; ++d) {
    const Complex s = table[d];
    if (std::abs(s.imag()) > tol) return fail(MomentViolation::Condition::Imaginary, d, 0, -std::abs(s.imag()));
    if (s.real() < -tol) return fail(MomentViolation::Condition::Negative, d, 0, s.real());
    if (!supermultiplicative) continue;
    for (int m = 0; 2 * m <= d; ++m) {
      const int n = d - m;
      const double margin = q * s.real() - table[m].real() * table[n].real();
      if (margin < -tol) return fail(MomentViolation::Condition::Supermultiplicative, m, n, margin);
    }
  }
  report.in_Fq = true;
  return report;
}

}  // namespace

MembershipReport check_Fq(const SpinFunction& f, int max_exponent, double tol) {
  return check_moments(f, max_exponent, tol, true);
}

MembershipReport check_real_nonneg_moments(const SpinFunction& f, int max_exponent, double tol) {
  return check_moments(f, max_exponent, tol, false);
}

MembershipReport check_Fq_i(const SpinFunction& f, int i, int max_exponent, double tol) {
  if (i < 0 || i >= f.q()) throw Error(ErrorCode::BadInput, "state index out of range");
  MembershipReport report = check_Fq(f, max_exponent, tol);
  report.index_checked = true;
  const Complex fi = f(i);
  const double margin = std::min(fi.real() - f.max_modulus(), -std::abs(fi.imag()));
  if (margin < -tol) {
    report.index_violation = MomentViolation{MomentViolation::Condition::MaxModulus, i, 0, margin};
  } else if (report.in_Fq) {
    report.in_Fq_i = i;
  }
  return report;
}

SpinFunction make_family(Family kind, int q, std::span<const Complex> values) {
  if (q < 2) throw Error(ErrorCode::BadQ, "q must be at least 2");
  std::vector<Complex> table(static_cast<std::size_t>(q));
  switch (kind) {
    case Family::A:
      for (int x = 0; x < q; ++x) table[static_cast<std::size_t>(x)] = 0.5 * (q - 1) - x;
      break;
    case Family::B:
      // Exact values at the quarter turns; std::polar leaves ~1e-16 residue there.
      for (int x = 0; x < q; ++x) {
        const int k = (4 * x) % q == 0 ? (4 * x) / q : -1;
        static constexpr Complex kQuarter[] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
        table[static_cast<std::size_t>(x)] =
            k >= 0 ? kQuarter[k] : std::polar(1.0, 2.0 * std::numbers::pi * x / q);
      }
      break;
    case Family::C: {
      if (values.size() != static_cast<std::size_t>(q)) {
        throw Error(ErrorCode::BadFamilyC, "family C needs exactly q values");
      }
      const double f0 = values[0].real();
      for (int x = 0; x < q; ++x) {
        const Complex z = values[static_cast<std::size_t>(x)];
        if (z.imag() != 0.0 || !(z.real() >= 0.0) || z.real() > f0) {
          throw Error(ErrorCode::BadFamilyC, "values must be real, non-negative and at most f(0)");
        }
        table[static_cast<std::size_t>(x)] = z;
      }
      break;
    }
  }
  return SpinFunction(std::move(table));
}

SpinFunction relabel(const SpinFunction& f, int shift) {
  const int q = f.q();
  std::vector<Complex> values(static_cast<std::size_t>(q));
  for (int x = 0; x < q; ++x) {
    values[static_cast<std::size_t>(x)] = f(((x + shift) % q + q) % q);
  }
  return SpinFunction(std::move(values));
}

}  // namespace potts
