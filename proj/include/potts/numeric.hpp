#pragma once

#include <cmath>
#include <complex>

namespace potts {

using Complex = std::complex<double>;

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
  }

  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Componentwise compensated sum of complex values.
class ComplexCompensatedSum {
 public:
  void add(Complex value) noexcept {
    re_.add(value.real());
    im_.add(value.imag());
  }

  Complex value() const noexcept { return {re_.value(), im_.value()}; }

 private:
  CompensatedSum re_;
  CompensatedSum im_;
};

// z^m by repeated multiplication, with z^0 = 1 for every z (including 0).
inline Complex int_pow(Complex z, int m) noexcept {
  Complex r{1.0, 0.0};
  for (int i = 0; i < m; ++i) r *= z;
  return r;
}

}  // namespace potts
