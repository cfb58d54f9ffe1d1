#pragma once

#include <cmath>

namespace qmx {

/*!
  Neumaier's variant of Kahan summation.

  Unlike plain Kahan, the correction stays valid when an addend is larger in
  magnitude than the running sum, which is the normal situation for the
  alternating terms of a terminating q-hypergeometric sum.
*/
class CompensatedSum {
 public:
  CompensatedSum() = default;
  explicit CompensatedSum(double initial) : sum_(initial) {}

  CompensatedSum& operator+=(double value) noexcept {
    const double t = sum_ + value;
    if (std::fabs(sum_) >= std::fabs(value)) {
      compensation_ += (sum_ - t) + value;
    } else {
      compensation_ += (value - t) + sum_;
    }
    sum_ = t;
    return *this;
  }

  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace qmx
