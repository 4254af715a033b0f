#pragma once

#include <cmath>

namespace stratvar {

/// Neumaier-compensated accumulator. Enumeration sums must stay honest at
/// 1e-12 over supports up to 1e7 terms.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }

  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

}  // namespace stratvar
