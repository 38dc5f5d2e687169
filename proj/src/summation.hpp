#pragma once

// Neumaier compensated summation. Keeps means of long ensembles accurate to a
// few ulps even when terms cancel, so estimators that are algebraically equal
// also agree numerically.

#include <cmath>

namespace mlpit::detail {

class CompensatedSum {
public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            c_ += (sum_ - t) + x;
        } else {
            c_ += (x - t) + sum_;
        }
        sum_ = t;
    }
    double value() const noexcept { return sum_ + c_; }

private:
    double sum_ = 0.0;
    double c_ = 0.0;
};

}  // namespace mlpit::detail
