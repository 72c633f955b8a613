#pragma once

#include <cmath>

namespace ustat {

// Kahan-Babuska-Neumaier compensated accumulator. Unlike plain Kahan it also
// compensates when the incoming term is larger than the running sum, which is
// the common case when averaging many same-scale kernel values.
class CompensatedSum {
  public:
    void add(double x) noexcept {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) {
            comp_ += (sum_ - t) + x;
        } else {
            comp_ += (x - t) + sum_;
        }
        sum_ = t;
    }

    CompensatedSum& operator+=(double x) noexcept {
        add(x);
        return *this;
    }

    double value() const noexcept { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

}  // namespace ustat
