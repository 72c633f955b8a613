#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ustat/error.hpp"

namespace ustat {

// Ordered finite sequence of real observations. Construction rejects empty
// input and non-finite values, so downstream code never re-checks.
class Sample {
  public:
    explicit Sample(std::vector<double> values) : values_(std::move(values)) {
        if (values_.empty()) {
            fail(ErrorCode::insufficient_sample, "sample must contain at least one observation");
        }
        for (std::size_t i = 0; i < values_.size(); ++i) {
            if (!std::isfinite(values_[i])) {
                fail(ErrorCode::invalid_argument,
                     "sample value at position " + std::to_string(i + 1) + " is not finite");
            }
        }
    }

    Sample(std::initializer_list<double> values) : Sample(std::vector<double>(values)) {}

    std::size_t size() const noexcept { return values_.size(); }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    const std::vector<double>& values() const noexcept { return values_; }
    std::span<const double> span() const noexcept { return values_; }

  private:
    std::vector<double> values_;
};

}  // namespace ustat
