#pragma once

#include <stdexcept>
#include <string>

namespace ustat {

enum class ErrorCode {
    invalid_argument,
    invalid_range,
    invalid_delta,
    invalid_constants,
    invalid_config,
    insufficient_sample,
    insufficient_blocks,
    too_many_blocks,
    missing_bound,
    missing_variance,
    missing_truth,
    size_guard,
    budget_exceeded,
    parse_error,
    io_error,
};

// Library-wide error carrying a machine-checkable code next to the message.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& msg) {
    throw Error(code, msg);
}

}  // namespace ustat
