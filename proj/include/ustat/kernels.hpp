#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace ustat {

// An order-m real-valued kernel plus the metadata the bound evaluators need.
// Kernels are pure deterministic functions, immutable after construction and
// safe to evaluate from concurrent workers.
struct Kernel {
    std::string name;
    int order = 0;                   // number of arguments, m >= 1
    bool symmetric = false;          // invariant under argument permutation
    std::optional<double> sup_norm;  // known a.s. bound on |h|, when one exists
    std::function<double(std::span<const double>)> fn;

    double operator()(std::span<const double> args) const { return fn(args); }
};

// h(x, y) = (x - y)^2 / 2; the sample-variance kernel. Unbounded on the reals,
// so it carries no sup_norm; wrap it with bounded_wrap to use Hoeffding-type
// bounds.
Kernel variance_kernel();

// h(x, y) = x * y; degenerate (canonical) for centered data.
Kernel product_kernel();

// Clips the wrapped kernel's output into [lo, hi], which certifies
// sup_norm = max(|lo|, |hi|).
Kernel bounded_wrap(Kernel k, double lo, double hi);

// Resolves a CLI kernel name: "variance", "product", or
// "variance-clipped:<lo>:<hi>".
Kernel kernel_from_name(std::string_view name);

}  // namespace ustat
