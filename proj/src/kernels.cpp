#include "ustat/kernels.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <utility>

#include "ustat/error.hpp"

namespace ustat {

Kernel variance_kernel() {
    Kernel k;
    k.name = "variance";
    k.order = 2;
    k.symmetric = true;
    k.fn = [](std::span<const double> x) {
        const double d = x[0] - x[1];
        return 0.5 * d * d;
    };
    return k;
}

Kernel product_kernel() {
    Kernel k;
    k.name = "product";
    k.order = 2;
    k.symmetric = true;
    k.fn = [](std::span<const double> x) { return x[0] * x[1]; };
    return k;
}

Kernel bounded_wrap(Kernel k, double lo, double hi) {
    if (!(lo < hi)) {
        fail(ErrorCode::invalid_range, "bounded_wrap: lo must be strictly below hi");
    }
    Kernel wrapped;
    wrapped.name = k.name + "-clipped:" + std::to_string(lo) + ":" + std::to_string(hi);
    wrapped.order = k.order;
    wrapped.symmetric = k.symmetric;
    wrapped.sup_norm = std::max(std::abs(lo), std::abs(hi));
    wrapped.fn = [inner = std::move(k.fn), lo, hi](std::span<const double> x) {
        return std::clamp(inner(x), lo, hi);
    };
    return wrapped;
}

namespace {

double parse_real(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        fail(ErrorCode::parse_error, "kernel name: cannot parse " + std::string(what) + " '" +
                                         std::string(text) + "' as a real");
    }
    return value;
}

}  // namespace

Kernel kernel_from_name(std::string_view name) {
    if (name == "variance") return variance_kernel();
    if (name == "product") return product_kernel();

    constexpr std::string_view prefix = "variance-clipped:";
    if (name.substr(0, prefix.size()) == prefix) {
        const std::string_view rest = name.substr(prefix.size());
        const std::size_t colon = rest.find(':');
        if (colon == std::string_view::npos) {
            fail(ErrorCode::parse_error,
                 "kernel name: expected variance-clipped:<lo>:<hi>, got '" + std::string(name) +
                     "'");
        }
        const double lo = parse_real(rest.substr(0, colon), "lo");
        const double hi = parse_real(rest.substr(colon + 1), "hi");
        Kernel k = bounded_wrap(variance_kernel(), lo, hi);
        k.name = std::string(name);  // keep the user's spelling for echoes
        return k;
    }
    fail(ErrorCode::parse_error, "unknown kernel '" + std::string(name) +
                                     "' (expected variance, product, or "
                                     "variance-clipped:<lo>:<hi>)");
}

}  // namespace ustat
