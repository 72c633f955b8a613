#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "ustat/kernels.hpp"
#include "ustat/rng.hpp"
#include "ustat/sample.hpp"

namespace ustat {

enum class DistKind { uniform, normal, pareto, student_t };

// A sampling law plus whatever population truth is known in closed form.
// known_mean is filled at construction when the mean exists;
// known_kernel_mean can be set by callers that know m_h for a paired kernel.
struct Distribution {
    DistKind kind = DistKind::uniform;
    double p1 = 0.0;  // uniform: a   normal: mu     pareto: alpha  student_t: nu
    double p2 = 1.0;  // uniform: b   normal: sigma  pareto: x_min  (unused)
    std::optional<double> known_mean;
    std::optional<double> known_kernel_mean;

    static Distribution uniform(double a, double b);
    static Distribution normal(double mu, double sigma);
    static Distribution pareto(double alpha, double x_min);
    static Distribution student_t(double nu);

    double draw(rng::SplitMix64& g) const;
    Sample sample(std::size_t n, std::uint64_t stream_seed) const;

    std::optional<double> mean() const;      // population mean, when finite
    std::optional<double> variance() const;  // population variance, when finite
    std::string spec_string() const;         // "uniform:0:1" etc.
};

// Parses "uniform:a:b | normal:mu:sigma | pareto:alpha:xmin | t:nu".
Distribution parse_distribution(std::string_view spec);

// Pareto inverse CDF on u in (0, 1]: x_min * u^(-1/alpha); u = 1 gives x_min.
double pareto_quantile(double alpha, double x_min, double u);

// Closed-form E h(X_1,...,X_m) / Var h(X_1,...,X_m) for the built-in kernel
// and distribution pairs where it exists; nullopt means "not known here" and
// callers fall back to a Monte Carlo prepass (for the mean) or must supply a
// value (for the variance).
std::optional<double> analytic_kernel_mean(const Distribution& d, const Kernel& k);
std::optional<double> analytic_kernel_variance(const Distribution& d, const Kernel& k);

}  // namespace ustat
