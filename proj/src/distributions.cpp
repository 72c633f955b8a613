#include "ustat/distributions.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <vector>

#include "ustat/error.hpp"

namespace ustat {

namespace {

// Marsaglia-Tsang squeeze for Gamma(shape, 1), shape >= 1. Rejection runs on
// the caller's stream, so draw counts vary but stay reproducible per seed.
double gamma_shape_ge1(rng::SplitMix64& g, double shape) {
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z = g.normal();
        double v = 1.0 + c * z;
        if (v <= 0.0) continue;
        v = v * v * v;
        const double u = g.uniform01_positive();
        if (std::log(u) < 0.5 * z * z + d - d * v + d * std::log(v)) return d * v;
    }
}

double gamma_draw(rng::SplitMix64& g, double shape) {
    if (shape >= 1.0) return gamma_shape_ge1(g, shape);
    // boost: Gamma(a) = Gamma(a+1) * U^(1/a)
    const double boosted = gamma_shape_ge1(g, shape + 1.0);
    return boosted * std::pow(g.uniform01_positive(), 1.0 / shape);
}

}  // namespace

Distribution Distribution::uniform(double a, double b) {
    if (!(a < b)) fail(ErrorCode::invalid_config, "uniform distribution: requires a < b");
    Distribution d;
    d.kind = DistKind::uniform;
    d.p1 = a;
    d.p2 = b;
    d.known_mean = 0.5 * (a + b);
    return d;
}

Distribution Distribution::normal(double mu, double sigma) {
    if (!(sigma > 0.0)) fail(ErrorCode::invalid_config, "normal distribution: requires sigma > 0");
    Distribution d;
    d.kind = DistKind::normal;
    d.p1 = mu;
    d.p2 = sigma;
    d.known_mean = mu;
    return d;
}

Distribution Distribution::pareto(double alpha, double x_min) {
    if (!(alpha > 0.0) || !(x_min > 0.0)) {
        fail(ErrorCode::invalid_config, "pareto distribution: requires alpha > 0 and x_min > 0");
    }
    Distribution d;
    d.kind = DistKind::pareto;
    d.p1 = alpha;
    d.p2 = x_min;
    if (alpha > 1.0) d.known_mean = alpha * x_min / (alpha - 1.0);
    return d;
}

Distribution Distribution::student_t(double nu) {
    if (!(nu > 0.0)) fail(ErrorCode::invalid_config, "student_t distribution: requires nu > 0");
    Distribution d;
    d.kind = DistKind::student_t;
    d.p1 = nu;
    d.p2 = 0.0;
    if (nu > 1.0) d.known_mean = 0.0;
    return d;
}

double pareto_quantile(double alpha, double x_min, double u) {
    return x_min * std::pow(u, -1.0 / alpha);
}

double Distribution::draw(rng::SplitMix64& g) const {
    switch (kind) {
        case DistKind::uniform:
            return p1 + (p2 - p1) * g.uniform01();
        case DistKind::normal:
            return p1 + p2 * g.normal();
        case DistKind::pareto:
            return pareto_quantile(p1, p2, g.uniform01_positive());
        case DistKind::student_t: {
            const double z = g.normal();
            const double chi2 = 2.0 * gamma_draw(g, 0.5 * p1);
            return z / std::sqrt(chi2 / p1);
        }
    }
    fail(ErrorCode::invalid_config, "draw: unknown distribution kind");
}

Sample Distribution::sample(std::size_t n, std::uint64_t stream_seed) const {
    rng::SplitMix64 g(stream_seed);
    std::vector<double> values;
    values.reserve(n);
    for (std::size_t i = 0; i < n; ++i) values.push_back(draw(g));
    return Sample(std::move(values));
}

std::optional<double> Distribution::mean() const {
    return known_mean;
}

std::optional<double> Distribution::variance() const {
    switch (kind) {
        case DistKind::uniform:
            return (p2 - p1) * (p2 - p1) / 12.0;
        case DistKind::normal:
            return p2 * p2;
        case DistKind::pareto:
            if (p1 > 2.0) {
                return p1 * p2 * p2 / ((p1 - 1.0) * (p1 - 1.0) * (p1 - 2.0));
            }
            return std::nullopt;
        case DistKind::student_t:
            if (p1 > 2.0) return p1 / (p1 - 2.0);
            return std::nullopt;
    }
    return std::nullopt;
}

std::string Distribution::spec_string() const {
    const auto fmt = [](double v) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "%g", v);
        return std::string(buf);
    };
    switch (kind) {
        case DistKind::uniform:
            return "uniform:" + fmt(p1) + ":" + fmt(p2);
        case DistKind::normal:
            return "normal:" + fmt(p1) + ":" + fmt(p2);
        case DistKind::pareto:
            return "pareto:" + fmt(p1) + ":" + fmt(p2);
        case DistKind::student_t:
            return "t:" + fmt(p1);
    }
    return {};
}

namespace {

double parse_real_field(std::string_view text, std::string_view what) {
    double value = 0.0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (ec != std::errc{} || ptr != end) {
        fail(ErrorCode::parse_error, "distribution spec: cannot parse " + std::string(what) +
                                         " '" + std::string(text) + "' as a real");
    }
    return value;
}

std::vector<std::string_view> split_fields(std::string_view spec) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= spec.size(); ++i) {
        if (i == spec.size() || spec[i] == ':') {
            out.push_back(spec.substr(start, i - start));
            start = i + 1;
        }
    }
    return out;
}

}  // namespace

Distribution parse_distribution(std::string_view spec) {
    const auto fields = split_fields(spec);
    const std::string_view name = fields.empty() ? std::string_view{} : fields[0];
    const auto expect = [&](std::size_t params) {
        if (fields.size() != params + 1) {
            fail(ErrorCode::parse_error, "distribution spec '" + std::string(spec) + "': " +
                                             std::string(name) + " takes " +
                                             std::to_string(params) + " parameter(s)");
        }
    };
    if (name == "uniform") {
        expect(2);
        return Distribution::uniform(parse_real_field(fields[1], "a"),
                                     parse_real_field(fields[2], "b"));
    }
    if (name == "normal") {
        expect(2);
        return Distribution::normal(parse_real_field(fields[1], "mu"),
                                    parse_real_field(fields[2], "sigma"));
    }
    if (name == "pareto") {
        expect(2);
        return Distribution::pareto(parse_real_field(fields[1], "alpha"),
                                    parse_real_field(fields[2], "xmin"));
    }
    if (name == "t") {
        expect(1);
        return Distribution::student_t(parse_real_field(fields[1], "nu"));
    }
    fail(ErrorCode::parse_error,
         "unknown distribution '" + std::string(spec) +
             "' (expected uniform:a:b, normal:mu:sigma, pareto:alpha:xmin, or t:nu)");
}

namespace {

// fourth central moment, when finite
std::optional<double> central_m4(const Distribution& d) {
    switch (d.kind) {
        case DistKind::uniform: {
            const double w = d.p2 - d.p1;
            return w * w * w * w / 80.0;
        }
        case DistKind::normal: {
            const double s2 = d.p2 * d.p2;
            return 3.0 * s2 * s2;
        }
        case DistKind::pareto:
        case DistKind::student_t:
            return std::nullopt;  // not needed by the built-in pairings
    }
    return std::nullopt;
}

struct ClipSpec {
    double lo = 0.0;
    double hi = 0.0;
};

// recognizes "variance-clipped:<lo>:<hi>" kernel names
std::optional<ClipSpec> parse_clipped_variance(std::string_view name) {
    constexpr std::string_view prefix = "variance-clipped:";
    if (name.substr(0, prefix.size()) != prefix) return std::nullopt;
    const auto fields = split_fields(name.substr(prefix.size()));
    if (fields.size() != 2) return std::nullopt;
    ClipSpec c;
    c.lo = parse_real_field(fields[0], "lo");
    c.hi = parse_real_field(fields[1], "hi");
    return c;
}

// The clip is a no-op when the kernel's range over the distribution's support
// already sits inside [lo, hi]; only the uniform law has bounded support.
bool clip_inactive(const Distribution& d, const ClipSpec& c) {
    if (d.kind != DistKind::uniform) return false;
    const double w = d.p2 - d.p1;
    const double kernel_max = 0.5 * w * w;
    return c.lo <= 0.0 && c.hi >= kernel_max;
}

}  // namespace

std::optional<double> analytic_kernel_mean(const Distribution& d, const Kernel& k) {
    if (k.name == "variance") return d.variance();
    if (k.name == "product") {
        if (const auto mu = d.mean()) return (*mu) * (*mu);
        return std::nullopt;
    }
    if (const auto clip = parse_clipped_variance(k.name)) {
        if (clip_inactive(d, *clip)) return d.variance();
    }
    return std::nullopt;
}

std::optional<double> analytic_kernel_variance(const Distribution& d, const Kernel& k) {
    const bool clipped_inactive = [&] {
        const auto clip = parse_clipped_variance(k.name);
        return clip && clip_inactive(d, *clip);
    }();
    if (k.name == "variance" || clipped_inactive) {
        // Var((X-Y)^2/2) = m4/2 + m2^2/2 for iid X, Y
        const auto m2 = d.variance();
        const auto m4 = central_m4(d);
        if (m2 && m4) return 0.5 * (*m4) + 0.5 * (*m2) * (*m2);
        return std::nullopt;
    }
    if (k.name == "product") {
        // Var(XY) = (E X^2)^2 - mu^4 for iid X, Y
        const auto mu = d.mean();
        const auto var = d.variance();
        if (mu && var) {
            const double ex2 = *var + (*mu) * (*mu);
            const double mu2 = (*mu) * (*mu);
            return ex2 * ex2 - mu2 * mu2;
        }
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace ustat
