#include "ustat/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ustat/error.hpp"

namespace ustat {

namespace {

void validate(const BoundQuery& q) {
    if (q.m < 1) fail(ErrorCode::invalid_argument, "bound query: m must be >= 1");
    if (q.n < q.m) fail(ErrorCode::invalid_argument, "bound query: requires m <= n");
    if (q.sup_norm && !(*q.sup_norm >= 0.0)) {
        fail(ErrorCode::invalid_argument, "bound query: sup_norm must be >= 0");
    }
    if (q.variance && !(*q.variance >= 0.0)) {
        fail(ErrorCode::invalid_argument, "bound query: variance must be >= 0");
    }
    if ((q.c1 && !(*q.c1 > 0.0)) || (q.c2 && !(*q.c2 > 0.0))) {
        fail(ErrorCode::invalid_constants, "bound query: c1 and c2 must be positive");
    }
}

// thresholds consume delta; tail evaluation at an explicit t does not
double require_delta(const BoundQuery& q) {
    if (!(q.delta > 0.0 && q.delta < 1.0)) {
        fail(ErrorCode::invalid_delta,
             "bound query: delta = " + std::to_string(q.delta) + " outside (0,1)");
    }
    return q.delta;
}

double require_sup_norm(const BoundQuery& q) {
    if (!q.sup_norm || !std::isfinite(*q.sup_norm)) {
        fail(ErrorCode::missing_bound,
             "bound query: needs a finite sup_norm (wrap the kernel or pass --sup-norm)");
    }
    return *q.sup_norm;
}

double require_variance(const BoundQuery& q) {
    if (!q.variance || !std::isfinite(*q.variance)) {
        fail(ErrorCode::missing_variance, "bound query: needs a finite kernel variance");
    }
    return *q.variance;
}

void require_nonnegative_t(double t) {
    if (!(t >= 0.0)) {
        fail(ErrorCode::invalid_argument, "tail evaluation: t must be >= 0");
    }
}

// Tail values are min(1, 2 e^x); exponents are always <= 0 here, and anything
// below -745 underflows exp, so short-circuit to 0 first.
double clamped_two_exp(double exponent) {
    if (exponent < -745.0) return 0.0;
    return std::min(1.0, 2.0 * std::exp(exponent));
}

double log_two_over(double delta) { return std::log(2.0 / delta); }

}  // namespace

double hoeffding_threshold(const BoundQuery& q) {
    validate(q);
    const double c = require_sup_norm(q);
    const double k = static_cast<double>(q.blocks());
    return c * std::sqrt(2.0 * log_two_over(require_delta(q)) / k);
}

double hoeffding_tail(const BoundQuery& q, double t) {
    validate(q);
    require_nonnegative_t(t);
    const double c = require_sup_norm(q);
    if (c == 0.0) return t > 0.0 ? 0.0 : 1.0;  // constant kernel never deviates
    const double k = static_cast<double>(q.blocks());
    return clamped_two_exp(-t * t * k / (2.0 * c * c));
}

double bernstein_threshold(const BoundQuery& q) {
    validate(q);
    const double c = require_sup_norm(q);
    const double sigma2 = require_variance(q);
    const double k = static_cast<double>(q.blocks());
    const double l = log_two_over(require_delta(q));
    const double a = l * c / (3.0 * k);
    return a + std::sqrt(a * a + 2.0 * sigma2 * l / k);
}

double bernstein_tail(const BoundQuery& q, double t) {
    validate(q);
    require_nonnegative_t(t);
    const double c = require_sup_norm(q);
    const double sigma2 = require_variance(q);
    const double denom = sigma2 + c * t / 3.0;
    if (denom == 0.0) return t > 0.0 ? 0.0 : 1.0;
    const double k = static_cast<double>(q.blocks());
    return clamped_two_exp(-k * t * t / (2.0 * denom));
}

double hoeffding_mgf_bound(double s, double a, double b) {
    if (!(a <= b)) fail(ErrorCode::invalid_range, "hoeffding_mgf_bound: requires a <= b");
    const double w = b - a;
    return std::exp(s * s * w * w / 8.0);
}

double bernstein_mgf_bound(double s, double variance, double c) {
    if (!(c > 0.0)) fail(ErrorCode::invalid_range, "bernstein_mgf_bound: requires c > 0");
    if (!(variance >= 0.0)) {
        fail(ErrorCode::invalid_argument, "bernstein_mgf_bound: variance must be >= 0");
    }
    const double sc = s * c;
    return std::exp(variance / (c * c) * (std::expm1(sc) - sc));
}

namespace {

std::pair<double, double> require_constants(const BoundQuery& q) {
    if (!q.c1 || !q.c2) {
        fail(ErrorCode::invalid_constants,
             "Arcones-Gine bounds: c1 and c2 must be supplied (the paper only asserts their "
             "existence)");
    }
    return {*q.c1, *q.c2};
}

}  // namespace

double arcones_gine_threshold_bounded(const BoundQuery& q) {
    validate(q);
    const double c = require_sup_norm(q);
    const auto [c1, c2] = require_constants(q);
    require_delta(q);
    if (!(c2 / q.delta > 1.0)) {
        fail(ErrorCode::invalid_constants,
             "arcones_gine_threshold_bounded: needs c2/delta > 1 for a positive logarithm");
    }
    const double n = static_cast<double>(q.n);
    return c1 * c * std::pow(std::log(c2 / q.delta) / n, 0.5 * q.m);
}

double arcones_gine_threshold_variance(const BoundQuery& q) {
    validate(q);
    const double c = require_sup_norm(q);
    const double sigma2 = require_variance(q);
    const auto [c1, c2] = require_constants(q);
    require_delta(q);
    if (!(c1 / q.delta > 1.0)) {
        fail(ErrorCode::invalid_constants,
             "arcones_gine_threshold_variance: needs c1/delta > 1 for a positive logarithm");
    }
    const double n = static_cast<double>(q.n);
    const double l = std::log(c1 / q.delta);
    const double first = std::pow(sigma2 * l / (c2 * n), 0.5 * q.m);
    const double second = c / std::sqrt(n) * std::pow(l / c2, 0.5 * (q.m + 1));
    return std::max(first, second);
}

BoundResult evaluate_bound(BoundKind kind, const BoundQuery& q, std::optional<double> tail_at) {
    BoundResult r;
    r.kind = kind;
    switch (kind) {
        case BoundKind::hoeffding:
            if (tail_at) {
                r.tail_probability = hoeffding_tail(q, *tail_at);
            } else {
                r.threshold = hoeffding_threshold(q);
            }
            break;
        case BoundKind::bernstein:
            if (tail_at) {
                r.tail_probability = bernstein_tail(q, *tail_at);
            } else {
                r.threshold = bernstein_threshold(q);
            }
            break;
        case BoundKind::arcones_gine_bounded:
            if (tail_at) {
                fail(ErrorCode::invalid_config,
                     "--tail-at applies to the hoeffding and bernstein bounds only");
            }
            r.threshold = arcones_gine_threshold_bounded(q);
            break;
        case BoundKind::arcones_gine_variance:
            if (tail_at) {
                fail(ErrorCode::invalid_config,
                     "--tail-at applies to the hoeffding and bernstein bounds only");
            }
            r.threshold = arcones_gine_threshold_variance(q);
            break;
    }
    return r;
}

}  // namespace ustat
