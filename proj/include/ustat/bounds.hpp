#pragma once

#include <cstdint>
#include <optional>

namespace ustat {

// Inputs shared by the bound evaluators. sup_norm/variance/c1/c2 are optional
// because each bound needs a different subset; evaluators reject queries
// missing what they need instead of inventing defaults.
struct BoundQuery {
    std::int64_t n = 0;  // sample size
    int m = 0;           // kernel order, 1 <= m <= n
    double delta = 0.0;  // confidence parameter, in (0,1)
    std::optional<double> sup_norm;  // ||h||_inf
    std::optional<double> variance;  // Var h(X_1,...,X_m)
    std::optional<double> c1;        // Arcones-Gine constants, caller-supplied
    std::optional<double> c2;

    std::int64_t blocks() const noexcept { return m > 0 ? n / m : 0; }
};

enum class BoundKind { hoeffding, bernstein, arcones_gine_bounded, arcones_gine_variance };

struct BoundResult {
    BoundKind kind = BoundKind::hoeffding;
    std::optional<double> threshold;         // t(delta), >= 0
    std::optional<double> tail_probability;  // clamped into [0,1]
};

// Deviation threshold t with hoeffding_tail(q, t) = delta:
// ||h||_inf * sqrt(2 log(2/delta) / k), k = floor(n/m).
double hoeffding_threshold(const BoundQuery& q);

// P(|U_n - m_h| >= t) <= min(1, 2 exp(-t^2 k / (2 ||h||_inf^2))).
double hoeffding_tail(const BoundQuery& q, double t);

// Deviation threshold t with bernstein_tail(q, t) = delta:
// L c/(3k) + sqrt((L c/(3k))^2 + 2 sigma^2 L / k), L = log(2/delta),
// c = ||h||_inf.
double bernstein_threshold(const BoundQuery& q);

// P(|U_n - m_h| >= t) <= min(1, 2 exp(-k t^2 / (2 (sigma^2 + ||h||_inf t/3)))).
double bernstein_tail(const BoundQuery& q, double t);

// MGF bound for X in [a,b]: E[e^{s(X-mu)}] <= exp(s^2 (b-a)^2 / 8).
double hoeffding_mgf_bound(double s, double a, double b);

// MGF bound for |X-mu| < c: E[e^{s(X-mu)}] <= exp(sigma^2/c^2 (e^{sc}-1-sc)).
double bernstein_mgf_bound(double s, double variance, double c);

// Canonical-kernel threshold c1 ||h||_inf (log(c2/delta)/n)^{m/2}; the
// constants c1, c2 are existence constants the caller must supply.
double arcones_gine_threshold_bounded(const BoundQuery& q);

// Variance-form canonical threshold:
// max((sigma^2 log(c1/delta)/(c2 n))^{m/2},
//     ||h||_inf/sqrt(n) (log(c1/delta)/c2)^{(m+1)/2}).
double arcones_gine_threshold_variance(const BoundQuery& q);

// CLI-facing dispatcher; evaluates the threshold, or the tail when tail_at is
// set (tail evaluation applies to the hoeffding/bernstein kinds only).
BoundResult evaluate_bound(BoundKind kind, const BoundQuery& q, std::optional<double> tail_at);

}  // namespace ustat
