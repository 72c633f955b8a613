#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ustat/bounds.hpp"
#include "ustat/distributions.hpp"
#include "ustat/kernels.hpp"
#include "ustat/robust.hpp"

namespace ustat {

enum class EstimatorKind { u_stat, block_v, mom_mean, mom_u };

std::string estimator_name(EstimatorKind kind);

struct McOptions {
    int workers = 0;            // 0 = one worker per hardware thread
    bool allow_prepass = true;  // Monte Carlo prepass when m_h has no closed form
    std::optional<MoMConfig> mom;                // required by the mom_* estimators
    std::optional<double> kernel_mean_override;  // explicit m_h
};

struct DeviationSummary {
    double q50 = 0.0;
    double q90 = 0.0;
    double q99 = 0.0;
    double max = 0.0;
};

struct TrialReport {
    EstimatorKind estimator = EstimatorKind::u_stat;
    std::int64_t n = 0;
    int m = 0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    double t = 0.0;
    double empirical_tail = 0.0;  // fraction of trials with |estimate - m_h| >= t
    std::optional<double> bound_tail;
    DeviationSummary deviations;
    double kernel_mean = 0.0;  // the m_h the deviations are centered on
    bool kernel_mean_estimated = false;
};

// The raw material every experiment shares: |estimate - m_h| for `trials`
// independent samples, sorted ascending. Trial i draws its sample from the
// counter-based stream (seed, i), so the content is identical for any worker
// count.
struct DeviationRun {
    EstimatorKind estimator = EstimatorKind::u_stat;
    std::int64_t n = 0;
    int m = 0;
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    double kernel_mean = 0.0;
    bool kernel_mean_estimated = false;
    std::vector<double> sorted_abs_dev;
};

DeviationRun run_deviations(const Distribution& dist, const Kernel& kernel, EstimatorKind kind,
                            std::int64_t n, std::int64_t trials, std::uint64_t seed,
                            const McOptions& opts = {});

// fraction of deviations >= t (the event uses >=, not >)
double empirical_tail(const DeviationRun& run, double t);

DeviationSummary summarize_deviations(const DeviationRun& run);

// order-statistic quantile: sorted[ceil(q*N) - 1]
double quantile(std::span<const double> sorted_ascending, double q);

TrialReport run_tail_experiment(const Distribution& dist, const Kernel& kernel,
                                EstimatorKind kind, std::int64_t n, std::int64_t trials, double t,
                                std::uint64_t seed, const McOptions& opts = {});

struct RatePoint {
    std::int64_t n = 0;
    double median_abs_dev = 0.0;
};

struct RateReport {
    std::vector<RatePoint> points;
    double slope = 0.0;  // OLS fit of log(median) on log(n); NaN if a median is 0
    double intercept = 0.0;
};

RateReport rate_experiment(const Distribution& dist, const Kernel& kernel,
                           std::span<const std::int64_t> n_grid, std::int64_t trials,
                           std::uint64_t seed, const McOptions& opts = {});

// Probes whether the conditional expectation of the kernel given its first q
// arguments looks constant: draws `probes` fixed prefixes, Monte Carlo
// estimates each conditional mean with `samples` draws, and compares the
// spread of the estimates against 4x the standard error of the extreme pair.
struct DegeneracyReport {
    double max_conditional_spread = 0.0;
    bool is_constant_within_tol = false;
    double pooled_se = 0.0;  // SE of (max estimate - min estimate)
    std::vector<double> probe_means;
    std::vector<double> probe_std_errors;
};

DegeneracyReport check_degeneracy(const Distribution& dist, const Kernel& kernel, int q,
                                  int probes, std::int64_t samples, std::uint64_t seed,
                                  const McOptions& opts = {});

struct VerifyRow {
    double t = 0.0;
    double empirical_tail = 0.0;
    double hoeffding_tail = 0.0;
    double bernstein_tail = 0.0;
};

// The bound-validity experiment behind `ustat verify`: U-statistic deviations
// probed on a 20-point t grid spanning [0, 2 * hoeffding_threshold(delta)].
struct VerifyReport {
    std::vector<VerifyRow> rows;
    BoundQuery query;
    double threshold = 0.0;  // hoeffding_threshold(query); grid end is twice this
    std::int64_t trials = 0;
    std::uint64_t seed = 0;
    double kernel_mean = 0.0;
    bool kernel_mean_estimated = false;
};

VerifyReport run_verify(const Distribution& dist, const Kernel& kernel, std::int64_t n,
                        std::int64_t trials, double delta, std::uint64_t seed,
                        const McOptions& opts = {},
                        std::optional<double> sup_norm_override = std::nullopt,
                        std::optional<double> variance_override = std::nullopt);

std::string verify_csv(const VerifyReport& report);
std::string rate_csv(const RateReport& report);

}  // namespace ustat
