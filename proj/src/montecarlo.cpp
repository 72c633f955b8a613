#include "ustat/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "ustat/compensated_sum.hpp"
#include "ustat/error.hpp"
#include "ustat/format.hpp"
#include "ustat/parallel.hpp"
#include "ustat/rng.hpp"
#include "ustat/ustat_core.hpp"

namespace ustat {

namespace {

// Stream index layout for one master seed. Trial streams use the trial index
// directly (trials stay below 2^32), auxiliary streams live far above.
constexpr std::uint64_t kRateStreamBase = 1ull << 60;
constexpr std::uint64_t kDegeneracyStreamBase = 1ull << 61;
constexpr std::uint64_t kPrepassStream = 1ull << 62;

// Enforces the sup_norm contract while the harness drives the kernel: a
// declared bound that the data violates is a hard error, not a warning.
Kernel checked_kernel(const Kernel& kernel) {
    if (!kernel.sup_norm) return kernel;
    Kernel checked = kernel;
    checked.fn = [inner = kernel.fn, c = *kernel.sup_norm,
                  name = kernel.name](std::span<const double> args) {
        const double v = inner(args);
        if (std::abs(v) > c) {
            fail(ErrorCode::invalid_argument,
                 "kernel '" + name + "' produced |h| = " + std::to_string(std::abs(v)) +
                     " above its declared sup_norm " + std::to_string(c));
        }
        return v;
    };
    return checked;
}

double prepass_kernel_mean(const Distribution& dist, const Kernel& kernel, std::int64_t trials,
                           std::uint64_t seed) {
    const std::int64_t tuples = std::max<std::int64_t>(100 * trials, 1000);
    rng::SplitMix64 g(rng::stream_seed(seed, kPrepassStream));
    const std::size_t m = static_cast<std::size_t>(kernel.order);
    std::vector<double> args(m);
    CompensatedSum sum;
    for (std::int64_t i = 0; i < tuples; ++i) {
        for (std::size_t j = 0; j < m; ++j) args[j] = dist.draw(g);
        sum.add(kernel.fn(args));
    }
    return sum.value() / static_cast<double>(tuples);
}

struct KernelMean {
    double value = 0.0;
    bool estimated = false;
};

KernelMean resolve_kernel_mean(const Distribution& dist, const Kernel& kernel,
                               std::int64_t trials, std::uint64_t seed, const McOptions& opts) {
    if (opts.kernel_mean_override) return {*opts.kernel_mean_override, false};
    if (dist.known_kernel_mean) return {*dist.known_kernel_mean, false};
    if (const auto analytic = analytic_kernel_mean(dist, kernel)) return {*analytic, false};
    if (!opts.allow_prepass) {
        fail(ErrorCode::missing_truth,
             "kernel mean m_h is not known in closed form for kernel '" + kernel.name +
                 "' on " + dist.spec_string() + " and the prepass is disabled");
    }
    return {prepass_kernel_mean(dist, kernel, trials, seed), true};
}

int estimator_order(EstimatorKind kind, const Kernel& kernel) {
    return kind == EstimatorKind::mom_mean ? 1 : kernel.order;
}

}  // namespace

std::string estimator_name(EstimatorKind kind) {
    switch (kind) {
        case EstimatorKind::u_stat: return "u_stat";
        case EstimatorKind::block_v: return "block_v";
        case EstimatorKind::mom_mean: return "mom_mean";
        case EstimatorKind::mom_u: return "mom_u";
    }
    return "unknown";
}

DeviationRun run_deviations(const Distribution& dist, const Kernel& kernel, EstimatorKind kind,
                            std::int64_t n, std::int64_t trials, std::uint64_t seed,
                            const McOptions& opts) {
    if (trials < 1) fail(ErrorCode::invalid_config, "run_deviations: trials must be >= 1");
    if (n < 1) fail(ErrorCode::invalid_config, "run_deviations: n must be >= 1");
    if ((kind == EstimatorKind::mom_mean || kind == EstimatorKind::mom_u) && !opts.mom) {
        fail(ErrorCode::invalid_config,
             "run_deviations: the mom_* estimators need McOptions::mom");
    }

    const Kernel checked = checked_kernel(kernel);
    const KernelMean mh = resolve_kernel_mean(dist, kernel, trials, seed, opts);

    std::vector<double> devs(static_cast<std::size_t>(trials));
    parallel_for_index(static_cast<std::uint64_t>(trials), opts.workers, [&](std::uint64_t i) {
        const Sample s = dist.sample(static_cast<std::size_t>(n), rng::stream_seed(seed, i));
        double estimate = 0.0;
        switch (kind) {
            case EstimatorKind::u_stat: estimate = u_statistic(checked, s); break;
            case EstimatorKind::block_v: estimate = block_estimator(checked, s).value; break;
            case EstimatorKind::mom_mean: estimate = median_of_means(s, *opts.mom); break;
            case EstimatorKind::mom_u: estimate = mom_u_statistic(checked, s, *opts.mom); break;
        }
        devs[i] = std::abs(estimate - mh.value);
    });
    std::sort(devs.begin(), devs.end());

    DeviationRun run;
    run.estimator = kind;
    run.n = n;
    run.m = estimator_order(kind, kernel);
    run.trials = trials;
    run.seed = seed;
    run.kernel_mean = mh.value;
    run.kernel_mean_estimated = mh.estimated;
    run.sorted_abs_dev = std::move(devs);
    return run;
}

double quantile(std::span<const double> sorted_ascending, double q) {
    const std::size_t n = sorted_ascending.size();
    if (n == 0) return 0.0;
    const double pos = std::ceil(q * static_cast<double>(n)) - 1.0;
    const std::size_t idx =
        static_cast<std::size_t>(std::clamp(pos, 0.0, static_cast<double>(n - 1)));
    return sorted_ascending[idx];
}

double empirical_tail(const DeviationRun& run, double t) {
    const auto& devs = run.sorted_abs_dev;
    const auto first = std::lower_bound(devs.begin(), devs.end(), t);
    return static_cast<double>(devs.end() - first) / static_cast<double>(devs.size());
}

DeviationSummary summarize_deviations(const DeviationRun& run) {
    DeviationSummary s;
    s.q50 = quantile(run.sorted_abs_dev, 0.5);
    s.q90 = quantile(run.sorted_abs_dev, 0.9);
    s.q99 = quantile(run.sorted_abs_dev, 0.99);
    s.max = run.sorted_abs_dev.back();
    return s;
}

TrialReport run_tail_experiment(const Distribution& dist, const Kernel& kernel,
                                EstimatorKind kind, std::int64_t n, std::int64_t trials, double t,
                                std::uint64_t seed, const McOptions& opts) {
    if (!(t >= 0.0)) fail(ErrorCode::invalid_argument, "run_tail_experiment: t must be >= 0");
    const DeviationRun run = run_deviations(dist, kernel, kind, n, trials, seed, opts);

    TrialReport report;
    report.estimator = kind;
    report.n = n;
    report.m = run.m;
    report.trials = trials;
    report.seed = seed;
    report.t = t;
    report.empirical_tail = empirical_tail(run, t);
    report.deviations = summarize_deviations(run);
    report.kernel_mean = run.kernel_mean;
    report.kernel_mean_estimated = run.kernel_mean_estimated;
    if (kernel.sup_norm && (kind == EstimatorKind::u_stat || kind == EstimatorKind::block_v)) {
        BoundQuery q;
        q.n = n;
        q.m = run.m;
        q.sup_norm = kernel.sup_norm;
        report.bound_tail = hoeffding_tail(q, t);
    }
    return report;
}

RateReport rate_experiment(const Distribution& dist, const Kernel& kernel,
                           std::span<const std::int64_t> n_grid, std::int64_t trials,
                           std::uint64_t seed, const McOptions& opts) {
    if (n_grid.empty()) fail(ErrorCode::invalid_config, "rate_experiment: empty n grid");
    for (std::size_t i = 0; i < n_grid.size(); ++i) {
        if (n_grid[i] < kernel.order) {
            fail(ErrorCode::invalid_config, "rate_experiment: grid entry " +
                                                std::to_string(n_grid[i]) +
                                                " is below the kernel order");
        }
        if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
            fail(ErrorCode::invalid_config, "rate_experiment: n grid must be strictly increasing");
        }
    }

    RateReport report;
    report.points.reserve(n_grid.size());
    for (std::size_t gi = 0; gi < n_grid.size(); ++gi) {
        const std::uint64_t sub_seed = rng::stream_seed(seed, kRateStreamBase + gi);
        const DeviationRun run = run_deviations(dist, kernel, EstimatorKind::u_stat, n_grid[gi],
                                                trials, sub_seed, opts);
        report.points.push_back({n_grid[gi], quantile(run.sorted_abs_dev, 0.5)});
    }

    // OLS of log(median) on log(n)
    bool fit_ok = true;
    for (const auto& p : report.points) fit_ok = fit_ok && p.median_abs_dev > 0.0;
    if (!fit_ok || report.points.size() < 2) {
        report.slope = std::numeric_limits<double>::quiet_NaN();
        report.intercept = std::numeric_limits<double>::quiet_NaN();
        return report;
    }
    CompensatedSum sx, sy, sxx, sxy;
    for (const auto& p : report.points) {
        const double lx = std::log(static_cast<double>(p.n));
        const double ly = std::log(p.median_abs_dev);
        sx.add(lx);
        sy.add(ly);
        sxx.add(lx * lx);
        sxy.add(lx * ly);
    }
    const double cnt = static_cast<double>(report.points.size());
    const double mx = sx.value() / cnt;
    const double my = sy.value() / cnt;
    report.slope = (sxy.value() - cnt * mx * my) / (sxx.value() - cnt * mx * mx);
    report.intercept = my - report.slope * mx;
    return report;
}

DegeneracyReport check_degeneracy(const Distribution& dist, const Kernel& kernel, int q,
                                  int probes, std::int64_t samples, std::uint64_t seed,
                                  const McOptions& opts) {
    if (q < 1 || q >= kernel.order) {
        fail(ErrorCode::invalid_config,
             "check_degeneracy: q must satisfy 1 <= q < m (m = " + std::to_string(kernel.order) +
                 ")");
    }
    if (probes < 2) fail(ErrorCode::invalid_config, "check_degeneracy: needs at least 2 probes");
    if (samples < 2) fail(ErrorCode::invalid_config, "check_degeneracy: needs samples >= 2");

    const Kernel checked = checked_kernel(kernel);
    const std::size_t m = static_cast<std::size_t>(kernel.order);
    const std::size_t prefix = static_cast<std::size_t>(q);

    std::vector<double> means(static_cast<std::size_t>(probes));
    std::vector<double> ses(static_cast<std::size_t>(probes));
    parallel_for_index(static_cast<std::uint64_t>(probes), opts.workers, [&](std::uint64_t p) {
        rng::SplitMix64 coord_rng(rng::stream_seed(seed, kDegeneracyStreamBase + 2 * p));
        rng::SplitMix64 tail_rng(rng::stream_seed(seed, kDegeneracyStreamBase + 2 * p + 1));
        std::vector<double> args(m);
        for (std::size_t j = 0; j < prefix; ++j) args[j] = dist.draw(coord_rng);

        // Welford over the conditional Monte Carlo draws
        double mean = 0.0;
        double m2 = 0.0;
        for (std::int64_t s = 0; s < samples; ++s) {
            for (std::size_t j = prefix; j < m; ++j) args[j] = dist.draw(tail_rng);
            const double v = checked.fn(args);
            const double d = v - mean;
            mean += d / static_cast<double>(s + 1);
            m2 += d * (v - mean);
        }
        means[p] = mean;
        const double var = m2 / static_cast<double>(samples - 1);
        ses[p] = std::sqrt(std::max(var, 0.0) / static_cast<double>(samples));
    });

    const auto lo = std::min_element(means.begin(), means.end());
    const auto hi = std::max_element(means.begin(), means.end());
    const double se_lo = ses[static_cast<std::size_t>(lo - means.begin())];
    const double se_hi = ses[static_cast<std::size_t>(hi - means.begin())];

    DegeneracyReport report;
    report.max_conditional_spread = *hi - *lo;
    report.pooled_se = std::sqrt(se_lo * se_lo + se_hi * se_hi);
    report.is_constant_within_tol = report.max_conditional_spread <= 4.0 * report.pooled_se;
    report.probe_means = std::move(means);
    report.probe_std_errors = std::move(ses);
    return report;
}

VerifyReport run_verify(const Distribution& dist, const Kernel& kernel, std::int64_t n,
                        std::int64_t trials, double delta, std::uint64_t seed,
                        const McOptions& opts, std::optional<double> sup_norm_override,
                        std::optional<double> variance_override) {
    BoundQuery q;
    q.n = n;
    q.m = kernel.order;
    q.delta = delta;
    q.sup_norm = sup_norm_override ? sup_norm_override : kernel.sup_norm;
    if (!q.sup_norm) {
        fail(ErrorCode::missing_bound, "verify: kernel '" + kernel.name +
                                           "' has no sup_norm; clip it "
                                           "(variance-clipped:<lo>:<hi>) or pass --sup-norm");
    }
    q.variance = variance_override ? variance_override : analytic_kernel_variance(dist, kernel);
    if (!q.variance) {
        fail(ErrorCode::missing_variance,
             "verify: kernel variance is not known in closed form for kernel '" + kernel.name +
                 "' on " + dist.spec_string() + "; pass --variance");
    }

    VerifyReport report;
    report.query = q;
    report.threshold = hoeffding_threshold(q);
    report.trials = trials;
    report.seed = seed;

    const DeviationRun run =
        run_deviations(dist, kernel, EstimatorKind::u_stat, n, trials, seed, opts);
    report.kernel_mean = run.kernel_mean;
    report.kernel_mean_estimated = run.kernel_mean_estimated;

    constexpr int kGridPoints = 20;
    report.rows.reserve(kGridPoints);
    for (int i = 0; i < kGridPoints; ++i) {
        VerifyRow row;
        row.t = 2.0 * report.threshold * static_cast<double>(i) /
                static_cast<double>(kGridPoints - 1);
        row.empirical_tail = empirical_tail(run, row.t);
        row.hoeffding_tail = hoeffding_tail(q, row.t);
        row.bernstein_tail = bernstein_tail(q, row.t);
        report.rows.push_back(row);
    }
    return report;
}

std::string verify_csv(const VerifyReport& report) {
    std::string out = "t,empirical_tail,hoeffding_tail,bernstein_tail\n";
    for (const auto& row : report.rows) {
        out += format_g15(row.t);
        out += ',';
        out += format_g15(row.empirical_tail);
        out += ',';
        out += format_g15(row.hoeffding_tail);
        out += ',';
        out += format_g15(row.bernstein_tail);
        out += '\n';
    }
    return out;
}

std::string rate_csv(const RateReport& report) {
    std::string out = "n,median_abs_dev\n";
    for (const auto& p : report.points) {
        out += std::to_string(p.n);
        out += ',';
        out += format_g15(p.median_abs_dev);
        out += '\n';
    }
    out += "# slope=";
    out += format_g15(report.slope);
    out += '\n';
    return out;
}

}  // namespace ustat
