#pragma once

#include <cstdint>
#include <optional>

#include "ustat/kernels.hpp"
#include "ustat/sample.hpp"

namespace ustat {

// Block configuration for the median-of-means estimators. Exactly one of
// blocks/delta must be set; with delta, V = ceil(log(1/delta)) clamped into
// the feasible range for the estimator at hand. Partitioning is contiguous
// and in sample order, the first (n mod V) blocks one element larger; medians
// use the midpoint rule on even counts.
struct MoMConfig {
    std::optional<int> blocks;   // explicit V
    std::optional<double> delta;
    std::uint64_t eval_budget = 100'000'000;  // cap on decoupled kernel evaluations
};

struct BlockCount {
    int blocks = 0;
    bool clamped = false;  // true when the delta-driven V hit a range limit
};

// V = ceil(log(1/delta)) clamped into [max(1, m), floor(n/m)]. m = 1 covers
// the plain mean case (range [1, n]).
BlockCount blocks_from_delta(double delta, std::int64_t n, int m);

// Resolves the effective V for a sample of size n and estimator order m,
// validating explicit block counts against [max(1,m), n].
BlockCount resolve_block_count(const MoMConfig& cfg, std::int64_t n, int m);

// Median of the V contiguous block means.
double median_of_means(const Sample& s, const MoMConfig& cfg);

// Median-of-means decoupled U-statistic: for every m-tuple of distinct
// blocks, the exact average of the kernel over the cross product of the
// blocks; the result is the median of those C(V,m) values. Non-symmetric
// kernels average the m! ordered block assignments per tuple.
double mom_u_statistic(const Kernel& k, const Sample& s, const MoMConfig& cfg);

}  // namespace ustat
