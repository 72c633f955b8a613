#include "ustat/robust.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "ustat/combinatorics.hpp"
#include "ustat/compensated_sum.hpp"
#include "ustat/error.hpp"

namespace ustat {

namespace {

// [begin, end) index ranges; first (n mod V) blocks get the extra element
std::vector<std::pair<std::size_t, std::size_t>> partition_blocks(std::size_t n, int v) {
    const std::size_t blocks = static_cast<std::size_t>(v);
    const std::size_t base = n / blocks;
    const std::size_t extra = n % blocks;
    std::vector<std::pair<std::size_t, std::size_t>> ranges;
    ranges.reserve(blocks);
    std::size_t begin = 0;
    for (std::size_t b = 0; b < blocks; ++b) {
        const std::size_t len = base + (b < extra ? 1 : 0);
        ranges.emplace_back(begin, begin + len);
        begin += len;
    }
    return ranges;
}

// midpoint of the two central order statistics on even counts
double midpoint_median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1) return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

double block_mean(const std::vector<double>& x, std::pair<std::size_t, std::size_t> range) {
    CompensatedSum sum;
    for (std::size_t i = range.first; i < range.second; ++i) sum.add(x[i]);
    return sum.value() / static_cast<double>(range.second - range.first);
}

}  // namespace

BlockCount blocks_from_delta(double delta, std::int64_t n, int m) {
    if (!(delta > 0.0 && delta < 1.0)) {
        fail(ErrorCode::invalid_delta,
             "blocks_from_delta: delta = " + std::to_string(delta) + " outside (0,1)");
    }
    if (m < 1 || n < m) {
        fail(ErrorCode::invalid_config, "blocks_from_delta: requires 1 <= m <= n");
    }
    // tiny nudge so log(1/delta) landing an ulp above an integer still
    // ceilings to that integer (delta = e^-5 must give V = 5)
    const double raw = std::ceil(std::log(1.0 / delta) - 1e-12);
    const std::int64_t lo = std::max<std::int64_t>(1, m);
    const std::int64_t hi = n / m;
    std::int64_t v = static_cast<std::int64_t>(raw);
    BlockCount out;
    out.clamped = v < lo || v > hi;
    out.blocks = static_cast<int>(std::clamp(v, lo, hi));
    return out;
}

BlockCount resolve_block_count(const MoMConfig& cfg, std::int64_t n, int m) {
    if (cfg.blocks && cfg.delta) {
        fail(ErrorCode::invalid_config, "MoM config: set either blocks or delta, not both");
    }
    if (cfg.blocks) {
        const int v = *cfg.blocks;
        if (v < 1) fail(ErrorCode::invalid_config, "MoM config: blocks must be >= 1");
        if (v < m) {
            fail(ErrorCode::insufficient_blocks,
                 "MoM config: needs at least m = " + std::to_string(m) + " blocks, got " +
                     std::to_string(v));
        }
        if (v > n) {
            fail(ErrorCode::too_many_blocks, "MoM config: blocks = " + std::to_string(v) +
                                                 " exceeds sample size " + std::to_string(n));
        }
        return {v, false};
    }
    if (cfg.delta) return blocks_from_delta(*cfg.delta, n, m);
    fail(ErrorCode::invalid_config, "MoM config: either blocks or delta is required");
}

double median_of_means(const Sample& s, const MoMConfig& cfg) {
    const auto [v, clamped] = resolve_block_count(cfg, static_cast<std::int64_t>(s.size()), 1);
    (void)clamped;
    const auto ranges = partition_blocks(s.size(), v);
    std::vector<double> means;
    means.reserve(ranges.size());
    for (const auto& r : ranges) means.push_back(block_mean(s.values(), r));
    return midpoint_median(std::move(means));
}

double mom_u_statistic(const Kernel& k, const Sample& s, const MoMConfig& cfg) {
    if (k.order < 1) fail(ErrorCode::invalid_argument, "mom_u_statistic: kernel order must be >= 1");
    const int m = k.order;
    const std::int64_t n = static_cast<std::int64_t>(s.size());
    const auto [v, clamped] = resolve_block_count(cfg, n, m);
    (void)clamped;

    const auto ranges = partition_blocks(s.size(), v);
    const std::vector<double>& x = s.values();

    // total planned kernel evaluations across all block tuples
    uint128 planned = 0;
    for_each_combination(static_cast<std::size_t>(v), static_cast<std::size_t>(m),
                         [&](std::span<const std::size_t> blocks) {
                             uint128 cross = 1;
                             for (std::size_t b : blocks) {
                                 cross = saturating_mul_u128(
                                     cross, ranges[b].second - ranges[b].first);
                             }
                             if (!k.symmetric) {
                                 cross = saturating_mul_u128(
                                     cross, factorial_u128(static_cast<std::uint64_t>(m)));
                             }
                             const uint128 next = planned + cross;
                             planned = next < planned ? kUint128Max : next;
                         });
    if (planned > cfg.eval_budget) {
        fail(ErrorCode::budget_exceeded,
             "mom_u_statistic: the decoupled cross products need more than " +
                 std::to_string(cfg.eval_budget) + " kernel evaluations");
    }

    std::vector<double> args(static_cast<std::size_t>(m));
    std::vector<std::size_t> cursor(static_cast<std::size_t>(m));

    // exact mean of the kernel over the cross product of an ordered block tuple
    const auto cross_average = [&](std::span<const std::size_t> blocks) {
        CompensatedSum sum;
        std::uint64_t count = 0;
        for (std::size_t j = 0; j < blocks.size(); ++j) cursor[j] = ranges[blocks[j]].first;
        for (;;) {
            for (std::size_t j = 0; j < blocks.size(); ++j) args[j] = x[cursor[j]];
            sum.add(k.fn(args));
            ++count;
            std::size_t j = blocks.size();
            while (j > 0) {
                --j;
                if (++cursor[j] < ranges[blocks[j]].second) break;
                cursor[j] = ranges[blocks[j]].first;
                if (j == 0) return sum.value() / static_cast<double>(count);
            }
        }
    };

    std::vector<double> decoupled;
    decoupled.reserve(static_cast<std::size_t>(
        std::min<uint128>(binomial_u128(static_cast<std::uint64_t>(v),
                                        static_cast<std::uint64_t>(m)),
                          1u << 20)));
    std::vector<std::size_t> ordered(static_cast<std::size_t>(m));
    for_each_combination(static_cast<std::size_t>(v), static_cast<std::size_t>(m),
                         [&](std::span<const std::size_t> blocks) {
                             if (k.symmetric) {
                                 decoupled.push_back(cross_average(blocks));
                                 return;
                             }
                             // average the m! ordered block assignments
                             std::copy(blocks.begin(), blocks.end(), ordered.begin());
                             CompensatedSum sum;
                             std::uint64_t count = 0;
                             do {
                                 sum.add(cross_average(ordered));
                                 ++count;
                             } while (std::next_permutation(ordered.begin(), ordered.end()));
                             decoupled.push_back(sum.value() / static_cast<double>(count));
                         });

    return midpoint_median(std::move(decoupled));
}

}  // namespace ustat
