#include "ustat/ustat_core.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <string>
#include <vector>

#include "ustat/combinatorics.hpp"
#include "ustat/compensated_sum.hpp"
#include "ustat/error.hpp"

namespace ustat {

namespace {

void require_order_fits(const Kernel& k, const Sample& s, const char* op) {
    if (k.order < 1) {
        fail(ErrorCode::invalid_argument, std::string(op) + ": kernel order must be >= 1");
    }
    if (s.size() < static_cast<std::size_t>(k.order)) {
        fail(ErrorCode::insufficient_sample,
             std::string(op) + ": sample size " + std::to_string(s.size()) +
                 " is below kernel order " + std::to_string(k.order));
    }
}

constexpr std::size_t kMaxStackArgs = 8;

}  // namespace

double u_statistic_increasing(const Kernel& k, const Sample& s) {
    require_order_fits(k, s, "u_statistic");
    const std::size_t n = s.size();
    const std::size_t m = static_cast<std::size_t>(k.order);
    const std::vector<double>& x = s.values();

    CompensatedSum sum;
    std::uint64_t count = 0;

    if (m == 2) {
        // tight path for the order-2 kernels the experiments hammer on
        std::array<double, 2> args{};
        for (std::size_t i = 0; i + 1 < n; ++i) {
            args[0] = x[i];
            for (std::size_t j = i + 1; j < n; ++j) {
                args[1] = x[j];
                sum.add(k.fn(args));
                ++count;
            }
        }
    } else {
        std::vector<double> args(m);
        for_each_combination(n, m, [&](std::span<const std::size_t> idx) {
            for (std::size_t j = 0; j < m; ++j) args[j] = x[idx[j]];
            sum.add(k.fn(args));
            ++count;
        });
    }
    return sum.value() / static_cast<double>(count);
}

double u_statistic_ordered(const Kernel& k, const Sample& s) {
    require_order_fits(k, s, "u_statistic");
    const std::size_t n = s.size();
    const std::size_t m = static_cast<std::size_t>(k.order);
    const std::vector<double>& x = s.values();

    CompensatedSum sum;
    std::uint64_t count = 0;
    std::vector<double> args(m);
    for_each_ordered_tuple(n, m, [&](std::span<const std::size_t> idx) {
        for (std::size_t j = 0; j < m; ++j) args[j] = x[idx[j]];
        sum.add(k.fn(args));
        ++count;
    });
    return sum.value() / static_cast<double>(count);
}

double u_statistic(const Kernel& k, const Sample& s) {
    return k.symmetric ? u_statistic_increasing(k, s) : u_statistic_ordered(k, s);
}

BlockEstimate block_estimator(const Kernel& k, const Sample& s) {
    require_order_fits(k, s, "block_estimator");
    const std::size_t m = static_cast<std::size_t>(k.order);
    const std::size_t blocks = s.size() / m;
    const std::vector<double>& x = s.values();

    CompensatedSum sum;
    std::vector<double> args(m);
    for (std::size_t b = 0; b < blocks; ++b) {
        for (std::size_t j = 0; j < m; ++j) args[j] = x[b * m + j];
        sum.add(k.fn(args));
    }
    BlockEstimate est;
    est.value = sum.value() / static_cast<double>(blocks);
    est.blocks = static_cast<std::int64_t>(blocks);
    est.used = static_cast<std::int64_t>(blocks * m);
    return est;
}

double permutation_average(const Kernel& k, const Sample& s) {
    constexpr std::size_t kMaxN = 8;
    if (s.size() > kMaxN) {
        fail(ErrorCode::size_guard, "permutation_average: n = " + std::to_string(s.size()) +
                                        " exceeds the factorial enumeration guard (n <= 8)");
    }
    require_order_fits(k, s, "permutation_average");
    const std::size_t n = s.size();
    const std::size_t m = static_cast<std::size_t>(k.order);
    const std::size_t blocks = n / m;
    const std::vector<double>& x = s.values();

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});

    std::array<double, kMaxStackArgs> args{};
    const std::span<const double> view(args.data(), m);

    CompensatedSum total;
    std::uint64_t count = 0;
    do {
        CompensatedSum block_sum;
        for (std::size_t b = 0; b < blocks; ++b) {
            for (std::size_t j = 0; j < m; ++j) args[j] = x[perm[b * m + j]];
            block_sum.add(k.fn(view));
        }
        total.add(block_sum.value() / static_cast<double>(blocks));
        ++count;
    } while (std::next_permutation(perm.begin(), perm.end()));

    return total.value() / static_cast<double>(count);
}

double k3_statistic(const Sample& s) {
    const std::size_t n = s.size();
    if (n < 3) {
        fail(ErrorCode::insufficient_sample,
             "k3_statistic: needs n >= 3, got " + std::to_string(n));
    }
    CompensatedSum mean_sum;
    for (double v : s.values()) mean_sum.add(v);
    const double mean = mean_sum.value() / static_cast<double>(n);

    CompensatedSum cubes;
    for (double v : s.values()) {
        const double d = v - mean;
        cubes.add(d * d * d);
    }
    const double nd = static_cast<double>(n);
    return nd / ((nd - 1.0) * (nd - 2.0)) * cubes.value();
}

}  // namespace ustat
