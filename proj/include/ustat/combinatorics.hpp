#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace ustat {

using uint128 = unsigned __int128;

inline constexpr uint128 kUint128Max = ~uint128{0};

constexpr uint128 saturating_mul_u128(uint128 a, uint128 b) noexcept {
    if (a != 0 && b > kUint128Max / a) return kUint128Max;
    return a * b;
}

// C(n, m) with saturation at 2^128-1; used for enumeration guards and
// evaluation budgets, never for the actual averaging divisor.
constexpr uint128 binomial_u128(std::uint64_t n, std::uint64_t m) noexcept {
    if (m > n) return 0;
    if (m > n - m) m = n - m;
    uint128 c = 1;
    for (std::uint64_t i = 1; i <= m; ++i) {
        const uint128 num = saturating_mul_u128(c, n - m + i);
        if (num == kUint128Max) return kUint128Max;
        c = num / i;  // exact at every step for unsaturated values
    }
    return c;
}

constexpr uint128 factorial_u128(std::uint64_t n) noexcept {
    uint128 f = 1;
    for (std::uint64_t i = 2; i <= n; ++i) f = saturating_mul_u128(f, i);
    return f;
}

// Visits every increasing m-tuple of indices in [0, n) in lexicographic
// order. fn receives a span of m indices valid only during the call.
// O(m) state, no recursion.
template <typename Fn>
void for_each_combination(std::size_t n, std::size_t m, Fn&& fn) {
    if (m == 0 || m > n) return;
    std::vector<std::size_t> idx(m);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    const std::span<const std::size_t> view(idx);
    for (;;) {
        fn(view);
        // advance: find rightmost index that can still move up
        std::size_t i = m;
        while (i > 0) {
            --i;
            if (idx[i] != i + n - m) {
                ++idx[i];
                for (std::size_t j = i + 1; j < m; ++j) idx[j] = idx[j - 1] + 1;
                break;
            }
            if (i == 0) return;
        }
    }
}

// Visits every ordered m-tuple of distinct indices in [0, n): each increasing
// tuple in all of its m! argument orders.
template <typename Fn>
void for_each_ordered_tuple(std::size_t n, std::size_t m, Fn&& fn) {
    if (m == 0 || m > n) return;
    std::vector<std::size_t> perm(m);
    for_each_combination(n, m, [&](std::span<const std::size_t> combo) {
        std::copy(combo.begin(), combo.end(), perm.begin());
        const std::span<const std::size_t> view(perm);
        do {
            fn(view);
        } while (std::next_permutation(perm.begin(), perm.end()));
    });
}

}  // namespace ustat
