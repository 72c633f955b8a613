#pragma once

#include <cstdint>

#include "ustat/kernels.hpp"
#include "ustat/sample.hpp"

namespace ustat {

// The disjoint-block statistic V: kernel averaged over k = floor(n/m)
// consecutive blocks taken in sample order.
struct BlockEstimate {
    double value = 0.0;
    std::int64_t blocks = 0;  // k = floor(n/m), >= 1
    std::int64_t used = 0;    // k*m observations consumed; the rest is ignored
};

// Exact U-statistic: the kernel averaged over all increasing m-tuples of
// distinct observations (symmetric kernels), or over all ordered m-tuples of
// distinct indices (non-symmetric kernels). Both forms agree when the kernel
// is symmetric.
double u_statistic(const Kernel& k, const Sample& s);

double u_statistic_increasing(const Kernel& k, const Sample& s);
double u_statistic_ordered(const Kernel& k, const Sample& s);

BlockEstimate block_estimator(const Kernel& k, const Sample& s);

// Exact average of block_estimator over all n! sample permutations. Test
// oracle for the identity U_n = mean over permutations of V; guarded to
// n <= 8 (40320 permutations).
double permutation_average(const Kernel& k, const Sample& s);

// Third k-statistic n/((n-1)(n-2)) * sum (X_i - mean)^3, the unbiased
// estimator of the third cumulant. Requires n >= 3.
double k3_statistic(const Sample& s);

}  // namespace ustat
