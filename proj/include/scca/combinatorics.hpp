#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/Core>

namespace scca {

/// C(n, k) as a double (exact up to 2^53).
inline double binomial(Eigen::Index n, Eigen::Index k)
{
    if (k < 0 || k > n)
        return 0.0;
    k = std::min(k, n - k);
    double out = 1.0;
    for (Eigen::Index i = 1; i <= k; ++i)
        out = out * double(n - k + i) / double(i);
    return std::round(out);
}

/// Calls f(combo) for each k-subset of [0, n) in lexicographic order; stops
/// early when f returns false. Returns false if stopped early.
template <typename F>
bool for_each_combination(Eigen::Index n, Eigen::Index k, F&& f)
{
    if (k < 0 || k > n)
        return true;
    std::vector<Eigen::Index> c(k);
    std::iota(c.begin(), c.end(), Eigen::Index{0});
    while (true) {
        if (!f(static_cast<const std::vector<Eigen::Index>&>(c)))
            return false;
        Eigen::Index i = k - 1;
        while (i >= 0 && c[i] == n - k + i)
            --i;
        if (i < 0)
            return true;
        ++c[i];
        for (Eigen::Index j = i + 1; j < k; ++j)
            c[j] = c[j - 1] + 1;
    }
}

/// All k-subsets of [0, n) in lexicographic order.
inline std::vector<std::vector<Eigen::Index>> combinations(Eigen::Index n, Eigen::Index k)
{
    std::vector<std::vector<Eigen::Index>> out;
    for_each_combination(n, k, [&](const auto& c) {
        out.push_back(c);
        return true;
    });
    return out;
}

} // namespace scca
