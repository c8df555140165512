#pragma once

#include <cstddef>
#include <vector>

#include "scca/cca.hpp"

namespace scca {

struct TraceEntry {
    std::size_t iteration{0};
    SupportPair supports;
    double value{0};
};

struct HeuristicResult {
    ScaSolution solution;
    std::vector<TraceEntry> trace;
    std::size_t evaluations{0};
};

/// Candidates scoring within this of the best are tied; the smallest index wins.
inline constexpr double kTieTol = 1e-12;

/// Forward selection: seed with the best singleton pair, then alternately add
/// the row index and the column index that most increase the subset value
/// until both budgets are used.
HeuristicResult greedy(const CovarianceInstance& inst);

struct LocalSearchOptions {
    bool best_improvement = false;
    double swap_tol = 1e-10;
    std::size_t max_passes = 100000;
};

/// Swap local search from `init` (full-budget supports). Each pass tries all
/// swaps of S1 against [n]\S1, then of S2 against [m]\S2; repeats until a
/// pass accepts nothing.
HeuristicResult local_search(const CovarianceInstance& inst, const SupportPair& init,
                             const LocalSearchOptions& opts = {});

/// local_search seeded with greedy; evaluation counts are summed.
HeuristicResult greedy_local_search(const CovarianceInstance& inst, const LocalSearchOptions& opts = {});

/// |A_ij| * sqrt(B_ii^+) * sqrt(C_jj^+), the subset value of a singleton pair.
double singleton_score(const CovarianceInstance& inst, Index i, Index j);

} // namespace scca
