#include "scca/heuristics.hpp"

#include <algorithm>

namespace scca {

namespace {

IndexSet sorted(IndexSet s)
{
    std::sort(s.begin(), s.end());
    return s;
}

IndexSet with_index(const IndexSet& s, Index i)
{
    IndexSet out = s;
    out.insert(std::lower_bound(out.begin(), out.end(), i), i);
    return out;
}

bool contains(const IndexSet& s, Index i)
{
    return std::find(s.begin(), s.end(), i) != s.end();
}

double pinv_scalar(double d)
{
    const double thr = kDefaultRankTol * std::max(1.0, std::abs(d));
    return std::abs(d) > thr ? 1.0 / d : 0.0;
}

class Evaluator {
public:
    explicit Evaluator(const CovarianceInstance& inst) : inst_(inst) {}

    double operator()(const IndexSet& S1, const IndexSet& S2)
    {
        ++count;
        return subset_value(inst_, SupportPair{S1, S2}).value;
    }

    std::size_t count{0};

private:
    const CovarianceInstance& inst_;
};

} // namespace

double singleton_score(const CovarianceInstance& inst, Index i, Index j)
{
    const double b = pinv_scalar(inst.B(i, i));
    const double c = pinv_scalar(inst.C(j, j));
    return std::abs(inst.A(i, j)) * std::sqrt(std::max(b, 0.0)) * std::sqrt(std::max(c, 0.0));
}

HeuristicResult greedy(const CovarianceInstance& inst)
{
    HeuristicResult res;
    Evaluator eval(inst);
    const Index n = inst.n(), m = inst.m();

    Index bi = 0, bj = 0;
    double best = -1;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < m; ++j) {
            const double s = singleton_score(inst, i, j);
            if (s > best + kTieTol) {
                best = s;
                bi = i;
                bj = j;
            }
        }
    eval.count += std::size_t(n * m);

    IndexSet S1{bi}, S2{bj};
    std::size_t iteration = 0;
    res.trace.push_back({iteration, {S1, S2}, best});

    auto grow_x = [&] {
        Index arg = -1;
        double top = -1;
        for (Index i = 0; i < n; ++i) {
            if (contains(S1, i))
                continue;
            const double v = eval(with_index(S1, i), S2);
            if (v > top + kTieTol) {
                top = v;
                arg = i;
            }
        }
        S1 = with_index(S1, arg);
        res.trace.push_back({++iteration, {S1, S2}, top});
    };
    auto grow_y = [&] {
        Index arg = -1;
        double top = -1;
        for (Index j = 0; j < m; ++j) {
            if (contains(S2, j))
                continue;
            const double v = eval(S1, with_index(S2, j));
            if (v > top + kTieTol) {
                top = v;
                arg = j;
            }
        }
        S2 = with_index(S2, arg);
        res.trace.push_back({++iteration, {S1, S2}, top});
    };

    const Index s1 = inst.s1, s2 = inst.s2;
    for (Index step = 2; step <= std::max(s1, s2); ++step) {
        if (step <= std::min(s1, s2)) {
            grow_x();
            grow_y();
        } else if (s1 <= s2) {
            grow_y();
        } else {
            grow_x();
        }
    }

    res.solution = subset_value(inst, {S1, S2});
    res.evaluations = eval.count + 1;
    return res;
}

HeuristicResult local_search(const CovarianceInstance& inst, const SupportPair& init,
                             const LocalSearchOptions& opts)
{
    HeuristicResult res;
    Evaluator eval(inst);
    const Index n = inst.n(), m = inst.m();

    // Positions are kept in the initial order; swaps overwrite in place.
    IndexSet S1 = init.S1, S2 = init.S2;
    double current = eval(sorted(S1), sorted(S2));
    std::size_t iteration = 0;
    res.trace.push_back({iteration, {sorted(S1), sorted(S2)}, current});

    auto record = [&] { res.trace.push_back({++iteration, {sorted(S1), sorted(S2)}, current}); };

    // One sweep over one block. `set` is swapped against [0, dim) \ set.
    auto sweep = [&](IndexSet& set, Index dim, bool first_block) {
        bool improved = false;
        auto value_with = [&](std::size_t p, Index j) {
            IndexSet cand = set;
            cand[p] = j;
            return first_block ? eval(sorted(cand), sorted(S2)) : eval(sorted(S1), sorted(cand));
        };
        if (!opts.best_improvement) {
            for (std::size_t p = 0; p < set.size(); ++p)
                for (Index j = 0; j < dim; ++j) {
                    if (contains(set, j))
                        continue;
                    const double v = value_with(p, j);
                    if (v > current + opts.swap_tol) {
                        set[p] = j;
                        current = v;
                        improved = true;
                        record();
                    }
                }
        } else {
            std::size_t bp = 0;
            Index bj = -1;
            double top = current + opts.swap_tol;
            for (std::size_t p = 0; p < set.size(); ++p)
                for (Index j = 0; j < dim; ++j) {
                    if (contains(set, j))
                        continue;
                    const double v = value_with(p, j);
                    if (v > top + kTieTol || (bj < 0 && v > top)) {
                        top = v;
                        bp = p;
                        bj = j;
                    }
                }
            if (bj >= 0) {
                set[bp] = bj;
                current = top;
                improved = true;
                record();
            }
        }
        return improved;
    };

    for (std::size_t pass = 0; pass < opts.max_passes; ++pass) {
        const bool gx = sweep(S1, n, true);
        const bool gy = sweep(S2, m, false);
        if (!gx && !gy)
            break;
    }

    res.solution = subset_value(inst, {sorted(S1), sorted(S2)});
    res.evaluations = eval.count + 1;
    return res;
}

HeuristicResult greedy_local_search(const CovarianceInstance& inst, const LocalSearchOptions& opts)
{
    const auto g = greedy(inst);
    auto ls = local_search(inst, g.solution.supports, opts);
    ls.evaluations += g.evaluations;
    return ls;
}

} // namespace scca
