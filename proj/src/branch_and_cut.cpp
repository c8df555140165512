#include "scca/exact.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <queue>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace scca {

bool can_bound_subtrees(const Cut& cut, Index n)
{
    const Index N = cut.coeffs.size();
    const Selection origin = to_selection(cut.origin, n, N - n);
    double lowest = std::numeric_limits<double>::infinity();
    for (Index i = 0; i < N; ++i)
        if (!origin[std::size_t(i)])
            lowest = std::min(lowest, cut.coeffs[i]);
    return cut.constant + lowest < 1.0;
}

namespace {

using Clock = std::chrono::steady_clock;

std::string key_of(const Selection& z)
{
    return std::string(z.begin(), z.end());
}

struct NodeOrder {
    // Best bound first, then deeper, then older.
    bool operator()(const BnbNode& a, const BnbNode& b) const
    {
        if (a.bound != b.bound)
            return a.bound < b.bound;
        if (a.depth != b.depth)
            return a.depth < b.depth;
        return a.id > b.id;
    }
};

class BranchAndCut {
public:
    BranchAndCut(const CovarianceInstance& inst, const BranchAndCutOptions& opts)
        : inst_(inst), opts_(opts), budgets_{inst.n(), inst.m(), inst.s1, inst.s2}
    {}

    Certificate run()
    {
        const auto t0 = Clock::now();
        cert_.method = "bnc";
        bigm_ = big_m(inst_, opts_.bigm);
        cert_.bigm = bigm_;

        const auto heur = greedy_local_search(inst_, opts_.local);
        cert_.evaluations += heur.evaluations;
        incumbent_ = heur.solution;
        values_.emplace(key_of(to_selection(incumbent_.supports, n(), m())), incumbent_.value);

        seed_cuts();

        BnbNode root = BnbNode::root(budgets_);
        normalize(root);
        root.bound = 1.0;
        queue_.push(std::move(root));

        double closed_max = -std::numeric_limits<double>::infinity();
        bool stopped = false;
        while (!queue_.empty()) {
            if (opts_.node_limit && cert_.nodes_explored >= opts_.node_limit) {
                cert_.status = Status::NodeLimit;
                stopped = true;
                break;
            }
            if (opts_.time_limit > 0 &&
                std::chrono::duration<double>(Clock::now() - t0).count() >= opts_.time_limit) {
                cert_.status = Status::TimeLimit;
                stopped = true;
                break;
            }
            BnbNode node = queue_.top();
            queue_.pop();
            if (node.bound <= incumbent_.value + opts_.abs_gap_tol) {
                closed_max = std::max(closed_max, node.bound);
                continue;
            }
            ++cert_.nodes_explored;
            closed_max = std::max(closed_max, process(std::move(node)));
        }

        double ub = std::max(incumbent_.value, closed_max);
        if (stopped && !queue_.empty())
            ub = std::max(ub, queue_.top().bound);
        ub = std::min(ub, 1.0);
        ub = std::max(ub, incumbent_.value);
        if (!stopped)
            cert_.status = ub - incumbent_.value <= opts_.abs_gap_tol ? Status::Optimal : Status::GapLimit;

        cert_.incumbent = incumbent_;
        cert_.value = incumbent_.value;
        cert_.upper_bound = ub;
        cert_.gap = ub - incumbent_.value;
        cert_.cut_count = pool_.size();
        if (opts_.keep_cuts)
            cert_.cuts = pool_;
        cert_.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
        return std::move(cert_);
    }

private:
    Index n() const { return inst_.n(); }
    Index m() const { return inst_.m(); }

    double evaluate_selection(const Selection& z)
    {
        const auto key = key_of(z);
        if (auto it = values_.find(key); it != values_.end())
            return it->second;
        ++cert_.evaluations;
        auto sol = subset_value(inst_, to_support(z, n()));
        values_.emplace(key, sol.value);
        if (sol.value > incumbent_.value)
            incumbent_ = std::move(sol);
        return values_[key];
    }

    bool add_cut(const SupportPair& sp, std::optional<double> value)
    {
        if (sp.S1.empty() || sp.S2.empty())
            return false;
        const auto key = key_of(to_selection(sp, n(), m()));
        if (!cut_keys_.insert(key).second)
            return false;
        pool_.push_back(generate_cut(inst_, sp, bigm_, opts_.cut, value));
        if (can_bound_subtrees(pool_.back(), n()))
            bounding_.push_back(pool_.back());
        return true;
    }

    void seed_cuts()
    {
        add_cut(incumbent_.supports, incumbent_.value);

        struct Pair {
            double score;
            Index i, j;
        };
        std::vector<Pair> pairs;
        pairs.reserve(std::size_t(n() * m()));
        for (Index i = 0; i < n(); ++i)
            for (Index j = 0; j < m(); ++j)
                pairs.push_back({singleton_score(inst_, i, j), i, j});
        const std::size_t k = std::min(opts_.singleton_seeds, pairs.size());
        std::partial_sort(pairs.begin(), pairs.begin() + std::ptrdiff_t(k), pairs.end(),
                          [](const Pair& a, const Pair& b) {
                              if (a.score != b.score)
                                  return a.score > b.score;
                              return a.i != b.i ? a.i < b.i : a.j < b.j;
                          });
        for (std::size_t t = 0; t < k; ++t)
            add_cut(SupportPair{{pairs[t].i}, {pairs[t].j}}, pairs[t].score);
    }

    // Fixes free indices whose value is forced: a block at budget excludes its
    // free indices; a block whose free indices all fit takes them, since the
    // subset value is monotone under inclusion.
    void normalize(BnbNode& node) const
    {
        const Index budget[2] = {budgets_.s1, budgets_.s2};
        const Index lo[2] = {0, n()}, hi[2] = {n(), n() + m()};
        for (int k = 0; k < 2; ++k) {
            Index ones = 0, free = 0;
            for (Index i = lo[k]; i < hi[k]; ++i) {
                ones += node.state[std::size_t(i)] == 1;
                free += node.state[std::size_t(i)] < 0;
            }
            if (free == 0)
                continue;
            signed char fill = -1;
            if (ones >= budget[k])
                fill = 0;
            else if (ones + free <= budget[k])
                fill = 1;
            if (fill < 0)
                continue;
            for (Index i = lo[k]; i < hi[k]; ++i)
                if (node.state[std::size_t(i)] < 0)
                    node.state[std::size_t(i)] = fill;
        }
    }

    bool is_leaf(const BnbNode& node) const
    {
        return std::none_of(node.state.begin(), node.state.end(), [](signed char s) { return s < 0; });
    }

    void emit(const BnbNode& node, double parent_bound, double bound) const
    {
        if (opts_.on_node)
            opts_.on_node({node.id, node.parent, parent_bound, bound, incumbent_.value});
    }

    // Returns the node's final bound when it is closed here (leaf or pruned),
    // or -infinity when it was branched.
    double process(BnbNode node)
    {
        const double parent_bound = node.bound;
        const double tol = opts_.abs_gap_tol;

        if (is_leaf(node)) {
            Selection z(node.state.begin(), node.state.end());
            const double f = evaluate_selection(z);
            if (f < parent_bound - tol)
                add_cut(to_support(z, n()), f);
            emit(node, parent_bound, f);
            return f;
        }

        double bound = std::min(parent_bound, 1.0);
        for (std::size_t round = 0;; ++round) {
            const auto mb = master_bound(bounding_, budgets_, node);
            if (mb.infeasible) {
                emit(node, parent_bound, -1.0);
                return -std::numeric_limits<double>::infinity();
            }
            bound = std::min(bound, mb.value);
            if (bound <= incumbent_.value + tol)
                break;
            if (!mb.binding || mb.value >= 1.0 || round >= opts_.max_cut_rounds)
                break;
            const double f = evaluate_selection(mb.argmax);
            if (bound <= incumbent_.value + tol)
                break;
            if (!(f < bound - tol) || !add_cut(to_support(mb.argmax, n()), f))
                break;
        }
        node.bound = bound;
        emit(node, parent_bound, bound);
        if (bound <= incumbent_.value + tol)
            return bound;

        branch(node);
        return -std::numeric_limits<double>::infinity();
    }

    Index branching_index(const BnbNode& node) const
    {
        Index best = -1;
        double best_spread = -1;
        for (std::size_t i = 0; i < node.state.size(); ++i) {
            if (node.state[i] >= 0)
                continue;
            double lo = std::numeric_limits<double>::infinity(), hi = -lo;
            for (const auto& c : bounding_) {
                lo = std::min(lo, c.coeffs[Index(i)]);
                hi = std::max(hi, c.coeffs[Index(i)]);
            }
            const double spread = bounding_.empty() ? 0.0 : hi - lo;
            if (spread > best_spread) {
                best_spread = spread;
                best = Index(i);
            }
        }
        return best;
    }

    void branch(const BnbNode& node)
    {
        const Index k = branching_index(node);
        for (signed char v : {1, 0}) {
            BnbNode child;
            child.state = node.state;
            child.state[std::size_t(k)] = v;
            normalize(child);
            child.depth = node.depth + 1;
            child.id = next_id_++;
            child.parent = node.id;
            child.bound = node.bound;
            if (!bounding_.empty() && !is_leaf(child)) {
                const auto mb = master_bound(bounding_, budgets_, child);
                if (mb.infeasible)
                    continue;
                child.bound = std::min(child.bound, mb.value);
            }
            queue_.push(std::move(child));
        }
    }

    const CovarianceInstance& inst_;
    const BranchAndCutOptions& opts_;
    Budgets budgets_;
    BigM bigm_;
    Certificate cert_;
    ScaSolution incumbent_;
    std::unordered_map<std::string, double> values_;
    std::vector<Cut> pool_;
    std::vector<Cut> bounding_;
    std::unordered_set<std::string> cut_keys_;
    std::priority_queue<BnbNode, std::vector<BnbNode>, NodeOrder> queue_;
    std::size_t next_id_{1};
};

} // namespace

Certificate branch_and_cut(const CovarianceInstance& inst, const BranchAndCutOptions& opts)
{
    return BranchAndCut(inst, opts).run();
}

} // namespace scca
