#include "scca/lowrank.hpp"

#include <algorithm>
#include <chrono>
#include <future>
#include <limits>
#include <numeric>

#include "scca/combinatorics.hpp"
#include "scca/errors.hpp"

namespace scca {

const char* to_string(ReductionCase c)
{
    switch (c) {
    case ReductionCase::BothRedundant: return "both-redundant";
    case ReductionCase::XOnly: return "x-only";
    case ReductionCase::YOnly: return "y-only";
    case ReductionCase::None: return "none";
    }
    return "?";
}

const char* to_string(RankOneMethod m)
{
    switch (m) {
    case RankOneMethod::Brute: return "brute";
    case RankOneMethod::GreedyLocal: return "greedy+local";
    case RankOneMethod::BranchBound: return "branch-bound";
    }
    return "?";
}

RankProfile rank_profile(const CovarianceInstance& inst, double rank_tol)
{
    RankProfile p;
    p.r = numeric_rank(inst.B, rank_tol);
    p.rhat = numeric_rank(inst.C, rank_tol);
    const bool x_free = inst.s1 >= p.r;
    const bool y_free = inst.s2 >= p.rhat;
    if (x_free && y_free)
        p.reduction = ReductionCase::BothRedundant;
    else if (x_free)
        p.reduction = ReductionCase::XOnly;
    else if (y_free)
        p.reduction = ReductionCase::YOnly;
    return p;
}

CovarianceInstance drop_redundant_budgets(const CovarianceInstance& inst, const RankProfile& profile)
{
    CovarianceInstance out = inst;
    if (profile.reduction == ReductionCase::BothRedundant || profile.reduction == ReductionCase::XOnly)
        out.s1 = inst.n();
    if (profile.reduction == ReductionCase::BothRedundant || profile.reduction == ReductionCase::YOnly)
        out.s2 = inst.m();
    return out;
}

namespace {

IndexSet nonzeros(const Vector& x)
{
    IndexSet s;
    for (Index i = 0; i < x.size(); ++i)
        if (x[i] != 0.0)
            s.push_back(i);
    return s;
}

} // namespace

Certificate solve_reduced(const CovarianceInstance& inst, const RankProfile& profile)
{
    if (profile.reduction != ReductionCase::BothRedundant)
        throw InvalidConfig("solve_reduced needs both budgets to be redundant");
    const auto t0 = std::chrono::steady_clock::now();
    const auto cca = cca_value(inst.B, inst.A, inst.C);

    const auto sx = sparsify(cca.x, inst.B, inst.A);
    const auto sy = sparsify(cca.y, inst.C, Matrix(inst.A.transpose()));
    if (!sx.ok)
        warn("sparsify x: " + sx.message);
    if (!sy.ok)
        warn("sparsify y: " + sy.message);

    Certificate cert;
    cert.method = "cca";
    cert.reduction = to_string(profile.reduction);
    ScaSolution& sol = cert.incumbent;
    sol.x = sx.x;
    sol.y = sy.x;
    sol.supports = {nonzeros(sol.x), nonzeros(sol.y)};
    sol.value = sol.x.dot(inst.A * sol.y);
    sol.xBx = sol.x.dot(inst.B * sol.x);
    sol.yCy = sol.y.dot(inst.C * sol.y);
    sol.within_budget = Index(sol.supports.S1.size()) <= inst.s1 && Index(sol.supports.S2.size()) <= inst.s2;
    cert.value = sol.value;
    cert.upper_bound = cca.value;
    cert.gap = std::max(0.0, cca.value - sol.value);
    cert.status = Status::Optimal;
    cert.evaluations = 1;
    cert.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cert;
}

void sparsify_to_budgets(const CovarianceInstance& inst, ScaSolution& sol)
{
    if (Index(sol.supports.S1.size()) > inst.s1) {
        const auto sx = sparsify(sol.x, inst.B, inst.A);
        if (!sx.ok)
            warn("sparsify x: " + sx.message);
        sol.x = sx.x;
    }
    if (Index(sol.supports.S2.size()) > inst.s2) {
        const auto sy = sparsify(sol.y, inst.C, Matrix(inst.A.transpose()));
        if (!sy.ok)
            warn("sparsify y: " + sy.message);
        sol.y = sy.x;
    }
    sol.supports = {nonzeros(sol.x), nonzeros(sol.y)};
    sol.value = sol.x.dot(inst.A * sol.y);
    sol.xBx = sol.x.dot(inst.B * sol.x);
    sol.yCy = sol.y.dot(inst.C * sol.y);
    sol.within_budget = Index(sol.supports.S1.size()) <= inst.s1 && Index(sol.supports.S2.size()) <= inst.s2;
}

RankOneFactors leading_rank_one(const Matrix& A)
{
    const auto t = sigma_max(A);
    RankOneFactors f;
    f.a = t.value * t.left;
    f.b = t.right;
    // Fix the sign by the largest-magnitude entry of b.
    Index k = 0;
    if (f.b.size() > 0)
        f.b.cwiseAbs().maxCoeff(&k);
    if (f.b.size() > 0 && f.b[k] < 0) {
        f.a = -f.a;
        f.b = -f.b;
    }
    f.residual = (A - f.a * f.b.transpose()).norm();
    return f;
}

std::optional<RankOneFactors> rank_one_factors(const Matrix& A, double tol)
{
    auto f = leading_rank_one(A);
    if (f.residual <= tol * A.norm())
        return f;
    return std::nullopt;
}

namespace {

constexpr double kConsistencyTol = 1e-6;

IndexSet iota_set(Index n)
{
    IndexSet s(static_cast<std::size_t>(n));
    std::iota(s.begin(), s.end(), Index{0});
    return s;
}

// a_S^T B_SS^+ a_S with the range check; also returns B_SS^+ a_S.
double quad_pinv(const Vector& a, const Matrix& B, const IndexSet& S, Vector* w = nullptr)
{
    const Matrix Bs = B(S, S);
    const Vector as = a(S);
    const Matrix P = pinv(Bs);
    const Vector ws = P * as;
    const double resid = (as - Bs * ws).norm();
    if (resid > kConsistencyTol * std::max(1.0, as.norm()))
        throw InconsistentSubproblem("a_S has a component outside the range of B_SS (residual " +
                                     std::to_string(resid) + ")");
    if (w)
        *w = ws;
    return std::max(0.0, as.dot(ws));
}

class SubsetQuadratic {
public:
    SubsetQuadratic(const Vector& a, const Matrix& B, Index s, SubsetLimits limits = {})
        : a_(a), B_(B), n_(a.size()), s_(std::min(s, a.size())), limits_(limits)
    {}

    // Smallest eigenvalue of B; bounds that of every principal submatrix.
    void prepare_bounds() { mu_ = n_ > 0 ? std::max(0.0, sym_eig(B_).values.minCoeff()) : 0.0; }

    double g(const IndexSet& S)
    {
        ++evaluations;
        if (S.empty())
            return 0.0;
        return quad_pinv(a_, B_, S);
    }

    SubsetQuadraticResult brute()
    {
        const double total = binomial(n_, s_);
        if (total > 1e7)
            throw EnumerationTooLarge("subset enumeration needs " + std::to_string(total) + " evaluations");
        SubsetQuadraticResult out;
        out.value = -1;
        for_each_combination(n_, s_, [&](const IndexSet& S) {
            const double v = g(S);
            if (v > out.value + kTieTol) {
                out.value = v;
                out.support = S;
            }
            return true;
        });
        out.value = out.upper_bound = std::sqrt(std::max(0.0, out.value));
        out.evaluations = evaluations;
        return out;
    }

    // Forward selection then first-improvement swaps.
    SubsetQuadraticResult greedy_local()
    {
        IndexSet S;
        double cur = 0;
        std::vector<char> in(std::size_t(n_), 0);
        while (Index(S.size()) < s_) {
            Index arg = -1;
            double top = -1;
            for (Index i = 0; i < n_; ++i) {
                if (in[std::size_t(i)])
                    continue;
                const double v = g(with(S, i));
                if (v > top + kTieTol) {
                    top = v;
                    arg = i;
                }
            }
            S = with(S, arg);
            in[std::size_t(arg)] = 1;
            cur = top;
        }
        bool improved = true;
        while (improved) {
            improved = false;
            for (std::size_t p = 0; p < S.size(); ++p)
                for (Index j = 0; j < n_; ++j) {
                    if (in[std::size_t(j)])
                        continue;
                    IndexSet cand = S;
                    cand[p] = j;
                    std::sort(cand.begin(), cand.end());
                    const double v = g(cand);
                    if (v > cur * (1 + 1e-12) + 1e-14) {
                        in[std::size_t(S[p])] = 0;
                        in[std::size_t(j)] = 1;
                        S = cand;
                        cur = v;
                        improved = true;
                    }
                }
        }
        SubsetQuadraticResult out;
        out.value = out.upper_bound = std::sqrt(std::max(0.0, cur));
        out.support = S;
        out.evaluations = evaluations;
        return out;
    }

    SubsetQuadraticResult branch_bound()
    {
        const auto t0 = std::chrono::steady_clock::now();
        prepare_bounds();
        auto best = greedy_local();
        double inc = best.value;

        struct Node {
            std::vector<signed char> state; // -1 free, 0 out, 1 in
            double bound;
        };
        std::vector<Node> stack;
        stack.push_back({std::vector<signed char>(std::size_t(n_), -1), root_bound()});
        std::size_t nodes = 0;

        auto prunable = [&](double bound) { return bound <= inc * (1 + 1e-12) + 1e-14; };

        while (!stack.empty()) {
            if ((limits_.node_limit > 0 && nodes >= limits_.node_limit) ||
                (limits_.time_limit > 0 && (nodes & 63) == 0 &&
                 std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() >= limits_.time_limit)) {
                best.complete = false;
                break;
            }
            Node node = std::move(stack.back());
            stack.pop_back();
            if (prunable(node.bound))
                continue;
            ++nodes;

            IndexSet U, ones;
            for (Index i = 0; i < n_; ++i) {
                if (node.state[std::size_t(i)] != 0)
                    U.push_back(i);
                if (node.state[std::size_t(i)] == 1)
                    ones.push_back(i);
            }
            if (Index(ones.size()) > s_)
                continue;
            if (Index(U.size()) <= s_ || Index(ones.size()) == s_) {
                const IndexSet& leaf = Index(U.size()) <= s_ ? U : ones;
                const double v = std::sqrt(g(leaf));
                if (v > inc + kTieTol || (v > inc && leaf < best.support)) {
                    inc = v;
                    best.value = v;
                    best.support = leaf;
                }
                continue;
            }

            // Bound at U and the exact value lost by dropping each free index.
            ++evaluations;
            const Matrix Bu = B_(U, U);
            const Vector au = a_(U);
            Eigen::LLT<Matrix> llt(Bu);
            const bool pd = llt.info() == Eigen::Success && llt.rcond() > 1e-12;
            double gu;
            Vector w, drop = Vector::Zero(Index(U.size()));
            if (pd) {
                const Matrix P = llt.solve(Matrix::Identity(Bu.rows(), Bu.cols()));
                w = P * au;
                gu = std::max(0.0, au.dot(w));
                for (Index t = 0; t < Index(U.size()); ++t)
                    drop[t] = w[t] * w[t] / P(t, t);
            } else {
                gu = quad_pinv(a_, B_, U, &w);
                drop = w.cwiseAbs();
            }

            // At least r = |U| - s free indices must leave U. Removing a set R
            // costs w_R^T (P_RR)^-1 w_R >= mu ||w_R||^2, and at least the
            // single-index drop of each member.
            std::vector<Index> free_pos;
            for (Index t = 0; t < Index(U.size()); ++t)
                if (node.state[std::size_t(U[std::size_t(t)])] < 0)
                    free_pos.push_back(t);
            const std::size_t r = U.size() - std::size_t(s_);
            std::vector<double> w2(free_pos.size()), d(free_pos.size());
            for (std::size_t q = 0; q < free_pos.size(); ++q) {
                w2[q] = mu_ * w[free_pos[q]] * w[free_pos[q]];
                d[q] = drop[free_pos[q]];
            }
            std::vector<double> w2_sorted = w2, d_sorted = d;
            std::sort(w2_sorted.begin(), w2_sorted.end());
            std::sort(d_sorted.begin(), d_sorted.end());
            std::vector<double> prefix(w2_sorted.size() + 1, 0.0);
            for (std::size_t q = 0; q < w2_sorted.size(); ++q)
                prefix[q + 1] = prefix[q] + w2_sorted[q];

            double least_drop = 0;
            if (pd)
                least_drop = std::max(prefix[r], d_sorted[r - 1]);
            const double bound = std::min(node.bound, std::sqrt(std::max(0.0, gu - least_drop)));
            if (prunable(bound))
                continue;

            std::vector<signed char> state = node.state;
            Index fixed = 0;
            if (pd) {
                // Sum of the k smallest scaled w^2 over the free indices other than q.
                auto smallest_without = [&](std::size_t k, std::size_t q) {
                    if (k == 0)
                        return 0.0;
                    return w2[q] <= w2_sorted[k - 1] ? prefix[k + 1] - w2[q] : prefix[k];
                };
                for (std::size_t q = 0; q < free_pos.size(); ++q) {
                    const Index i = U[std::size_t(free_pos[q])];
                    // Excluding i: the removal set holds i and r - 1 others.
                    const double out_drop = std::max(d[q], w2[q] + smallest_without(r - 1, q));
                    if (prunable(std::sqrt(std::max(0.0, gu - out_drop)))) {
                        state[std::size_t(i)] = 1;
                        ++fixed;
                        continue;
                    }
                    // Including i: r others must leave.
                    if (r < free_pos.size() && prunable(std::sqrt(std::max(0.0, gu - smallest_without(r, q))))) {
                        state[std::size_t(i)] = 0;
                        ++fixed;
                    }
                }
            }
            if (fixed > 0) {
                stack.push_back({std::move(state), bound});
                continue;
            }

            Index pick = -1;
            double top = -1;
            for (Index t = 0; t < Index(U.size()); ++t) {
                const Index i = U[std::size_t(t)];
                if (state[std::size_t(i)] < 0 && drop[t] > top) {
                    top = drop[t];
                    pick = t;
                }
            }
            const Index k = U[std::size_t(pick)];
            Node out{state, pd ? std::min(bound, std::sqrt(std::max(0.0, gu - drop[pick]))) : bound};
            out.state[std::size_t(k)] = 0;
            Node in{std::move(state), bound};
            in.state[std::size_t(k)] = 1;
            // Pushed last so the include child is explored first.
            stack.push_back(std::move(out));
            stack.push_back(std::move(in));
        }
        best.upper_bound = inc;
        for (const Node& node : stack)
            best.upper_bound = std::max(best.upper_bound, node.bound);
        best.evaluations = evaluations;
        best.nodes = nodes;
        return best;
    }

    std::size_t evaluations{0};

private:
    static IndexSet with(const IndexSet& S, Index i)
    {
        IndexSet out = S;
        out.insert(std::lower_bound(out.begin(), out.end(), i), i);
        return out;
    }

    double root_bound()
    {
        return std::sqrt(g(iota_set(n_)));
    }

    const Vector& a_;
    const Matrix& B_;
    Index n_, s_;
    SubsetLimits limits_;
    double mu_{0};
};

// x = B_SS^+ a_S / sqrt(a_S^T B_SS^+ a_S), embedded.
Vector loading(const Vector& a, const Matrix& B, const IndexSet& S)
{
    Vector x = Vector::Zero(a.size());
    if (S.empty())
        return x;
    Vector w;
    const double q = quad_pinv(a, B, S, &w);
    if (q > 0)
        x(S) = w / std::sqrt(q);
    return x;
}

} // namespace

double subset_quadratic_value(const Vector& a, const Matrix& B, const IndexSet& S)
{
    if (S.empty())
        throw InvalidConfig("subset_quadratic_value needs a nonempty subset");
    return std::sqrt(quad_pinv(a, B, S));
}

SubsetQuadraticResult solve_subset_quadratic(const Vector& a, const Matrix& B, Index s, RankOneMethod method,
                                             const SubsetLimits& limits)
{
    SubsetQuadratic sq(a, B, s, limits);
    switch (method) {
    case RankOneMethod::Brute: return sq.brute();
    case RankOneMethod::GreedyLocal: return sq.greedy_local();
    case RankOneMethod::BranchBound: return sq.branch_bound();
    }
    return {};
}

Certificate solve_rank_one(const CovarianceInstance& inst, const RankOneFactors& factors, const RankOneOptions& opts)
{
    const auto t0 = std::chrono::steady_clock::now();
    SubsetQuadraticResult rx, ry;
    if (opts.concurrent) {
        auto fy = std::async(std::launch::async,
                             [&] { return solve_subset_quadratic(factors.b, inst.C, inst.s2, opts.method, opts.limits); });
        rx = solve_subset_quadratic(factors.a, inst.B, inst.s1, opts.method, opts.limits);
        ry = fy.get();
    } else {
        rx = solve_subset_quadratic(factors.a, inst.B, inst.s1, opts.method, opts.limits);
        ry = solve_subset_quadratic(factors.b, inst.C, inst.s2, opts.method, opts.limits);
    }

    Certificate cert;
    cert.method = std::string("rank1/") + to_string(opts.method);
    cert.rank1_residual = factors.residual;
    ScaSolution& sol = cert.incumbent;
    sol.supports = {rx.support, ry.support};
    sol.x = loading(factors.a, inst.B, rx.support);
    sol.y = loading(factors.b, inst.C, ry.support);
    sol.value = rx.value * ry.value;
    sol.xBx = sol.x.dot(inst.B * sol.x);
    sol.yCy = sol.y.dot(inst.C * sol.y);
    sol.within_budget = Index(rx.support.size()) <= inst.s1 && Index(ry.support.size()) <= inst.s2;
    cert.value = sol.value;
    if (opts.method == RankOneMethod::GreedyLocal) {
        // Only the unrestricted values are known to bound the subset ones.
        SubsetQuadratic fx(factors.a, inst.B, inst.n()), fy(factors.b, inst.C, inst.m());
        cert.upper_bound =
            std::max(cert.value, std::sqrt(fx.g(iota_set(inst.n()))) * std::sqrt(fy.g(iota_set(inst.m()))));
    } else {
        cert.upper_bound = std::max(cert.value, rx.upper_bound * ry.upper_bound);
    }
    cert.gap = cert.upper_bound - cert.value;
    if (!rx.complete || !ry.complete)
        cert.status = opts.limits.node_limit > 0 && (rx.nodes >= opts.limits.node_limit || ry.nodes >= opts.limits.node_limit)
                          ? Status::NodeLimit
                          : Status::TimeLimit;
    else
        cert.status = cert.gap <= 1e-6 ? Status::Optimal : Status::GapLimit;
    cert.evaluations = rx.evaluations + ry.evaluations;
    cert.nodes_explored = rx.nodes + ry.nodes;
    cert.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cert;
}

CovarianceInstance rank_one_approximation(const CovarianceInstance& inst, RankOneFactors* factors)
{
    const auto f = leading_rank_one(inst.A);
    CovarianceInstance out = inst;
    out.A = f.a * f.b.transpose();
    out.label = inst.label + " (rank-one approximation)";
    if (factors)
        *factors = f;
    return out;
}

} // namespace scca
