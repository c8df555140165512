#include "scca/exact.hpp"

#include <algorithm>
#include <chrono>
#include <limits>
#include <thread>

#include "scca/combinatorics.hpp"
#include "scca/errors.hpp"

namespace scca {

Selection to_selection(const SupportPair& sp, Index n, Index m)
{
    Selection z(std::size_t(n + m), 0);
    for (Index i : sp.S1)
        z[std::size_t(i)] = 1;
    for (Index j : sp.S2)
        z[std::size_t(n + j)] = 1;
    return z;
}

SupportPair to_support(const Selection& z, Index n)
{
    SupportPair sp;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (!z[i])
            continue;
        if (Index(i) < n)
            sp.S1.push_back(Index(i));
        else
            sp.S2.push_back(Index(i) - n);
    }
    return sp;
}

double evaluate(const Cut& cut, const Selection& z)
{
    double v = cut.constant;
    for (std::size_t i = 0; i < z.size(); ++i)
        if (z[i])
            v += cut.coeffs[Index(i)];
    return v;
}

const char* to_string(Status s)
{
    switch (s) {
    case Status::Optimal: return "optimal";
    case Status::GapLimit: return "gap_limit";
    case Status::NodeLimit: return "node_limit";
    case Status::TimeLimit: return "time_limit";
    }
    return "?";
}

namespace {

struct Best {
    double value{-1};
    std::size_t k{0}, l{0};
};

} // namespace

Certificate brute_force(const CovarianceInstance& inst, const BruteForceOptions& opts)
{
    const auto t0 = std::chrono::steady_clock::now();
    const Index n = inst.n(), m = inst.m();
    const double total = binomial(n, inst.s1) * binomial(m, inst.s2);
    if (total > opts.max_evaluations)
        throw EnumerationTooLarge("brute force needs " + std::to_string(total) +
                                  " evaluations, cap is " + std::to_string(opts.max_evaluations));

    const auto rows = combinations(n, inst.s1);
    const auto cols = combinations(m, inst.s2);
    std::vector<Matrix> root_b(rows.size()), root_c(cols.size());
    for (std::size_t k = 0; k < rows.size(); ++k)
        root_b[k] = pinv_sqrt(Matrix(inst.B(rows[k], rows[k])));
    for (std::size_t l = 0; l < cols.size(); ++l)
        root_c[l] = pinv_sqrt(Matrix(inst.C(cols[l], cols[l])));

    // Contiguous chunks of row subsets; chunk winners are merged in order so
    // the result does not depend on the thread count.
    auto scan = [&](std::size_t begin, std::size_t end) {
        Best best;
        for (std::size_t k = begin; k < end; ++k) {
            const Matrix left = root_b[k] * inst.A(rows[k], Eigen::all);
            for (std::size_t l = 0; l < cols.size(); ++l) {
                const Matrix K = left(Eigen::all, cols[l]) * root_c[l];
                const double v = sigma_max(K).value;
                if (v > best.value + kTieTol)
                    best = {v, k, l};
            }
        }
        return best;
    };

    const unsigned threads = std::max(1u, std::min<unsigned>(opts.threads, unsigned(rows.size())));
    std::vector<Best> partial(threads);
    if (threads == 1) {
        partial[0] = scan(0, rows.size());
    } else {
        std::vector<std::thread> pool;
        const std::size_t chunk = (rows.size() + threads - 1) / threads;
        for (unsigned t = 0; t < threads; ++t) {
            const std::size_t b = std::min(rows.size(), t * chunk);
            const std::size_t e = std::min(rows.size(), b + chunk);
            pool.emplace_back([&, t, b, e] { partial[t] = scan(b, e); });
        }
        for (auto& th : pool)
            th.join();
    }
    Best best;
    for (const auto& p : partial)
        if (p.value > best.value + kTieTol)
            best = p;

    Certificate cert;
    cert.method = "brute";
    cert.incumbent = subset_value(inst, {rows[best.k], cols[best.l]});
    cert.value = cert.incumbent.value;
    cert.upper_bound = cert.value;
    cert.gap = 0;
    cert.evaluations = std::size_t(total);
    cert.status = Status::Optimal;
    cert.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return cert;
}

namespace {

Matrix dual_matrix(const CovarianceInstance& inst, double theta)
{
    return assemble_block(Matrix(theta * inst.B), Matrix(-inst.A / 2), Matrix(theta * inst.C));
}

double big_m_of(const BigM& bigm, Index i, Index n)
{
    return i < n ? bigm.M1() : bigm.M2();
}

} // namespace

Cut generate_cut(const CovarianceInstance& inst, const SupportPair& sp, const BigM& bigm,
                 const CutOptions& opts, std::optional<double> value)
{
    if (sp.S1.empty() || sp.S2.empty())
        throw InvalidConfig("cut origin must have nonempty supports in both blocks");
    const Index n = inst.n(), m = inst.m(), N = n + m;
    const double f = value ? *value : subset_value(inst, sp).value;
    const double theta = f / 2;
    const Matrix G = dual_matrix(inst, theta);

    std::vector<Index> T, Tc;
    {
        const Selection z = to_selection(sp, n, m);
        for (Index i = 0; i < N; ++i)
            (z[std::size_t(i)] ? T : Tc).push_back(i);
    }
    const double tsize = double(T.size());
    const Matrix D1 = G(T, T);

    Cut cut;
    cut.constant = f;
    cut.origin = sp;
    cut.coeffs = Vector::Zero(N);

    double eps = opts.eps;
    while (true) {
        Vector lam_t(Index(T.size()));
        for (std::size_t a = 0; a < T.size(); ++a)
            lam_t[Index(a)] = eps / (big_m_of(bigm, T[a], n) * tsize);
        const Matrix reg = D1 + Matrix(lam_t.asDiagonal());
        Eigen::LLT<Matrix> llt(reg);
        if (llt.info() == Eigen::Success && llt.rcond() > 1e-15) {
            double lambda_star = 0;
            if (!Tc.empty()) {
                const Matrix D2 = G(T, Tc);
                Matrix S = D2.transpose() * llt.solve(D2) - G(Tc, Tc);
                S = (S + S.transpose()) / 2;
                Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
                lambda_star = std::max(0.0, es.eigenvalues().maxCoeff());
            }
            cut.epsilon = eps;
            cut.lambda_star = lambda_star;
            for (std::size_t a = 0; a < T.size(); ++a)
                cut.coeffs[T[a]] = lam_t[Index(a)] * big_m_of(bigm, T[a], n);
            for (Index i : Tc)
                cut.coeffs[i] = lambda_star * big_m_of(bigm, i, n);
            return cut;
        }
        eps *= 10;
        if (eps > opts.eps_max * (1 + 1e-12))
            throw CutGenerationFailed("regularized D1 stays singular up to eps = " +
                                      std::to_string(opts.eps_max));
    }
}

double cut_dual_margin(const CovarianceInstance& inst, const Cut& cut, const BigM& bigm)
{
    const Index n = inst.n();
    Matrix G = dual_matrix(inst, cut.constant / 2);
    for (Index i = 0; i < G.rows(); ++i)
        G(i, i) += cut.coeffs[i] / big_m_of(bigm, i, n);
    return sym_eig(G).values.minCoeff();
}

BnbNode BnbNode::root(const Budgets& b)
{
    BnbNode node;
    node.state.assign(std::size_t(b.n + b.m), -1);
    return node;
}

std::vector<Index> BnbNode::fixed_one() const
{
    std::vector<Index> out;
    for (std::size_t i = 0; i < state.size(); ++i)
        if (state[i] == 1)
            out.push_back(Index(i));
    return out;
}

std::vector<Index> BnbNode::fixed_zero() const
{
    std::vector<Index> out;
    for (std::size_t i = 0; i < state.size(); ++i)
        if (state[i] == 0)
            out.push_back(Index(i));
    return out;
}

MasterBound master_bound(const std::vector<Cut>& cuts, const Budgets& budgets, const BnbNode& node)
{
    MasterBound out;
    out.value = std::numeric_limits<double>::infinity();

    struct Block {
        std::vector<Index> ones, free;
        Index room{0};
    } blocks[2];
    for (std::size_t i = 0; i < node.state.size(); ++i) {
        Block& b = blocks[Index(i) < budgets.n ? 0 : 1];
        if (node.state[i] == 1)
            b.ones.push_back(Index(i));
        else if (node.state[i] < 0)
            b.free.push_back(Index(i));
    }
    const Index budget[2] = {budgets.s1, budgets.s2};
    for (int k = 0; k < 2; ++k) {
        if (Index(blocks[k].ones.size()) > budget[k]) {
            out.infeasible = true;
            return out;
        }
        blocks[k].room = std::min<Index>(budget[k] - Index(blocks[k].ones.size()), Index(blocks[k].free.size()));
    }

    std::vector<Index> order;
    for (std::size_t c = 0; c < cuts.size(); ++c) {
        const Vector& w = cuts[c].coeffs;
        double v = cuts[c].constant;
        for (int k = 0; k < 2; ++k) {
            for (Index i : blocks[k].ones)
                v += w[i];
            if (blocks[k].room == 0)
                continue;
            order = blocks[k].free;
            std::nth_element(order.begin(), order.begin() + (blocks[k].room - 1), order.end(),
                             [&](Index a, Index b) { return w[a] > w[b] || (w[a] == w[b] && a < b); });
            for (Index r = 0; r < blocks[k].room; ++r)
                v += w[order[std::size_t(r)]];
        }
        if (v < out.value) {
            out.value = v;
            out.binding = c;
        }
    }

    if (out.binding) {
        const Vector& w = cuts[*out.binding].coeffs;
        out.argmax.assign(node.state.size(), 0);
        for (int k = 0; k < 2; ++k) {
            for (Index i : blocks[k].ones)
                out.argmax[std::size_t(i)] = 1;
            order = blocks[k].free;
            std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return w[a] > w[b]; });
            for (Index r = 0; r < blocks[k].room; ++r)
                out.argmax[std::size_t(order[std::size_t(r)])] = 1;
        }
    }
    return out;
}

} // namespace scca
