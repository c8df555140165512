#include "scca/cca.hpp"

#include <algorithm>
#include <iostream>
#include <limits>
#include <sstream>

#include "scca/combinatorics.hpp"
#include "scca/errors.hpp"

namespace scca {

void warn(const std::string& message)
{
    std::cerr << "scca: warning: " << message << '\n';
}

std::string format_support(const IndexSet& s)
{
    std::ostringstream os;
    os << '{';
    for (std::size_t i = 0; i < s.size(); ++i)
        os << (i ? "," : "") << s[i];
    os << '}';
    return os.str();
}

void check_support(const CovarianceInstance& inst, const SupportPair& sp)
{
    auto check = [](const IndexSet& s, Index dim, Index budget, const char* name) {
        if (Index(s.size()) > budget)
            throw InvalidConfig(std::string(name) + " exceeds its budget");
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s[i] < 0 || s[i] >= dim)
                throw InvalidConfig(std::string(name) + " has an index out of range");
            if (i && s[i] <= s[i - 1])
                throw InvalidConfig(std::string(name) + " must be sorted and duplicate-free");
        }
    };
    check(sp.S1, inst.n(), inst.s1, "S1");
    check(sp.S2, inst.m(), inst.s2, "S2");
}

CcaResult cca_closed_form(const Matrix& B, const Matrix& A, const Matrix& C, double rank_tol)
{
    CcaResult out;
    out.x = Vector::Zero(B.rows());
    out.y = Vector::Zero(C.rows());
    if (B.rows() == 0 || C.rows() == 0)
        return out;
    const Matrix rb = pinv_sqrt(B, rank_tol);
    const Matrix rc = pinv_sqrt(C, rank_tol);
    const auto sv = sigma_max(Matrix(rb * A * rc));
    out.value = sv.value;
    out.x = rb * sv.left;
    out.y = rc * sv.right;
    return out;
}

CcaResult cca_value(const Matrix& B, const Matrix& A, const Matrix& C, double psd_tol)
{
    const auto rep = block_psd_check(B, A, C, psd_tol);
    if (!rep.psd)
        throw NotACovariance("joint block matrix is not PSD (relative margin " +
                             std::to_string(rep.margin) + ")");
    return cca_closed_form(B, A, C);
}

CcaDualPoint cca_dual_point(const Matrix& B, const Matrix& A, const Matrix& C, double value)
{
    CcaDualPoint d;
    d.theta1 = d.theta2 = value / 2;
    d.objective = d.theta1 + d.theta2;
    const Matrix G = assemble_block(Matrix(d.theta1 * B), Matrix(-A / 2), Matrix(d.theta2 * C));
    d.min_eigenvalue = G.rows() ? sym_eig(G).values.minCoeff() : 0.0;
    return d;
}

ScaSolution subset_value(const CovarianceInstance& inst, const SupportPair& sp)
{
    ScaSolution sol;
    sol.supports = sp;
    sol.x = Vector::Zero(inst.n());
    sol.y = Vector::Zero(inst.m());
    sol.within_budget = Index(sp.S1.size()) <= inst.s1 && Index(sp.S2.size()) <= inst.s2;
    if (sp.S1.empty() || sp.S2.empty())
        return sol;

    const Matrix Bs = inst.B(sp.S1, sp.S1);
    const Matrix As = inst.A(sp.S1, sp.S2);
    const Matrix Cs = inst.C(sp.S2, sp.S2);
    auto local = cca_closed_form(Bs, As, Cs);

    constexpr double kValueCap = 1 + 1e-6;
    if (local.value > kValueCap) {
        warn("subset value " + std::to_string(local.value) + " exceeds 1; the instance is likely not a covariance");
        local.value = kValueCap;
    }
    sol.value = local.value;
    sol.x(sp.S1) = local.x;
    sol.y(sp.S2) = local.y;
    sol.xBx = local.x.dot(Bs * local.x);
    sol.yCy = local.y.dot(Cs * local.y);
    return sol;
}

BigMComponent big_m(const Matrix& M, const BigMOptions& opts)
{
    BigMComponent out;
    const Index n = M.rows();
    if (n == 0)
        return out;
    const auto eig = sym_eig(M);
    const double thr = zero_threshold(eig.values, opts.rank_tol);
    Index r = 0;
    while (r < n && eig.values[r] > thr)
        ++r;

    if (r == 0) {
        // M = 0 forces A = 0 on this side, so x = 0 is optimal.
        out.bound = 1.0;
        out.smin = 1.0;
        return out;
    }
    const double lam_r = eig.values[r - 1];
    out.smallest_nonzero_eigenvalue = lam_r;
    if (r == n) {
        out.bound = 1.0 / lam_r;
        return out;
    }

    const Index k = n - r;
    const Matrix Z = eig.vectors.rightCols(k);
    double total = 0;
    for (Index t = 1; t <= k; ++t)
        total += binomial(n, t) * binomial(k, t);
    if (k > opts.enum_cap || total > double(opts.max_submatrices)) {
        warn("big-M: nullity " + std::to_string(k) + " too large for exact enumeration; using fallback " +
             std::to_string(opts.fallback));
        out.bound = opts.fallback;
        out.provenance = BigMProvenance::Fallback;
        out.smin = 0;
        return out;
    }

    constexpr double kNonzero = 1e-10;
    double smin = std::numeric_limits<double>::infinity();
    for (Index t = 1; t <= k; ++t) {
        for_each_combination(n, t, [&](const IndexSet& rows) {
            for_each_combination(k, t, [&](const IndexSet& cols) {
                const Matrix sub = Z(rows, cols);
                const double s = Eigen::JacobiSVD<Matrix>(sub).singularValues().minCoeff();
                if (s > kNonzero)
                    smin = std::min(smin, s);
                return true;
            });
            return true;
        });
    }
    out.smin = smin;
    out.bound = 1.0 / lam_r + 1.0 / (lam_r * smin * smin);
    return out;
}

BigM big_m(const CovarianceInstance& inst, const BigMOptions& opts)
{
    return BigM{big_m(inst.B, opts), big_m(inst.C, opts)};
}

SparsifyResult sparsify(const Vector& x, const Matrix& B, const Matrix& A, double rank_tol)
{
    SparsifyResult out{x, true, {}};
    const Index n = B.rows();
    const auto eig = sym_eig(B);
    const double thr = zero_threshold(eig.values, rank_tol);
    Index r = 0;
    while (r < n && eig.values[r] > thr)
        ++r;
    const Index k = n - r;
    if (k == 0)
        return out;

    const Matrix Z = eig.vectors.rightCols(k);
    const double leak = (Z.transpose() * A).norm();
    if (leak > 1e-6 * std::max(1.0, A.norm())) {
        out.ok = false;
        out.message = "null space of B is not orthogonal to A";
        return out;
    }

    // Column pivoting on Z^T picks k well-conditioned rows of Z.
    Eigen::ColPivHouseholderQR<Matrix> qr(Z.transpose());
    IndexSet rows(k);
    for (Index i = 0; i < k; ++i)
        rows[i] = qr.colsPermutation().indices()[i];
    std::sort(rows.begin(), rows.end());

    const Matrix Zs = Z(rows, Eigen::all);
    Eigen::JacobiSVD<Matrix> svd(Zs, Eigen::ComputeFullU | Eigen::ComputeFullV);
    if (svd.singularValues().minCoeff() < 1e-10) {
        out.ok = false;
        out.message = "null-space rows are singular";
        return out;
    }
    const Vector gamma = svd.solve(Vector(x(rows)));
    out.x = x - Z * gamma;
    for (Index i : rows)
        out.x[i] = 0.0;
    return out;
}

} // namespace scca
