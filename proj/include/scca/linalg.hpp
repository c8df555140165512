#pragma once

// Dense spectral kernels: symmetric eigendecomposition, pseudo-inverse and its
// square root, the largest singular triple, numeric rank, and PSD tests for
// 2x2 block matrices. Everything is a free function templated on the scalar
// type of its Eigen arguments.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "scca/errors.hpp"

namespace scca {

using Index = Eigen::Index;

template <typename Scalar>
using Mat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vec = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

using Matrix = Mat<double>;
using Vector = Vec<double>;

inline constexpr double kDefaultRankTol = 1e-9;
inline constexpr double kSymmetryTol = 1e-10;

template <typename Scalar>
struct EigDecomposition {
    Vec<Scalar> values;  // descending
    Mat<Scalar> vectors; // orthonormal columns, matching `values`
};

template <typename Scalar>
struct SingularTriple {
    Scalar value{0};
    Vec<Scalar> left;
    Vec<Scalar> right;
};

/// Eigenvalues with |lambda| at or below this are treated as zero.
template <typename Derived>
typename Derived::Scalar zero_threshold(const Eigen::MatrixBase<Derived>& eigenvalues,
                                        double rank_tol = kDefaultRankTol)
{
    using Scalar = typename Derived::Scalar;
    const Scalar top = eigenvalues.size() ? eigenvalues.cwiseAbs().maxCoeff() : Scalar(0);
    return Scalar(rank_tol) * std::max(Scalar(1), top);
}

/// (M + M^T) / 2 after checking that M is square, finite and symmetric up to
/// `sym_tol * ||M||_F`.
template <typename Derived>
Mat<typename Derived::Scalar> symmetrized(const Eigen::MatrixBase<Derived>& M,
                                          double sym_tol = kSymmetryTol)
{
    using Scalar = typename Derived::Scalar;
    if (M.rows() != M.cols())
        throw InvalidMatrix("expected a square matrix, got " + std::to_string(M.rows()) + "x" +
                            std::to_string(M.cols()));
    if (!M.allFinite())
        throw InvalidMatrix("matrix has non-finite entries");
    const Mat<Scalar> dense = M;
    const Scalar asym = (dense - dense.transpose()).norm();
    if (asym > Scalar(sym_tol) * dense.norm())
        throw InvalidMatrix("matrix is not symmetric (||M - M^T||_F = " + std::to_string(double(asym)) +
                            ")");
    return (dense + dense.transpose()) / Scalar(2);
}

template <typename Derived>
EigDecomposition<typename Derived::Scalar> sym_eig(const Eigen::MatrixBase<Derived>& M)
{
    using Scalar = typename Derived::Scalar;
    const Mat<Scalar> S = symmetrized(M);
    EigDecomposition<Scalar> out;
    if (S.rows() == 0) {
        out.values.resize(0);
        out.vectors.resize(0, 0);
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(S);
    if (es.info() != Eigen::Success)
        throw InvalidMatrix("symmetric eigensolver did not converge");
    // Eigen returns ascending order.
    out.values = es.eigenvalues().reverse();
    out.vectors = es.eigenvectors().rowwise().reverse();
    return out;
}

/// Moore-Penrose pseudo-inverse of a symmetric matrix.
template <typename Derived>
Mat<typename Derived::Scalar> pinv(const Eigen::MatrixBase<Derived>& M, double rank_tol = kDefaultRankTol)
{
    using Scalar = typename Derived::Scalar;
    const auto eig = sym_eig(M);
    const Scalar thr = zero_threshold(eig.values, rank_tol);
    Vec<Scalar> inv = Vec<Scalar>::Zero(eig.values.size());
    for (Index i = 0; i < inv.size(); ++i)
        if (std::abs(eig.values[i]) > thr)
            inv[i] = Scalar(1) / eig.values[i];
    return eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
}

/// PSD square root of the pseudo-inverse, sqrt(M^+).
template <typename Derived>
Mat<typename Derived::Scalar> pinv_sqrt(const Eigen::MatrixBase<Derived>& M,
                                        double rank_tol = kDefaultRankTol)
{
    using Scalar = typename Derived::Scalar;
    const auto eig = sym_eig(M);
    const Scalar thr = zero_threshold(eig.values, rank_tol);
    if (eig.values.size() && eig.values.minCoeff() < -thr)
        throw NotPSD("matrix has eigenvalue " + std::to_string(double(eig.values.minCoeff())) +
                     " below -" + std::to_string(double(thr)));
    Vec<Scalar> inv = Vec<Scalar>::Zero(eig.values.size());
    for (Index i = 0; i < inv.size(); ++i)
        if (eig.values[i] > thr)
            inv[i] = Scalar(1) / std::sqrt(eig.values[i]);
    return eig.vectors * inv.asDiagonal() * eig.vectors.transpose();
}

/// Largest singular value with unit singular vectors, u^T M v = value.
/// Computed from the Gram matrix of the shorter side. The right vector's
/// largest-magnitude entry is made positive.
template <typename Derived>
SingularTriple<typename Derived::Scalar> sigma_max(const Eigen::MatrixBase<Derived>& M)
{
    using Scalar = typename Derived::Scalar;
    SingularTriple<Scalar> out;
    const Index rows = M.rows(), cols = M.cols();
    out.left = Vec<Scalar>::Zero(rows);
    out.right = Vec<Scalar>::Zero(cols);
    if (rows == 0 || cols == 0)
        return out;
    if (!M.allFinite())
        throw InvalidMatrix("matrix has non-finite entries");

    const Mat<Scalar> dense = M;
    const bool right_side = cols <= rows;
    const Mat<Scalar> gram = right_side ? Mat<Scalar>(dense.transpose() * dense)
                                        : Mat<Scalar>(dense * dense.transpose());
    Eigen::SelfAdjointEigenSolver<Mat<Scalar>> es(gram);
    Vec<Scalar> top = es.eigenvectors().col(gram.rows() - 1);

    if (right_side) {
        out.right = top;
        Index k;
        out.right.cwiseAbs().maxCoeff(&k);
        if (out.right[k] < 0)
            out.right = -out.right;
        const Vec<Scalar> mv = dense * out.right;
        out.value = mv.norm();
        if (out.value > Scalar(0)) {
            out.left = mv / out.value;
        } else {
            out.left[0] = Scalar(1);
            out.right = Vec<Scalar>::Unit(cols, 0);
        }
    } else {
        const Vec<Scalar> mtu = dense.transpose() * top;
        out.value = mtu.norm();
        if (out.value > Scalar(0)) {
            out.right = mtu / out.value;
            out.left = top;
        } else {
            out.right[0] = Scalar(1);
            out.left = Vec<Scalar>::Unit(rows, 0);
        }
        Index k;
        out.right.cwiseAbs().maxCoeff(&k);
        if (out.right[k] < 0) {
            out.right = -out.right;
            out.left = -out.left;
        }
    }
    return out;
}

template <typename Derived>
Index numeric_rank(const Eigen::MatrixBase<Derived>& M, double rank_tol = kDefaultRankTol)
{
    const auto eig = sym_eig(M);
    const auto thr = zero_threshold(eig.values, rank_tol);
    return (eig.values.array().abs() > thr).count();
}

template <typename DB, typename DA, typename DC>
Mat<typename DA::Scalar> assemble_block(const Eigen::MatrixBase<DB>& B, const Eigen::MatrixBase<DA>& A,
                                        const Eigen::MatrixBase<DC>& C)
{
    using Scalar = typename DA::Scalar;
    const Index n = B.rows(), m = C.rows();
    Mat<Scalar> M(n + m, n + m);
    M.topLeftCorner(n, n) = B;
    M.topRightCorner(n, m) = A;
    M.bottomLeftCorner(m, n) = A.transpose();
    M.bottomRightCorner(m, m) = C;
    return M;
}

enum class PsdRoute {
    Direct,   // eigenvalues of the assembled block matrix
    SchurOnB, // B >= 0, (I - B B^+) A = 0, C - A^T B^+ A >= 0
    SchurOnC, // C >= 0, (I - C C^+) A^T = 0, B - A C^+ A^T >= 0
};

inline const char* to_string(PsdRoute r)
{
    switch (r) {
    case PsdRoute::Direct: return "direct";
    case PsdRoute::SchurOnB: return "schur-on-B";
    case PsdRoute::SchurOnC: return "schur-on-C";
    }
    return "?";
}

struct BlockPsdReport {
    bool psd{false};
    PsdRoute route{PsdRoute::Direct};
    /// Smallest relevant eigenvalue divided by the block scale; >= -tol when PSD.
    double margin{0};
    /// Relative range-condition residual; zero on the direct route.
    double range_residual{0};
};

/// PSD test of [[B, A], [A^T, C]] by one of the three equivalent conditions.
/// `tol` is relative to max(1, ||B||_F, ||A||_F, ||C||_F).
template <typename DB, typename DA, typename DC>
BlockPsdReport block_psd_check(const Eigen::MatrixBase<DB>& B, const Eigen::MatrixBase<DA>& A,
                               const Eigen::MatrixBase<DC>& C, double tol = 1e-8,
                               PsdRoute route = PsdRoute::Direct)
{
    using Scalar = typename DA::Scalar;
    if (A.rows() != B.rows() || A.cols() != C.rows() || B.rows() != B.cols() || C.rows() != C.cols())
        throw InvalidMatrix("block dimensions are not conformable");

    const double scale = std::max({1.0, double(B.norm()), double(A.norm()), double(C.norm())});
    BlockPsdReport rep;
    rep.route = route;

    auto min_eig = [](const Mat<Scalar>& S) -> double {
        if (S.rows() == 0)
            return 0.0;
        return double(sym_eig(S).values.minCoeff());
    };

    switch (route) {
    case PsdRoute::Direct:
        rep.margin = min_eig(assemble_block(B, A, C)) / scale;
        break;
    case PsdRoute::SchurOnB: {
        const Mat<Scalar> Bp = pinv(B);
        const Mat<Scalar> Bs = symmetrized(B);
        const Mat<Scalar> Cs = symmetrized(C);
        const Mat<Scalar> proj = Mat<Scalar>::Identity(B.rows(), B.rows()) - Bs * Bp;
        rep.range_residual = double((proj * A).norm()) / scale;
        Mat<Scalar> schur = Cs - A.transpose() * Bp * A;
        schur = (schur + schur.transpose()) / Scalar(2);
        rep.margin = std::min(min_eig(Bs), min_eig(schur)) / scale;
        break;
    }
    case PsdRoute::SchurOnC: {
        const Mat<Scalar> Cp = pinv(C);
        const Mat<Scalar> Bs = symmetrized(B);
        const Mat<Scalar> Cs = symmetrized(C);
        const Mat<Scalar> proj = Mat<Scalar>::Identity(C.rows(), C.rows()) - Cs * Cp;
        rep.range_residual = double((proj * A.transpose()).norm()) / scale;
        Mat<Scalar> schur = Bs - A * Cp * A.transpose();
        schur = (schur + schur.transpose()) / Scalar(2);
        rep.margin = std::min(min_eig(Cs), min_eig(schur)) / scale;
        break;
    }
    }
    rep.psd = rep.margin >= -tol && rep.range_residual <= tol;
    return rep;
}

} // namespace scca
