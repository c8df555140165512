#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "scca/instance.hpp"
#include "scca/linalg.hpp"

namespace scca {

/// Sorted, duplicate-free list of indices.
using IndexSet = std::vector<Index>;

/// Supports of x (S1 within [0, n)) and of y (S2 within [0, m)).
struct SupportPair {
    IndexSet S1, S2;

    friend bool operator==(const SupportPair&, const SupportPair&) = default;
};

/// Throws InvalidConfig if the pair is out of range, unsorted, or over budget.
void check_support(const CovarianceInstance& inst, const SupportPair& sp);

std::string format_support(const IndexSet& s);

/// Embedded solution of the sparse problem on a fixed support pair.
struct ScaSolution {
    double value{0};
    SupportPair supports;
    Vector x, y;
    double xBx{0};
    double yCy{0};
    bool x_on_support{true};
    bool y_on_support{true};
    bool within_budget{true};
};

struct CcaResult {
    double value{0};
    Vector x, y;
};

/// max { x^T A y : x^T B x <= 1, y^T C y <= 1 } in closed form:
/// value = sigma_max(sqrt(B^+) A sqrt(C^+)), x = sqrt(B^+) q, y = sqrt(C^+) p.
/// Throws NotACovariance if [[B, A], [A^T, C]] is not PSD within `psd_tol`.
CcaResult cca_value(const Matrix& B, const Matrix& A, const Matrix& C, double psd_tol = 1e-8);

/// Same formula without the joint PSD check.
CcaResult cca_closed_form(const Matrix& B, const Matrix& A, const Matrix& C,
                          double rank_tol = kDefaultRankTol);

/// Dual point theta1 = theta2 = value/2 of the two-constraint SDP dual and the
/// smallest eigenvalue of [[theta1 B, -A/2], [-A^T/2, theta2 C]].
struct CcaDualPoint {
    double theta1{0}, theta2{0};
    double objective{0};
    double min_eigenvalue{0};
};

CcaDualPoint cca_dual_point(const Matrix& B, const Matrix& A, const Matrix& C, double value);

/// Subset objective: the CCA value on B[S1,S1], A[S1,S2], C[S2,S2], with the
/// optimal loadings embedded into full-length vectors. Empty supports give 0.
ScaSolution subset_value(const CovarianceInstance& inst, const SupportPair& sp);

/// Tolerance on x^T B x <= 1 and y^T C y <= 1.
inline constexpr double kFeasibilityTol = 1e-8;

enum class BigMProvenance { Exact, Fallback };

inline const char* to_string(BigMProvenance p)
{
    return p == BigMProvenance::Exact ? "exact" : "fallback";
}

struct BigMOptions {
    Index enum_cap = 12;                    // largest nullity for the exact constant
    std::size_t max_submatrices = 2'000'000; // square submatrices examined at most
    double fallback = 1e6;
    double rank_tol = kDefaultRankTol;
};

struct BigMComponent {
    double bound{1};
    BigMProvenance provenance{BigMProvenance::Exact};
    double smallest_nonzero_eigenvalue{0};
    double smin{1}; // 1 when M has full rank
};

/// Bound on ||x||^2 over optimal loadings of a covariance block M.
BigMComponent big_m(const Matrix& M, const BigMOptions& opts = {});

struct BigM {
    BigMComponent x, y;
    double M1() const { return x.bound; }
    double M2() const { return y.bound; }
};

BigM big_m(const CovarianceInstance& inst, const BigMOptions& opts = {});

struct SparsifyResult {
    Vector x;
    bool ok{true};
    std::string message;
};

/// Moves x along the null space of B so that at most rank(B) entries remain
/// nonzero, preserving x^T B x and x^T A. If the null-space rows cannot be
/// solved for, or the null space is not orthogonal to A, returns x unchanged
/// with ok = false.
SparsifyResult sparsify(const Vector& x, const Matrix& B, const Matrix& A,
                        double rank_tol = kDefaultRankTol);

/// Prints a one-line warning on stderr.
void warn(const std::string& message);

} // namespace scca
