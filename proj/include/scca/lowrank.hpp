#pragma once

#include <optional>
#include <string>

#include "scca/exact.hpp"

namespace scca {

/// Which cardinality constraints are implied by the ranks of B and C.
enum class ReductionCase {
    BothRedundant, // s1 >= rank(B) and s2 >= rank(C): plain CCA
    XOnly,         // only the x budget is redundant
    YOnly,         // only the y budget is redundant
    None,
};

const char* to_string(ReductionCase c);

struct RankProfile {
    Index r{0};    // rank(B)
    Index rhat{0}; // rank(C)
    ReductionCase reduction{ReductionCase::None};
};

RankProfile rank_profile(const CovarianceInstance& inst, double rank_tol = kDefaultRankTol);

/// Solves an instance whose both budgets are redundant: CCA followed by
/// sparsification of both loadings. Throws InvalidConfig for any other case.
Certificate solve_reduced(const CovarianceInstance& inst, const RankProfile& profile);

/// Copy of `inst` with the budgets made redundant by `profile` widened to the
/// full dimension.
CovarianceInstance drop_redundant_budgets(const CovarianceInstance& inst, const RankProfile& profile);

/// Sparsifies whichever loading of `sol` exceeds its budget in `inst`,
/// keeping x^T A, x^T B x (and the y counterparts) fixed. Updates supports,
/// value and budget flag.
void sparsify_to_budgets(const CovarianceInstance& inst, ScaSolution& sol);

/// A ~ a b^T with a = sigma u, b = v from the leading singular triple.
struct RankOneFactors {
    Vector a, b;
    double residual{0}; // ||A - a b^T||_F
};

/// Leading rank-one factorization, whatever the residual.
RankOneFactors leading_rank_one(const Matrix& A);

/// Accepted only when the residual is within tol * ||A||_F.
std::optional<RankOneFactors> rank_one_factors(const Matrix& A, double tol = 1e-9);

/// sqrt(a_S^T B_SS^+ a_S). Throws InconsistentSubproblem when a_S has a
/// component outside the range of B_SS larger than 1e-6 (relative).
double subset_quadratic_value(const Vector& a, const Matrix& B, const IndexSet& S);

enum class RankOneMethod { Brute, GreedyLocal, BranchBound };

const char* to_string(RankOneMethod m);

/// One side of the separable problem: max a^T x s.t. x^T B x <= 1, |supp x| <= s.
struct SubsetQuadraticResult {
    double value{0};
    IndexSet support;
    double upper_bound{0}; // equals value unless a limit stopped branch-bound
    std::size_t evaluations{0};
    std::size_t nodes{0};
    bool complete{true};
};

struct SubsetLimits {
    std::size_t node_limit{0}; // 0: none
    double time_limit{0};      // seconds, 0: none
};

SubsetQuadraticResult solve_subset_quadratic(const Vector& a, const Matrix& B, Index s, RankOneMethod method,
                                             const SubsetLimits& limits = {});

struct RankOneOptions {
    RankOneMethod method{RankOneMethod::BranchBound};
    bool concurrent{false}; // solve the two sides on separate threads
    SubsetLimits limits;    // per side
};

/// Solves the instance with A replaced by a b^T as two independent subset
/// problems; value = v_x * v_y. The certificate carries the loadings of the
/// factored instance and records the factor residual.
Certificate solve_rank_one(const CovarianceInstance& inst, const RankOneFactors& factors,
                           const RankOneOptions& opts = {});

/// Copy of `inst` with A replaced by its leading rank-one part.
CovarianceInstance rank_one_approximation(const CovarianceInstance& inst, RankOneFactors* factors = nullptr);

} // namespace scca
