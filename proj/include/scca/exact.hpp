#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "scca/cca.hpp"
#include "scca/heuristics.hpp"

namespace scca {

/// Indicator vector over [0, n + m): entries < n select rows of x, entries
/// n + j select y_j.
using Selection = std::vector<char>;

Selection to_selection(const SupportPair& sp, Index n, Index m);
SupportPair to_support(const Selection& z, Index n);

/// Affine upper bound v <= constant + sum_i coeffs[i] * z[i], valid for every
/// selection within the budgets. `constant` is the subset value at `origin`.
struct Cut {
    double constant{0};
    Vector coeffs;
    SupportPair origin;
    double epsilon{0};
    double lambda_star{0};
};

double evaluate(const Cut& cut, const Selection& z);

enum class Status { Optimal, GapLimit, NodeLimit, TimeLimit };

const char* to_string(Status s);

struct Certificate {
    std::string method;
    double value{0};
    ScaSolution incumbent;
    double upper_bound{1};
    double gap{0};
    std::vector<Cut> cuts;
    std::size_t cut_count{0};
    std::size_t nodes_explored{0};
    std::size_t evaluations{0};
    Status status{Status::Optimal};
    double wall_seconds{0};
    std::string reduction{"none"};
    std::optional<double> rank1_residual;
    std::optional<BigM> bigm;
};

struct BruteForceOptions {
    double max_evaluations = 1e7;
    unsigned threads = 1;
};

/// Enumerates every support pair with |S1| = s1 and |S2| = s2. Throws
/// EnumerationTooLarge when C(n,s1) * C(m,s2) exceeds the cap.
Certificate brute_force(const CovarianceInstance& inst, const BruteForceOptions& opts = {});

struct CutOptions {
    double eps = 1e-6;
    double eps_max = 1e-2;
};

/// Analytical cut at the support pair `sp`, from the dual point
/// theta1 = theta2 = f/2, lambda_i = eps / (M_ii |T|) on the support T and
/// lambda* M_ii off it, where lambda* is the positive part of the largest
/// eigenvalue of D2^T (D1 + Diag(lambda_T))^{-1} D2 - D3. `value` is the
/// subset value at `sp` when already known.
Cut generate_cut(const CovarianceInstance& inst, const SupportPair& sp, const BigM& bigm,
                 const CutOptions& opts = {}, std::optional<double> value = std::nullopt);

/// Smallest eigenvalue of [[theta B, -A/2], [-A^T/2, theta C]] + Diag(lambda)
/// for the dual point behind `cut`; >= 0 (up to rounding) when the cut is valid.
double cut_dual_margin(const CovarianceInstance& inst, const Cut& cut, const BigM& bigm);

struct Budgets {
    Index n{0}, m{0}, s1{0}, s2{0};
};

/// Search-tree node: state[i] is -1 (free), 0 (fixed out) or 1 (fixed in).
struct BnbNode {
    std::vector<signed char> state;
    double bound{1}; // inherited from the parent until the node is processed
    Index depth{0};
    std::size_t id{0};
    std::size_t parent{0};

    static BnbNode root(const Budgets& b);
    std::vector<Index> fixed_one() const;
    std::vector<Index> fixed_zero() const;
};

struct MasterBound {
    bool infeasible{false};
    double value{1};
    /// Index of the cut attaining the minimum, and its maximizing selection.
    std::optional<std::size_t> binding;
    Selection argmax;
};

/// min over cuts of max { cut(z) : z within budgets and node fixings }. With
/// no cuts the value is +infinity.
MasterBound master_bound(const std::vector<Cut>& cuts, const Budgets& budgets, const BnbNode& node);

/// False when constant plus the smallest off-origin coefficient is >= 1. Such
/// a cut cannot bound a node below 1 unless the node's maximal selection is
/// unique and lies inside the cut's origin.
bool can_bound_subtrees(const Cut& cut, Index n);

struct NodeEvent {
    std::size_t id{0};
    std::size_t parent{0};
    double parent_bound{1};
    double bound{1};
    double incumbent{0};
};

struct BranchAndCutOptions {
    CutOptions cut;
    double abs_gap_tol = 1e-6;
    double time_limit = 0;          // seconds; 0 = none
    std::size_t node_limit = 0;     // 0 = none
    std::size_t singleton_seeds = 5;
    std::size_t max_cut_rounds = 20; // cut generation rounds per node
    bool keep_cuts = true;           // copy the cut pool into the certificate
    BigMOptions bigm;
    LocalSearchOptions local;
    std::function<void(const NodeEvent&)> on_node;
};

/// Best-bound-first branch-and-cut over support indicators with delayed
/// analytical cuts. Initial incumbent from greedy + local search.
Certificate branch_and_cut(const CovarianceInstance& inst, const BranchAndCutOptions& opts = {});

} // namespace scca
