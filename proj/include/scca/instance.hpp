#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scca/linalg.hpp"

namespace scca {

/// Planted population covariance with a hidden sparse loading pair (u, v):
/// A0 = lambda * B0 u v^T C0 with u^T B0 u = v^T C0 v = 1.
struct PlantedPopulation {
    Matrix A0, B0, C0;
    Vector u, v;
    double lambda{0};
};

/// Cross-covariance A (n x m), covariances B (n x n) and C (m x m), and the
/// cardinality budgets on the two loading vectors.
struct CovarianceInstance {
    Matrix A, B, C;
    Index s1{1}, s2{1};
    std::string label;
    std::optional<PlantedPopulation> population;

    Index n() const { return B.rows(); }
    Index m() const { return C.rows(); }
};

struct GeneratorConfig {
    Index n{10}, m{10}, s1{5}, s2{5};
    std::uint64_t seed{0};
    Index samples{5000};

    void check() const;
};

enum class CovarianceScaling {
    Mean, // (1/N) sum of outer products
    Sum,  // raw sums
};

struct ValidationReport {
    bool accepted{false};
    std::vector<std::string> failures;
    double asymmetry_B{0};
    double asymmetry_C{0};
    BlockPsdReport joint;
};

/// Never throws; collects every failed check.
ValidationReport validate(const CovarianceInstance& inst, double psd_tol = 1e-8);

PlantedPopulation generate_population(const GeneratorConfig& cfg);

/// Draws N zero-mean Gaussian samples with the population's joint covariance
/// and returns the sample covariance blocks. Budgets are the planted support
/// sizes.
CovarianceInstance sample_covariance(const PlantedPopulation& pop, Index samples, std::uint64_t seed,
                                     CovarianceScaling scaling = CovarianceScaling::Mean);

/// generate_population followed by sample_covariance, seeded from cfg.seed.
CovarianceInstance generate_instance(const GeneratorConfig& cfg,
                                     CovarianceScaling scaling = CovarianceScaling::Mean,
                                     bool keep_population = true);

/// Copy of `inst` with every matrix multiplied by `factor`.
CovarianceInstance scaled(const CovarianceInstance& inst, double factor);

} // namespace scca
