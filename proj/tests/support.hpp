#pragma once

// Random instance builders shared by the tests.

#include <cstdint>

#include "scca/instance.hpp"
#include "scca/rng.hpp"

namespace scca::test {

inline Matrix normal_matrix(Rng& rng, Index rows, Index cols)
{
    Matrix M(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            M(i, j) = rng.normal();
    return M;
}

inline CovarianceInstance from_joint(const Matrix& S, Index n, Index s1, Index s2)
{
    CovarianceInstance inst;
    const Index m = S.rows() - n;
    inst.B = S.topLeftCorner(n, n);
    inst.A = S.topRightCorner(n, m);
    inst.C = S.bottomRightCorner(m, m);
    inst.B = (inst.B + inst.B.transpose()) / 2;
    inst.C = (inst.C + inst.C.transpose()) / 2;
    inst.s1 = s1;
    inst.s2 = s2;
    inst.label = "test";
    return inst;
}

/// Joint covariance X^T X / k from k standard normal samples; rank min(k, n+m).
inline CovarianceInstance random_instance(std::uint64_t seed, Index n, Index m, Index s1, Index s2, Index k = 0)
{
    Rng rng(seed, Rng::kTestData);
    if (k <= 0)
        k = 2 * (n + m) + 5;
    const Matrix X = normal_matrix(rng, k, n + m);
    return from_joint(X.transpose() * X / double(k), n, s1, s2);
}

/// Population-style instance with B of rank r and C of rank rhat. Built from
/// independent latent factors so the joint matrix is PSD.
inline CovarianceInstance low_rank_instance(std::uint64_t seed, Index n, Index m, Index r, Index rhat, Index s1,
                                            Index s2)
{
    Rng rng(seed, Rng::kTestData);
    const Matrix Fx = normal_matrix(rng, n, r);
    const Matrix Fy = normal_matrix(rng, m, rhat);
    // Latent covariance of (zx, zy): a random correlation between the factors.
    const Index d = r + rhat;
    const Matrix L = normal_matrix(rng, d + 3, d);
    Matrix K = L.transpose() * L / double(d + 3);
    Matrix T = Matrix::Zero(n + m, d);
    T.topLeftCorner(n, r) = Fx;
    T.bottomRightCorner(m, rhat) = Fy;
    return from_joint(T * K * T.transpose(), n, s1, s2);
}

/// Planted population with exactly rank-one A = lambda B0 u v^T C0.
inline CovarianceInstance rank_one_instance(std::uint64_t seed, Index n, Index m, Index s1, Index s2)
{
    GeneratorConfig cfg;
    cfg.n = n;
    cfg.m = m;
    cfg.s1 = s1;
    cfg.s2 = s2;
    cfg.seed = seed;
    const auto pop = generate_population(cfg);
    CovarianceInstance inst;
    inst.A = pop.A0;
    inst.B = pop.B0;
    inst.C = pop.C0;
    inst.s1 = s1;
    inst.s2 = s2;
    inst.label = "rank-one population";
    return inst;
}

/// Rank-one A = a b^T with B, C random PD and a generic (dense) a, b, scaled
/// so the joint matrix stays PSD.
inline CovarianceInstance dense_rank_one_instance(std::uint64_t seed, Index n, Index m, Index s1, Index s2)
{
    Rng rng(seed, Rng::kTestData);
    const Matrix Xb = normal_matrix(rng, n + 3, n);
    const Matrix Xc = normal_matrix(rng, m + 3, m);
    CovarianceInstance inst;
    inst.B = Xb.transpose() * Xb / double(n + 3);
    inst.C = Xc.transpose() * Xc / double(m + 3);
    Vector a = normal_matrix(rng, n, 1).col(0);
    Vector b = normal_matrix(rng, m, 1).col(0);
    // a^T B^-1 a = b^T C^-1 b = 1 times a factor below one keeps the block PSD.
    a /= std::sqrt(a.dot(inst.B.llt().solve(a)));
    b /= std::sqrt(b.dot(inst.C.llt().solve(b)));
    const double lambda = 0.2 + 0.7 * rng.uniform();
    inst.A = lambda * a * b.transpose();
    inst.s1 = s1;
    inst.s2 = s2;
    inst.label = "dense rank-one";
    return inst;
}

inline GeneratorConfig config(Index n, Index m, Index s1, Index s2, std::uint64_t seed, Index samples = 5000)
{
    GeneratorConfig cfg;
    cfg.n = n;
    cfg.m = m;
    cfg.s1 = s1;
    cfg.s2 = s2;
    cfg.seed = seed;
    cfg.samples = samples;
    return cfg;
}

} // namespace scca::test
