#include "scca/instance.hpp"

#include <algorithm>
#include <numeric>

#include "scca/errors.hpp"
#include "scca/rng.hpp"

namespace scca {

void GeneratorConfig::check() const
{
    if (n < 1 || m < 1)
        throw InvalidConfig("n and m must be positive");
    if (s1 < 1 || s1 > n)
        throw InvalidConfig("s1 must lie in [1, n]");
    if (s2 < 1 || s2 > m)
        throw InvalidConfig("s2 must lie in [1, m]");
    if (samples < 1)
        throw InvalidConfig("samples must be positive");
}

ValidationReport validate(const CovarianceInstance& inst, double psd_tol)
{
    ValidationReport rep;
    const Index n = inst.B.rows(), m = inst.C.rows();
    auto fail = [&](std::string msg) { rep.failures.push_back(std::move(msg)); };

    bool shapes_ok = true;
    if (inst.B.cols() != n) {
        fail("B is not square");
        shapes_ok = false;
    }
    if (inst.C.cols() != m) {
        fail("C is not square");
        shapes_ok = false;
    }
    if (inst.A.rows() != n || inst.A.cols() != m) {
        fail("A must be " + std::to_string(n) + "x" + std::to_string(m));
        shapes_ok = false;
    }
    if (n < 1 || m < 1) {
        fail("empty dimension");
        shapes_ok = false;
    }
    if (inst.s1 < 1 || inst.s1 > n)
        fail("s1 = " + std::to_string(inst.s1) + " outside [1, " + std::to_string(n) + "]");
    if (inst.s2 < 1 || inst.s2 > m)
        fail("s2 = " + std::to_string(inst.s2) + " outside [1, " + std::to_string(m) + "]");
    if (!shapes_ok)
        return rep;

    if (!inst.A.allFinite() || !inst.B.allFinite() || !inst.C.allFinite()) {
        fail("non-finite entries");
        return rep;
    }
    rep.asymmetry_B = (inst.B - inst.B.transpose()).norm() / std::max(1.0, inst.B.norm());
    rep.asymmetry_C = (inst.C - inst.C.transpose()).norm() / std::max(1.0, inst.C.norm());
    if (rep.asymmetry_B > kSymmetryTol)
        fail("B is not symmetric");
    if (rep.asymmetry_C > kSymmetryTol)
        fail("C is not symmetric");
    if (!rep.failures.empty())
        return rep;

    rep.joint = block_psd_check(inst.B, inst.A, inst.C, psd_tol);
    if (!rep.joint.psd)
        fail("joint block matrix is not PSD (relative margin " + std::to_string(rep.joint.margin) + ")");

    rep.accepted = rep.failures.empty();
    return rep;
}

namespace {

Matrix normal_matrix(Rng& rng, Index rows, Index cols)
{
    Matrix M(rows, cols);
    // Row-major fill order keeps the draw sequence independent of storage order.
    for (Index i = 0; i < rows; ++i)
        for (Index j = 0; j < cols; ++j)
            M(i, j) = rng.normal();
    return M;
}

std::vector<Index> random_support(Rng& rng, Index n, Index size)
{
    std::vector<Index> idx(n);
    std::iota(idx.begin(), idx.end(), Index{0});
    for (Index i = 0; i < size; ++i) {
        const Index j = i + Index(rng.below(std::uint64_t(n - i)));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(size);
    std::sort(idx.begin(), idx.end());
    return idx;
}

Vector planted_loading(Rng& rng, const Matrix& cov, Index size)
{
    const auto support = random_support(rng, cov.rows(), size);
    Vector w = Vector::Zero(cov.rows());
    for (Index i : support)
        w[i] = rng.normal();
    const double q = w.dot(cov * w);
    return w / std::sqrt(q);
}

Index support_size(const Vector& v)
{
    return (v.array() != 0.0).count();
}

} // namespace

PlantedPopulation generate_population(const GeneratorConfig& cfg)
{
    cfg.check();
    Rng rng(cfg.seed, Rng::kPopulation);
    PlantedPopulation pop;

    const Matrix Bh = normal_matrix(rng, cfg.n, cfg.n);
    const Matrix Ch = normal_matrix(rng, cfg.m, cfg.m);
    pop.B0 = Bh * Bh.transpose() + Matrix::Identity(cfg.n, cfg.n);
    pop.C0 = Ch * Ch.transpose() + Matrix::Identity(cfg.m, cfg.m);
    pop.B0 = (pop.B0 + pop.B0.transpose()) / 2;
    pop.C0 = (pop.C0 + pop.C0.transpose()) / 2;

    pop.u = planted_loading(rng, pop.B0, cfg.s1);
    pop.v = planted_loading(rng, pop.C0, cfg.s2);
    pop.lambda = rng.uniform_open();
    pop.A0 = pop.lambda * (pop.B0 * pop.u) * (pop.C0 * pop.v).transpose();
    return pop;
}

CovarianceInstance sample_covariance(const PlantedPopulation& pop, Index samples, std::uint64_t seed,
                                     CovarianceScaling scaling)
{
    if (samples < 1)
        throw InvalidConfig("samples must be positive");
    const Index n = pop.B0.rows(), m = pop.C0.rows(), d = n + m;

    const Matrix sigma = assemble_block(pop.B0, pop.A0, pop.C0);
    EigDecomposition<double> eig;
    try {
        eig = sym_eig(sigma);
    } catch (const InvalidMatrix& e) {
        throw InvalidPopulation(std::string("population covariance rejected: ") + e.what());
    }
    const double thr = zero_threshold(eig.values);
    if (eig.values.minCoeff() < -thr)
        throw InvalidPopulation("population covariance is not PSD (min eigenvalue " +
                                std::to_string(eig.values.minCoeff()) + ")");
    const Matrix root = eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();

    Rng rng(seed, Rng::kSamples);
    const Matrix draws = normal_matrix(rng, samples, d) * root.transpose();

    Matrix gram = Matrix::Zero(d, d);
    gram.selfadjointView<Eigen::Lower>().rankUpdate(draws.transpose());
    gram = gram.selfadjointView<Eigen::Lower>();
    if (scaling == CovarianceScaling::Mean)
        gram /= double(samples);

    CovarianceInstance inst;
    inst.B = gram.topLeftCorner(n, n);
    inst.A = gram.topRightCorner(n, m);
    inst.C = gram.bottomRightCorner(m, m);
    inst.s1 = std::max<Index>(1, support_size(pop.u));
    inst.s2 = std::max<Index>(1, support_size(pop.v));
    inst.population = pop;
    return inst;
}

CovarianceInstance generate_instance(const GeneratorConfig& cfg, CovarianceScaling scaling,
                                     bool keep_population)
{
    auto inst = sample_covariance(generate_population(cfg), cfg.samples, cfg.seed, scaling);
    inst.label = "planted n=" + std::to_string(cfg.n) + " m=" + std::to_string(cfg.m) +
                 " s1=" + std::to_string(cfg.s1) + " s2=" + std::to_string(cfg.s2) +
                 " seed=" + std::to_string(cfg.seed);
    if (!keep_population)
        inst.population.reset();
    return inst;
}

CovarianceInstance scaled(const CovarianceInstance& inst, double factor)
{
    CovarianceInstance out = inst;
    out.A *= factor;
    out.B *= factor;
    out.C *= factor;
    return out;
}

} // namespace scca
