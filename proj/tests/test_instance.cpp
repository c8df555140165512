#include <doctest.h>

#include "scca/cca.hpp"
#include "scca/errors.hpp"
#include "scca/instance.hpp"
#include "support.hpp"

using namespace scca;

TEST_CASE("validate accepts identity blocks and rejects a joint PSD failure")
{
    CovarianceInstance inst;
    inst.B = Matrix::Identity(2, 2);
    inst.C = Matrix::Identity(2, 2);
    inst.A = Matrix::Zero(2, 2);
    inst.s1 = inst.s2 = 1;
    CHECK(validate(inst).accepted);

    inst.A = 2 * Matrix::Identity(2, 2);
    const auto rep = validate(inst);
    CHECK_FALSE(rep.accepted);
    CHECK_FALSE(rep.failures.empty());
}

TEST_CASE("validate reports bad budgets and shapes without throwing")
{
    CovarianceInstance inst;
    inst.B = Matrix::Identity(2, 2);
    inst.C = Matrix::Identity(3, 3);
    inst.A = Matrix::Zero(2, 3);
    inst.s1 = 0;
    inst.s2 = 4;
    auto rep = validate(inst);
    CHECK_FALSE(rep.accepted);
    CHECK(rep.failures.size() >= 2);

    inst.s1 = inst.s2 = 1;
    inst.A = Matrix::Zero(3, 2);
    CHECK_NOTHROW(rep = validate(inst));
    CHECK_FALSE(rep.accepted);
}

TEST_CASE("generated population satisfies its invariants")
{
    const auto pop = generate_population(test::config(10, 10, 5, 5, 42));
    CHECK(pop.u.dot(pop.B0 * pop.u) == doctest::Approx(1).epsilon(1e-10));
    CHECK(pop.v.dot(pop.C0 * pop.v) == doctest::Approx(1).epsilon(1e-10));
    CHECK((pop.A0 - pop.lambda * pop.B0 * pop.u * pop.v.transpose() * pop.C0).norm() < 1e-10);
    CHECK((pop.u.array() != 0).count() == 5);
    CHECK((pop.v.array() != 0).count() == 5);
    CHECK(pop.lambda > 0);
    CHECK(pop.lambda < 1);
    CHECK(sym_eig(pop.B0).values.minCoeff() >= 1 - 1e-10);
    CHECK(sym_eig(pop.C0).values.minCoeff() >= 1 - 1e-10);
}

TEST_CASE("generation is deterministic per seed")
{
    const auto a = generate_population(test::config(6, 7, 2, 3, 9));
    const auto b = generate_population(test::config(6, 7, 2, 3, 9));
    const auto c = generate_population(test::config(6, 7, 2, 3, 10));
    CHECK(a.A0 == b.A0);
    CHECK(a.u == b.u);
    CHECK(a.lambda == b.lambda);
    CHECK(a.A0 != c.A0);

    const auto i1 = generate_instance(test::config(6, 7, 2, 3, 9, 200));
    const auto i2 = generate_instance(test::config(6, 7, 2, 3, 9, 200));
    CHECK(i1.A == i2.A);
    CHECK(i1.B == i2.B);
}

TEST_CASE("sample covariance is valid and close to the population")
{
    const auto inst = generate_instance(test::config(10, 10, 5, 5, 3));
    REQUIRE(inst.population);
    CHECK(validate(inst).accepted);
    const auto& pop = *inst.population;
    CHECK((inst.B - pop.B0).norm() / pop.B0.norm() < 0.2);
    CHECK((inst.C - pop.C0).norm() / pop.C0.norm() < 0.2);
    CHECK(inst.s1 == 5);
    CHECK(inst.s2 == 5);
}

TEST_CASE("sum scaling multiplies the mean covariance by N")
{
    const auto cfg = test::config(4, 3, 2, 2, 5, 50);
    const auto mean = generate_instance(cfg, CovarianceScaling::Mean);
    const auto sum = generate_instance(cfg, CovarianceScaling::Sum);
    CHECK((sum.B - 50 * mean.B).norm() < 1e-9 * sum.B.norm());
    CHECK((sum.A - 50 * mean.A).norm() < 1e-9 * sum.B.norm());
}

TEST_CASE("subset value is invariant under common positive scaling")
{
    const auto inst = generate_instance(test::config(6, 6, 3, 3, 8, 300));
    for (double c : {1e-3, 0.5, 50.0}) {
        const auto s = scaled(inst, c);
        const SupportPair sp{{0, 2, 4}, {1, 3, 5}};
        CHECK(subset_value(s, sp).value == doctest::Approx(subset_value(inst, sp).value).epsilon(1e-9));
    }
}

TEST_CASE("generator config rejects bad sizes")
{
    CHECK_THROWS_AS(test::config(0, 3, 1, 1, 1).check(), InvalidConfig);
    CHECK_THROWS_AS(test::config(3, 3, 4, 1, 1).check(), InvalidConfig);
    CHECK_THROWS_AS(test::config(3, 3, 1, 1, 1, 0).check(), InvalidConfig);
}

TEST_CASE("sample_covariance rejects an indefinite population")
{
    auto pop = generate_population(test::config(3, 3, 1, 1, 2));
    pop.A0 *= 10;
    CHECK_THROWS_AS(sample_covariance(pop, 10, 1), InvalidPopulation);
}
