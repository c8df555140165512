#include <doctest.h>

#include "scca/errors.hpp"
#include "scca/linalg.hpp"
#include "support.hpp"

using namespace scca;

TEST_CASE("sym_eig returns descending eigenvalues of a symmetric matrix")
{
    Matrix M(3, 3);
    M << 2, 1, 0, 1, 2, 0, 0, 0, 5;
    const auto e = sym_eig(M);
    CHECK(e.values[0] == doctest::Approx(5));
    CHECK(e.values[1] == doctest::Approx(3));
    CHECK(e.values[2] == doctest::Approx(1));
    CHECK((e.vectors * e.values.asDiagonal() * e.vectors.transpose() - M).norm() < 1e-12);
}

TEST_CASE("symmetrized rejects non-square, non-finite and asymmetric input")
{
    CHECK_THROWS_AS(symmetrized(Matrix(2, 3)), InvalidMatrix);
    Matrix M = Matrix::Identity(2, 2);
    M(0, 1) = 0.5;
    CHECK_THROWS_AS(symmetrized(M), InvalidMatrix);
    M(0, 1) = std::nan("");
    M(1, 0) = std::nan("");
    CHECK_THROWS_AS(symmetrized(M), InvalidMatrix);
    M = Matrix::Identity(2, 2);
    M(0, 1) = 1e-14;
    CHECK_NOTHROW(symmetrized(M));
}

TEST_CASE("pinv satisfies the Moore-Penrose conditions on a singular matrix")
{
    Rng rng(3, Rng::kTestData);
    const Matrix F = test::normal_matrix(rng, 5, 2);
    const Matrix M = F * F.transpose();
    const Matrix P = pinv(M);
    CHECK((M * P * M - M).norm() < 1e-9);
    CHECK((P * M * P - P).norm() < 1e-9);
    CHECK((P - P.transpose()).norm() < 1e-12);
}

TEST_CASE("pinv_sqrt squares to the pseudo-inverse and rejects indefinite input")
{
    Rng rng(4, Rng::kTestData);
    const Matrix F = test::normal_matrix(rng, 4, 3);
    const Matrix M = F * F.transpose();
    const Matrix R = pinv_sqrt(M);
    CHECK((R * R - pinv(M)).norm() < 1e-8);
    Matrix bad = Matrix::Identity(2, 2);
    bad(1, 1) = -1;
    CHECK_THROWS_AS(pinv_sqrt(bad), NotPSD);
}

TEST_CASE("sigma_max returns the leading singular triple")
{
    Rng rng(5, Rng::kTestData);
    for (Index rows : {1, 3, 6})
        for (Index cols : {1, 4}) {
            const Matrix M = test::normal_matrix(rng, rows, cols);
            const auto t = sigma_max(M);
            Eigen::JacobiSVD<Matrix> svd(M);
            CHECK(t.value == doctest::Approx(svd.singularValues()[0]).epsilon(1e-10));
            CHECK((M * t.right - t.value * t.left).norm() < 1e-9);
            CHECK(t.left.norm() == doctest::Approx(1));
            CHECK(t.right.norm() == doctest::Approx(1));
        }
    const auto z = sigma_max(Matrix::Zero(2, 3));
    CHECK(z.value == 0);
    CHECK(z.left[0] == 1);
    CHECK(z.right[0] == 1);
}

TEST_CASE("numeric_rank counts eigenvalues above the relative threshold")
{
    Rng rng(6, Rng::kTestData);
    const Matrix F = test::normal_matrix(rng, 6, 3);
    CHECK(numeric_rank(Matrix(F * F.transpose())) == 3);
    CHECK(numeric_rank(Matrix::Identity(4, 4)) == 4);
    CHECK(numeric_rank(Matrix::Zero(3, 3)) == 0);
}

TEST_CASE("block_psd_check agrees across the three routes")
{
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto inst = test::random_instance(seed, 4, 3, 1, 1, 5);
        for (auto route : {PsdRoute::Direct, PsdRoute::SchurOnB, PsdRoute::SchurOnC})
            CHECK(block_psd_check(inst.B, inst.A, inst.C, 1e-8, route).psd);
        const Matrix A2 = 3 * inst.A;
        for (auto route : {PsdRoute::Direct, PsdRoute::SchurOnB, PsdRoute::SchurOnC})
            CHECK_FALSE(block_psd_check(inst.B, A2, inst.C, 1e-8, route).psd);
    }
}

TEST_CASE("block_psd_check catches a range violation when B is singular")
{
    Matrix B = Matrix::Zero(2, 2);
    B(0, 0) = 1;
    const Matrix C = Matrix::Identity(1, 1);
    Matrix A(2, 1);
    A << 0, 0.1;
    CHECK_FALSE(block_psd_check(B, A, C, 1e-8, PsdRoute::SchurOnB).psd);
    CHECK_FALSE(block_psd_check(B, A, C, 1e-8, PsdRoute::Direct).psd);
    CHECK_FALSE(block_psd_check(B, A, C, 1e-8, PsdRoute::SchurOnC).psd);
}

TEST_CASE("linalg templates work in single precision")
{
    Eigen::MatrixXf M(2, 2);
    M << 4, 0, 0, 1;
    const auto R = pinv_sqrt(M);
    CHECK(R(0, 0) == doctest::Approx(0.5f));
    CHECK(sigma_max(M).value == doctest::Approx(4.0f));
}
