#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "sprec/linalg.hpp"
#include "sprec/rng.hpp"

using namespace sprec;

namespace {

Matrix random_matrix(int rows, int cols, std::uint64_t seed) {
    Rng rng(seed);
    Matrix M(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) M(i, j) = rng.normal();
    return M;
}

}  // namespace

TEST_SUITE("linalg") {

TEST_CASE("svd identity and diagonal") {
    const SvdFactors id = svd(Matrix::Identity(3, 3));
    for (int i = 0; i < 3; ++i) CHECK(id.spectrum[i] == doctest::Approx(1.0).epsilon(1e-12));

    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = 3.0;
    D(1, 1) = 4.0;
    const SvdFactors f = svd(D);
    CHECK(f.spectrum[0] == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(f.spectrum[1] == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("svd reconstructs and factors are orthonormal") {
    const Matrix M = random_matrix(5, 4, 11);
    const SvdFactors f = svd(M);
    f.spectrum.validate();
    CHECK((f.U.transpose() * f.U - Matrix::Identity(4, 4)).norm() < 1e-10);
    CHECK((f.V.transpose() * f.V - Matrix::Identity(4, 4)).norm() < 1e-10);
    CHECK((f.reconstruct() - M).norm() / M.norm() < 1e-8);
}

TEST_CASE("svd of the zero matrix is a zero spectrum") {
    const SvdFactors f = svd(Matrix::Zero(3, 2));
    CHECK(f.spectrum[0] == 0.0);
    CHECK(numerical_rank(f.spectrum) == 0);
}

TEST_CASE("svd rejects non-finite input") {
    Matrix M = Matrix::Zero(2, 2);
    M(0, 0) = std::nan("");
    CHECK_THROWS_AS(svd(M), std::invalid_argument);
}

TEST_CASE("schatten quasi-norm basics") {
    CHECK(schatten_quasi_norm(Matrix::Identity(4, 4), 0.5) ==
          doctest::Approx(std::pow(4.0, 2.0)).epsilon(1e-12));
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = 3.0;
    D(1, 1) = 4.0;
    CHECK(schatten_quasi_norm(D, 1.0) == doctest::Approx(7.0).epsilon(1e-12));

    // diag(10,1,1) at p = 0.5: (sqrt(10) + 2)^2, high-precision value
    Matrix D3 = Matrix::Zero(3, 3);
    D3(0, 0) = 10.0;
    D3(1, 1) = 1.0;
    D3(2, 2) = 1.0;
    CHECK(schatten_quasi_norm(D3, 0.5) ==
          doctest::Approx(26.64911064067351732799557417773).epsilon(1e-13));

    CHECK_THROWS_AS(schatten_quasi_norm(D, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(schatten_quasi_norm(D, 1.5), std::invalid_argument);
}

TEST_CASE("frobenius agrees with the entrywise formula") {
    CHECK(frobenius(Matrix::Zero(3, 3)) == 0.0);
    Matrix D = Matrix::Zero(2, 2);
    D(0, 0) = 3.0;
    D(1, 1) = 4.0;
    CHECK(frobenius(D) == doctest::Approx(5.0).epsilon(1e-14));

    const Matrix M = random_matrix(6, 5, 3);
    double entrywise = 0.0;
    for (int j = 0; j < 5; ++j)
        for (int i = 0; i < 6; ++i) entrywise += M(i, j) * M(i, j);
    CHECK(frobenius(M) == doctest::Approx(std::sqrt(entrywise)).epsilon(1e-10));

    // sqrt(sum sigma^2) route agrees too
    const SingularSpectrum s = singular_values(M);
    CHECK(frobenius(M) ==
          doctest::Approx(std::sqrt(s.values.squaredNorm())).epsilon(1e-10));
}

TEST_CASE("best_rank_r truncation") {
    Matrix D = Matrix::Zero(3, 3);
    D(0, 0) = 4.0;
    D(1, 1) = 3.0;
    D(2, 2) = 1.0;
    const Matrix T = best_rank_r(D, 2);
    CHECK(T(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(T(1, 1) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(T(2, 2)) < 1e-12);

    const Matrix M = random_matrix(4, 4, 5);
    CHECK(best_rank_r(M, 0).norm() == 0.0);
    CHECK((best_rank_r(M, 4) - M).norm() == 0.0);
    CHECK_THROWS_AS(best_rank_r(M, 5), std::invalid_argument);
}

TEST_CASE("best_rank_r residual equals the tail spectrum") {
    const Matrix M = random_matrix(6, 5, 21);
    const SingularSpectrum s = singular_values(M);
    const double expected =
        std::sqrt(s[2] * s[2] + s[3] * s[3] + s[4] * s[4]);
    CHECK((M - best_rank_r(M, 2)).norm() == doctest::Approx(expected).epsilon(1e-9));
}

TEST_CASE("best_rank_r beats random rank-r perturbations") {
    const Matrix M = random_matrix(5, 4, 33);
    const Matrix best = best_rank_r(M, 2);
    const double best_err = (M - best).norm();
    Rng rng(77);
    for (int trial = 0; trial < 100; ++trial) {
        Matrix G(5, 2), H(4, 2);
        for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < 5; ++i) G(i, j) = rng.normal();
            for (int i = 0; i < 4; ++i) H(i, j) = rng.normal();
        }
        // random rank-2 candidate scaled to the same magnitude ballpark
        Matrix cand = G * H.transpose();
        cand *= M.norm() / cand.norm();
        CHECK((M - cand).norm() >= best_err - 1e-12);
    }
}

TEST_CASE("vector_lp examples") {
    Vector ones(4);
    ones << 1, 1, 1, 1;
    CHECK(vector_lp(ones, 0.5) == doctest::Approx(16.0).epsilon(1e-12));
    CHECK(vector_lp(Vector::Zero(5), 0.7) == 0.0);
    Vector v(2);
    v << 3, -4;
    CHECK(vector_lp(v, 1.0) == doctest::Approx(7.0).epsilon(1e-14));
    CHECK_THROWS_AS(vector_lp(v, 0.0), std::invalid_argument);
}

TEST_CASE("sorted_desc_abs and top_k") {
    Vector v(3);
    v << -3, 1, 2;
    const Vector sorted = sorted_desc_abs(v);
    CHECK(sorted[0] == 3.0);
    CHECK(sorted[1] == 2.0);
    CHECK(sorted[2] == 1.0);

    const Vector kept = top_k(v, 1);
    CHECK(kept[0] == -3.0);  // sign preserved, original position
    CHECK(kept[1] == 0.0);
    CHECK(kept[2] == 0.0);

    CHECK_THROWS_AS(top_k(v, 4), std::invalid_argument);
}

TEST_CASE("top_k tie-break keeps the first occurrence") {
    // exhaustive over signed two-element ties
    for (double a : {2.0, -2.0}) {
        for (double b : {2.0, -2.0}) {
            Vector v(2);
            v << a, b;
            const Vector kept = top_k(v, 1);
            CHECK(kept[0] == a);
            CHECK(kept[1] == 0.0);
        }
    }
}

TEST_CASE("spectrum ordering and norm consistency properties") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Matrix M = random_matrix(5, 6, 1000 + seed);
        const SingularSpectrum s = singular_values(M);
        s.validate();
        CHECK(schatten_quasi_norm(M, 1.0) >= frobenius(M) - 1e-10);
        CHECK(frobenius(M) >= s[0] - 1e-10);
    }
}

TEST_CASE("schatten^p equals vector_lp of the spectrum") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const Matrix M = random_matrix(4, 5, 2000 + seed);
        const SingularSpectrum s = singular_values(M);
        for (double p : {0.25, 0.5, 0.75, 1.0}) {
            const double lhs = std::pow(schatten_quasi_norm(M, p), p);
            const double rhs = std::pow(vector_lp(s.values, p), p);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
}

}  // TEST_SUITE
