#include <doctest.h>

#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sprec/operators.hpp"
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

Vector random_vector(int n, std::uint64_t seed) {
    Rng rng(seed);
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = rng.normal();
    return v;
}

}  // namespace

TEST_SUITE("operators") {

TEST_CASE("gaussian operator is reproducible") {
    const auto a = MeasurementOperator::gaussian(4, 2, 2, 7);
    const auto b = MeasurementOperator::gaussian(4, 2, 2, 7);
    CHECK((a.representation() - b.representation()).norm() == 0.0);
    const auto c = MeasurementOperator::gaussian(4, 2, 2, 8);
    CHECK((a.representation() - c.representation()).norm() > 0.0);
}

TEST_CASE("gaussian operator refuses oversized allocations") {
    CHECK_THROWS_AS(MeasurementOperator::gaussian(1000, 100, 200, 1),
                    std::invalid_argument);
}

TEST_CASE("gaussian column norms concentrate near 1") {
    const auto op = MeasurementOperator::gaussian(400, 4, 4, 3);
    const Matrix& rep = op.representation();
    double mean = 0.0;
    for (Eigen::Index j = 0; j < rep.cols(); ++j) mean += rep.col(j).squaredNorm();
    mean /= static_cast<double>(rep.cols());
    CHECK(mean == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("linearity and adjoint consistency on random probes") {
    const auto op = MeasurementOperator::gaussian(10, 3, 4, 5);
    for (std::uint64_t trial = 0; trial < 100; ++trial) {
        const Matrix X = random_matrix(3, 4, 100 + trial);
        const Matrix Y = random_matrix(3, 4, 300 + trial);
        const Vector y = random_vector(10, 500 + trial);
        const double alpha = 1.7, beta = -0.4;
        CHECK((op.apply(alpha * X + beta * Y) - alpha * op.apply(X) - beta * op.apply(Y))
                  .norm() < 1e-10 * (1.0 + op.apply(X).norm()));
        const double lhs = op.apply(X).dot(y);
        const double rhs = (X.array() * op.adjoint(y).array()).sum();
        CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
    }
}

TEST_CASE("apply of zero is zero and shapes are checked") {
    const auto op = MeasurementOperator::gaussian(6, 2, 3, 1);
    CHECK(op.apply(Matrix::Zero(2, 3)).norm() == 0.0);
    CHECK_THROWS_AS(op.apply(Matrix::Zero(3, 2)), std::invalid_argument);
    CHECK_THROWS_AS(op.adjoint(Vector::Zero(5)), std::invalid_argument);
}

TEST_CASE("entry mask basics") {
    // full mask is the whole vectorization
    std::vector<std::pair<int, int>> all;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) all.emplace_back(i, j);
    const auto full = MeasurementOperator::entry_mask(all, 2, 2);
    Matrix X(2, 2);
    X << 1, 2, 3, 4;
    const Vector y = full.apply(X);
    // row-major order over the sorted index set: (0,0),(0,1),(1,0),(1,1)
    CHECK(y[0] == 1.0);
    CHECK(y[1] == 2.0);
    CHECK(y[2] == 3.0);
    CHECK(y[3] == 4.0);

    const auto single = MeasurementOperator::entry_mask({{0, 0}}, 2, 2);
    CHECK(single.apply(X)[0] == 1.0);

    CHECK_THROWS_AS(MeasurementOperator::entry_mask({{0, 0}, {0, 0}}, 2, 2),
                    std::invalid_argument);
    CHECK_THROWS_AS(MeasurementOperator::entry_mask({{2, 0}}, 2, 2), std::invalid_argument);
}

TEST_CASE("mask adjoint scatters and round-trips") {
    const auto mask = MeasurementOperator::entry_mask({{0, 1}, {2, 2}, {1, 0}}, 3, 3);
    const Vector y = random_vector(3, 9);
    const Matrix back = mask.adjoint(y);
    // A(A*(y)) = y holds exactly for masks
    CHECK((mask.apply(back) - y).norm() == 0.0);
    // everything scattered lands on the mask positions
    CHECK(back.cwiseAbs().sum() == doctest::Approx(y.cwiseAbs().sum()).epsilon(1e-14));
}

TEST_CASE("operator json round trip") {
    const auto op = MeasurementOperator::gaussian(5, 2, 3, 42);
    const auto back = MeasurementOperator::from_json(op.to_json());
    CHECK(back.kind() == OperatorKind::gaussian);
    CHECK((back.representation() - op.representation()).norm() == 0.0);
    CHECK_FALSE(op.to_json().contains("entries"));  // seeded kinds omit entries

    const auto mask = MeasurementOperator::entry_mask({{0, 1}, {1, 0}}, 2, 2);
    const auto mask_back = MeasurementOperator::from_json(mask.to_json());
    CHECK((mask_back.representation() - mask.representation()).norm() == 0.0);

    const auto custom = MeasurementOperator::custom(random_matrix(3, 4, 8), 2, 2);
    const auto custom_back = MeasurementOperator::from_json(custom.to_json());
    CHECK((custom_back.representation() - custom.representation()).norm() == 0.0);
}

TEST_CASE("null space samples are genuinely in the null space") {
    const auto op = MeasurementOperator::gaussian(7, 3, 4, 17);
    const auto samples = null_space_sample(op, 23, 30);
    CHECK(samples.size() == 30);
    for (const Matrix& W : samples) {
        CHECK(W.norm() > 0.0);
        CHECK(op.apply(W).norm() <= 1e-10 * W.norm());
        const Vector w = Eigen::Map<const Vector>(W.data(), W.size());
        CHECK((op.representation() * w).lpNorm<Eigen::Infinity>() <= 1e-10 * W.norm());
    }
}

TEST_CASE("null space samples span the full kernel") {
    const auto op = MeasurementOperator::gaussian(7, 3, 4, 29);
    const int kernel_dim = 3 * 4 - 7;
    const auto samples = null_space_sample(op, 31, 40);
    Matrix stacked(12, static_cast<Eigen::Index>(samples.size()));
    for (size_t i = 0; i < samples.size(); ++i)
        stacked.col(static_cast<Eigen::Index>(i)) =
            Eigen::Map<const Vector>(samples[i].data(), 12);
    Eigen::ColPivHouseholderQR<Matrix> qr(stacked);
    qr.setThreshold(1e-8);
    CHECK(qr.rank() == kernel_dim);
}

TEST_CASE("trivial null space is an explicit error") {
    const auto square = MeasurementOperator::custom(Matrix::Identity(4, 4), 2, 2);
    CHECK_THROWS_AS(null_space_sample(square, 1, 1), EmptyNullSpaceError);
}

}  // TEST_SUITE
