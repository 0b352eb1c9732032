#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "sprec/nsp.hpp"
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

SingularSpectrum spectrum_of(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return SingularSpectrum{v};
}

SingularSpectrum random_spectrum(int n, Rng& rng) {
    Vector v(n);
    for (int i = 0; i < n; ++i) v[i] = std::abs(rng.normal());
    std::sort(v.data(), v.data() + n, std::greater<double>());
    return SingularSpectrum{v};
}

}  // namespace

TEST_SUITE("nsp") {

TEST_CASE("nsp_check examples") {
    const NspVerdict flat = nsp_check(spectrum_of({1, 1, 1, 1}), 1, 1.0);
    CHECK(flat.holds);
    CHECK(flat.lhs == doctest::Approx(1.0));
    CHECK(flat.rhs == doctest::Approx(3.0));

    const NspVerdict spiked = nsp_check(spectrum_of({10, 1, 1}), 1, 1.0);
    CHECK_FALSE(spiked.holds);
    CHECK(spiked.margin == doctest::Approx(-8.0));

    // smaller p weakens the condition: 10^0.1 < 2
    const NspVerdict small_p = nsp_check(spectrum_of({10, 1, 1}), 1, 0.1);
    CHECK(small_p.holds);
    CHECK(small_p.lhs == doctest::Approx(std::pow(10.0, 0.1)).epsilon(1e-12));

    CHECK_THROWS_AS(nsp_check(spectrum_of({1, 1}), 2, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(nsp_check(spectrum_of({1, 1, 1}), 1, 1.5), std::invalid_argument);
}

TEST_CASE("boundary margin of zero does not hold") {
    const NspVerdict tie = nsp_check(spectrum_of({1, 1}), 1, 1.0);
    CHECK_FALSE(tie.holds);
    CHECK(tie.margin == 0.0);
}

TEST_CASE("nsp_check_2r examples") {
    CHECK(nsp_check_2r(spectrum_of({1, 1, 1, 1, 1}), 1, 1.0).holds);  // 2 < 3
    const NspVerdict v = nsp_check_2r(spectrum_of({2, 1, 1, 1}), 1, 1.0);
    CHECK_FALSE(v.holds);  // 3 vs 2
    // ...while the rank-r condition holds on the same spectrum: 2 < 3
    CHECK(nsp_check(spectrum_of({2, 1, 1, 1}), 1, 1.0).holds);
    CHECK_THROWS_AS(nsp_check_2r(spectrum_of({1, 1, 1, 1}), 2, 1.0), std::invalid_argument);
}

TEST_CASE("2r condition implies the rank-r condition") {
    Rng rng(808);
    int implications = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const SingularSpectrum s = random_spectrum(5 + static_cast<int>(rng.below(4)), rng);
        const double p = 0.1 + 0.9 * rng.uniform();
        const int r = 1 + static_cast<int>(rng.below(2));
        if (2 * r >= s.size()) continue;
        if (nsp_check_2r(s, r, p).holds) {
            ++implications;
            CHECK(nsp_check(s, r, p).holds);
        }
    }
    CHECK(implications > 500);  // the implication was actually exercised
}

TEST_CASE("monotonicity: success at p = 1 transfers to smaller p") {
    Rng rng(909);
    const std::vector<double> ps{0.1, 0.3, 0.5, 0.7, 0.9};
    int transfers = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const SingularSpectrum s = random_spectrum(4 + static_cast<int>(rng.below(5)), rng);
        const int r = 1 + static_cast<int>(rng.below(3));
        if (r >= s.size()) continue;
        CHECK(nsp_monotone_in_p(s, r, ps));
        if (nsp_check(s, r, 1.0).holds) ++transfers;
    }
    CHECK(transfers > 1000);
}

TEST_CASE("monotonicity is one-way") {
    // fails at p = 1 yet holds at p = 0.1
    const SingularSpectrum s = spectrum_of({10, 1, 1});
    CHECK_FALSE(nsp_check(s, 1, 1.0).holds);
    CHECK(nsp_check(s, 1, 0.1).holds);
    CHECK(nsp_monotone_in_p(s, 1, {0.1}));  // vacuous
}

TEST_CASE("constant spectra give p-independent verdicts") {
    for (double c : {0.3, 1.0, 42.0}) {
        const SingularSpectrum s = spectrum_of({c, c, c, c, c});
        for (double p : {0.2, 0.5, 1.0}) {
            CHECK(nsp_check(s, 1, p).holds);
            CHECK_FALSE(nsp_check(s, 3, p).holds);  // 3c^p vs 2c^p
        }
    }
}

TEST_CASE("verdicts are scale invariant") {
    Rng rng(111);
    for (int trial = 0; trial < 200; ++trial) {
        const SingularSpectrum s = random_spectrum(6, rng);
        const double p = 0.1 + 0.9 * rng.uniform();
        const int r = 1 + static_cast<int>(rng.below(4));
        const double scale = std::exp(3.0 * rng.normal());
        SingularSpectrum scaled{Vector(s.values * scale)};
        CHECK(nsp_check(s, r, p).holds == nsp_check(scaled, r, p).holds);
    }
}

TEST_CASE("subadditivity trivial cases") {
    const Matrix A = random_matrix(4, 3, 5);
    const SubadditivityResult same = subadditivity_check(A, A, 0.5);
    CHECK(same.holds);
    CHECK(same.lhs == doctest::Approx(0.0).epsilon(1e-12));
    const SubadditivityResult zero = subadditivity_check(A, Matrix::Zero(4, 3), 0.5);
    CHECK(zero.holds);
    CHECK(zero.slack == doctest::Approx(0.0).epsilon(1e-9));
    CHECK_THROWS_AS(subadditivity_check(A, Matrix::Zero(3, 4), 0.5), std::invalid_argument);
}

TEST_CASE("subadditivity holds on random pairs") {
    Rng rng(222);
    for (int trial = 0; trial < 2000; ++trial) {
        const int rows = 2 + static_cast<int>(rng.below(7));
        const int cols = 2 + static_cast<int>(rng.below(5));
        const Matrix A = random_matrix(rows, cols, 4000 + trial);
        const Matrix B = random_matrix(rows, cols, 9000 + trial);
        for (double p : {0.25, 0.5, 0.75, 1.0}) {
            const SubadditivityResult res = subadditivity_check(A, B, p);
            CHECK(res.holds);
            CHECK(res.slack >= -1e-9 * std::max(1.0, res.lhs));
        }
    }
}

TEST_CASE("lemma5 transform basics") {
    const Matrix W = random_matrix(4, 3, 77);
    const Lemma5Result zero = lemma5_transform(Matrix::Zero(4, 3), W, 0.5);
    CHECK(zero.X1.norm() == 0.0);
    CHECK_FALSE(zero.antecedent);  // ||W||_p <= 0 impossible for W != 0
    CHECK(zero.implication_holds);

    // X1 carries X0's spectrum in W's frame
    const Matrix X0 = random_matrix(4, 3, 78);
    const Lemma5Result res = lemma5_transform(X0, W, 0.5);
    const SingularSpectrum s0 = singular_values(X0);
    const SingularSpectrum s1 = singular_values(res.X1);
    CHECK((s0.values - s1.values).norm() < 1e-10);
    CHECK_THROWS_AS(lemma5_transform(X0, Matrix::Zero(3, 4), 0.5), std::invalid_argument);
}

TEST_CASE("lemma5 on opposing diagonal pairs, exhaustively") {
    // 2x2 diagonal X0 and W with all sign patterns and a magnitude sweep
    for (double a : {0.5, 1.0, 2.0})
        for (double b : {0.5, 1.5})
            for (int sa = -1; sa <= 1; sa += 2)
                for (int sb = -1; sb <= 1; sb += 2)
                    for (double w1 : {0.25, 1.0, 3.0})
                        for (double w2 : {0.5, 2.0}) {
                            Matrix X0 = Matrix::Zero(2, 2);
                            X0(0, 0) = sa * a;
                            X0(1, 1) = sb * b;
                            Matrix W = Matrix::Zero(2, 2);
                            W(0, 0) = -sa * w1;
                            W(1, 1) = -sb * w2;
                            for (double p : {0.5, 1.0})
                                CHECK(lemma5_transform(X0, W, p).implication_holds);
                        }
}

TEST_CASE("lemma5 never falsified on adversarial random pairs") {
    Rng rng(333);
    int non_vacuous = 0;
    for (int trial = 0; trial < 3000; ++trial) {
        const int rows = 2 + static_cast<int>(rng.below(4));
        const int cols = 2 + static_cast<int>(rng.below(4));
        const Matrix X0 = random_matrix(rows, cols, 50000 + trial);
        Matrix W;
        if (trial % 2 == 0) {
            W = random_matrix(rows, cols, 70000 + trial);
        } else {
            // steer toward antecedent-true cases: W mostly cancels X0
            const double s = 0.5 + rng.uniform();
            W = -s * X0 + 0.15 * random_matrix(rows, cols, 90000 + trial);
        }
        for (double p : {0.5, 1.0}) {
            const Lemma5Result res = lemma5_transform(X0, W, p);
            CHECK(res.implication_holds);
            if (res.antecedent) ++non_vacuous;
        }
    }
    CHECK(non_vacuous > 500);
}

TEST_CASE("falsifier finds witnesses for hopeless ranks and reports json") {
    // n = 4, r = 3: the NSP needs sigma_4 mass to beat sigma_1..3; random
    // null spaces of a tiny operator will not provide that
    const auto op = MeasurementOperator::gaussian(6, 4, 4, 13);
    const FalsifierReport report = nsp_falsify(op, 3, 0.5, 100, 99);
    CHECK(report.witness_found);
    CHECK(report.margin <= 0.0);
    CHECK(report.checked >= 1);
    const nlohmann::json j = report.to_json();
    CHECK(j["witness_found"] == true);
    CHECK(j["checked"] == report.checked);
    CHECK(j["witness_spectrum"].size() == 4);
}

TEST_CASE("falsifier is exact for one-dimensional null spaces") {
    // m = n1*n2 - 1 leaves a single direction; the verdict is decided by it
    const auto op = MeasurementOperator::gaussian(15, 4, 4, 21);
    const FalsifierReport report = nsp_falsify(op, 1, 0.5, 20, 7);
    const auto basis = null_space_sample(op, 1234, 1);
    const NspVerdict direct = nsp_check(singular_values(basis[0]), 1, 0.5);
    CHECK(report.witness_found == !direct.holds);
}

TEST_CASE("generous operators typically show no witness") {
    const auto op = MeasurementOperator::gaussian(14, 4, 4, 31);
    const FalsifierReport report = nsp_falsify(op, 1, 0.5, 150, 3);
    CHECK(report.checked == 150);
    CHECK_FALSE(report.witness_found);
    CHECK(report.margin > 0.0);  // smallest margin observed stays positive
}

}  // TEST_SUITE
