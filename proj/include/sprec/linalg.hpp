#pragma once

#include <Eigen/Dense>

namespace sprec {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Singular values of a matrix, sorted descending, all non-negative.
struct SingularSpectrum {
    Vector values;

    int size() const { return static_cast<int>(values.size()); }
    double operator[](Eigen::Index i) const { return values[i]; }

    // Throws std::invalid_argument if the ordering/sign invariants fail.
    void validate() const;
};

struct SvdFactors {
    Matrix U;                   // n1 x n, orthonormal columns
    SingularSpectrum spectrum;  // n = min(n1, n2) values
    Matrix V;                   // n2 x n, orthonormal columns

    Matrix reconstruct() const;
};

// Throws std::invalid_argument when M contains NaN/Inf.
void check_finite(const Matrix& M, const char* what);

// Full SVD factors (thin U/V). Throws std::runtime_error on non-convergence.
SvdFactors svd(const Matrix& M);

// Singular values only (no factors).
SingularSpectrum singular_values(const Matrix& M);

// (sum_i sigma_i^p)^(1/p) for p in (0,1]. p=1 is the nuclear norm.
double schatten_quasi_norm(const Matrix& M, double p);

double nuclear_norm(const Matrix& M);

// Entrywise sqrt(sum of squares); equals sqrt(sum sigma_i^2).
double frobenius(const Matrix& M);

// Best rank-r approximation (Eckart-Young truncation). r == n returns M.
Matrix best_rank_r(const Matrix& M, int r);

// (sum |x_i|^p)^(1/p) for p in (0,1].
double vector_lp(const Vector& x, double p);

// Magnitudes of x sorted descending.
Vector sorted_desc_abs(const Vector& x);

// Keeps the k largest-magnitude entries (with sign, in place), zeros the
// rest. Ties broken by first occurrence.
Vector top_k(const Vector& x, int k);

// Count of singular values above 1e-12 * sigma_1.
int numerical_rank(const SingularSpectrum& s);

}  // namespace sprec
