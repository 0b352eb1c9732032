#include "sprec/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace sprec {

namespace {

constexpr double kRankFloor = 1e-12;

void check_p(double p) {
    if (!(p > 0.0) || p > 1.0)
        throw std::invalid_argument("p must lie in (0, 1]");
}

}  // namespace

void SingularSpectrum::validate() const {
    for (Eigen::Index i = 0; i < values.size(); ++i) {
        if (!std::isfinite(values[i]) || values[i] < 0.0)
            throw std::invalid_argument("singular spectrum has a negative or non-finite value");
        if (i > 0 && values[i] > values[i - 1])
            throw std::invalid_argument("singular spectrum is not sorted descending");
    }
}

Matrix SvdFactors::reconstruct() const {
    return U * spectrum.values.asDiagonal() * V.transpose();
}

void check_finite(const Matrix& M, const char* what) {
    if (!M.allFinite()) {
        std::ostringstream msg;
        msg << what << ": matrix contains NaN or Inf";
        throw std::invalid_argument(msg.str());
    }
}

SvdFactors svd(const Matrix& M) {
    check_finite(M, "svd");
    Eigen::JacobiSVD<Matrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    if (dec.info() != Eigen::Success) {
        std::ostringstream msg;
        msg << "svd: factorization did not converge on a " << M.rows() << "x" << M.cols()
            << " matrix";
        throw std::runtime_error(msg.str());
    }
    SvdFactors out;
    out.U = dec.matrixU();
    out.V = dec.matrixV();
    out.spectrum.values = dec.singularValues();
    return out;
}

SingularSpectrum singular_values(const Matrix& M) {
    check_finite(M, "singular_values");
    Eigen::JacobiSVD<Matrix> dec(M);
    if (dec.info() != Eigen::Success)
        throw std::runtime_error("singular_values: factorization did not converge");
    return SingularSpectrum{dec.singularValues()};
}

double schatten_quasi_norm(const Matrix& M, double p) {
    check_p(p);
    const SingularSpectrum s = singular_values(M);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < s.values.size(); ++i) acc += std::pow(s.values[i], p);
    return std::pow(acc, 1.0 / p);
}

double nuclear_norm(const Matrix& M) { return schatten_quasi_norm(M, 1.0); }

double frobenius(const Matrix& M) {
    check_finite(M, "frobenius");
    return M.norm();
}

Matrix best_rank_r(const Matrix& M, int r) {
    check_finite(M, "best_rank_r");
    const int n = static_cast<int>(std::min(M.rows(), M.cols()));
    if (r < 0 || r > n)
        throw std::invalid_argument("best_rank_r: r must lie in [0, min(n1, n2)]");
    if (r == n) return M;
    if (r == 0) return Matrix::Zero(M.rows(), M.cols());
    const SvdFactors f = svd(M);
    return f.U.leftCols(r) * f.spectrum.values.head(r).asDiagonal() *
           f.V.leftCols(r).transpose();
}

double vector_lp(const Vector& x, double p) {
    check_p(p);
    if (!x.allFinite()) throw std::invalid_argument("vector_lp: non-finite entry");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < x.size(); ++i) acc += std::pow(std::abs(x[i]), p);
    return std::pow(acc, 1.0 / p);
}

Vector sorted_desc_abs(const Vector& x) {
    if (!x.allFinite()) throw std::invalid_argument("sorted_desc_abs: non-finite entry");
    Vector out = x.cwiseAbs();
    std::sort(out.data(), out.data() + out.size(), std::greater<double>());
    return out;
}

Vector top_k(const Vector& x, int k) {
    if (!x.allFinite()) throw std::invalid_argument("top_k: non-finite entry");
    if (k < 0 || k > x.size()) throw std::invalid_argument("top_k: k out of range");
    std::vector<Eigen::Index> idx(static_cast<size_t>(x.size()));
    std::iota(idx.begin(), idx.end(), 0);
    // stable on index so equal magnitudes keep the first occurrence
    std::stable_sort(idx.begin(), idx.end(), [&](Eigen::Index a, Eigen::Index b) {
        return std::abs(x[a]) > std::abs(x[b]);
    });
    Vector out = Vector::Zero(x.size());
    for (int i = 0; i < k; ++i) out[idx[static_cast<size_t>(i)]] = x[idx[static_cast<size_t>(i)]];
    return out;
}

int numerical_rank(const SingularSpectrum& s) {
    if (s.size() == 0) return 0;
    const double floor = kRankFloor * s.values[0];
    int rank = 0;
    for (Eigen::Index i = 0; i < s.values.size(); ++i)
        if (s.values[i] > floor) ++rank;
    return s.values[0] == 0.0 ? 0 : rank;
}

}  // namespace sprec
