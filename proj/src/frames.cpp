#include "sprec/frames.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "sprec/rng.hpp"

namespace sprec {

namespace {

std::vector<std::vector<int>> all_supports(int cols, int order) {
    std::vector<std::vector<int>> out;
    std::vector<int> support(static_cast<size_t>(order));
    for (int i = 0; i < order; ++i) support[static_cast<size_t>(i)] = i;
    while (true) {
        out.push_back(support);
        int pos = order - 1;
        while (pos >= 0 && support[static_cast<size_t>(pos)] == cols - order + pos) --pos;
        if (pos < 0) break;
        ++support[static_cast<size_t>(pos)];
        for (int i = pos + 1; i < order; ++i)
            support[static_cast<size_t>(i)] = support[static_cast<size_t>(i - 1)] + 1;
    }
    return out;
}

}  // namespace

Matrix design_low_ric_frame(int rows, int cols, int order, int iterations,
                            std::uint64_t seed) {
    if (rows < 1 || cols < 1 || order < 2 || order > cols)
        throw std::invalid_argument("design_low_ric_frame: bad dimensions");
    const auto supports = all_supports(cols, order);
    if (supports.size() > 200000)
        throw std::invalid_argument("design_low_ric_frame: too many supports");

    Rng rng(mix_seed(seed, {0x6672616d65ULL}));
    Matrix A(rows, cols);
    for (int j = 0; j < cols; ++j) {
        for (int i = 0; i < rows; ++i) A(i, j) = rng.normal();
        A.col(j).normalize();
    }

    Matrix momentum = Matrix::Zero(rows, cols);
    Matrix grad(rows, cols);
    Matrix sub(rows, order);
    double lr = 0.08;
    for (int it = 0; it < iterations; ++it) {
        const double beta = 10.0 + 50.0 * it / std::max(iterations, 1);
        grad.setZero();

        // First pass for the softmax normalizer, second for the gradient.
        double max_dev = 0.0;
        std::vector<double> dev_hi(supports.size()), dev_lo(supports.size());
        for (size_t s = 0; s < supports.size(); ++s) {
            for (int j = 0; j < order; ++j)
                sub.col(j) = A.col(supports[s][static_cast<size_t>(j)]);
            Eigen::SelfAdjointEigenSolver<Matrix> eig(sub.transpose() * sub,
                                                      Eigen::EigenvaluesOnly);
            dev_hi[s] = eig.eigenvalues()[order - 1] - 1.0;
            dev_lo[s] = 1.0 - eig.eigenvalues()[0];
            max_dev = std::max({max_dev, dev_hi[s], dev_lo[s]});
        }
        double weight_sum = 0.0;
        for (size_t s = 0; s < supports.size(); ++s) {
            const double wt_hi = std::exp(beta * (dev_hi[s] - max_dev));
            const double wt_lo = std::exp(beta * (dev_lo[s] - max_dev));
            if (wt_hi + wt_lo < 1e-12) continue;
            for (int j = 0; j < order; ++j)
                sub.col(j) = A.col(supports[s][static_cast<size_t>(j)]);
            Eigen::SelfAdjointEigenSolver<Matrix> eig(sub.transpose() * sub);
            const Vector v_hi = eig.eigenvectors().col(order - 1);
            const Vector v_lo = eig.eigenvectors().col(0);
            const Vector img_hi = sub * v_hi;
            const Vector img_lo = sub * v_lo;
            for (int j = 0; j < order; ++j) {
                const int col = supports[s][static_cast<size_t>(j)];
                grad.col(col) += wt_hi * 2.0 * img_hi * v_hi[j];
                grad.col(col) -= wt_lo * 2.0 * img_lo * v_lo[j];
            }
            weight_sum += wt_hi + wt_lo;
        }
        if (weight_sum <= 0.0) break;
        momentum = 0.9 * momentum + grad / weight_sum;
        A -= lr * momentum;
        for (int j = 0; j < cols; ++j) A.col(j).normalize();
        if (it % 300 == 299) lr *= 0.6;
    }
    return A;
}

}  // namespace sprec
