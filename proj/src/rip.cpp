#include "sprec/rip.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

#include <nlohmann/json.hpp>

#include "sprec/rng.hpp"

namespace sprec {

namespace {

// C(n, k) with saturation at limit+1
long binomial_capped(int n, int k, long limit) {
    if (k > n) return 0;
    long result = 1;
    for (int i = 1; i <= k; ++i) {
        result = result * (n - k + i) / i;
        if (result > limit) return limit + 1;
    }
    return result;
}

double deviation_of_squared_norm(double f) { return std::max(f - 1.0, 1.0 - f); }

// one projected-gradient run; direction +1 maximizes ||A(GH^T)||^2, -1 minimizes
double local_extremum(const MeasurementOperator& op, int r, Rng& rng, double direction,
                      int iterations) {
    const int n1 = op.n1(), n2 = op.n2();
    Matrix G(n1, r), H(n2, r);
    for (int j = 0; j < r; ++j) {
        for (int i = 0; i < n1; ++i) G(i, j) = rng.normal();
        for (int i = 0; i < n2; ++i) H(i, j) = rng.normal();
    }
    auto normalize = [&]() {
        const double s = (G * H.transpose()).norm();
        if (s > 0) {
            G /= std::sqrt(s);
            H /= std::sqrt(s);
        }
    };
    normalize();
    Matrix X = G * H.transpose();
    double f = op.apply(X).squaredNorm();
    double step = 0.1;
    for (int it = 0; it < iterations && step > 1e-12; ++it) {
        const Matrix residual_grad = op.adjoint(op.apply(X));  // A*(A(X))
        const Matrix gradG = 2.0 * residual_grad * H;
        const Matrix gradH = 2.0 * residual_grad.transpose() * G;
        bool improved = false;
        for (int bt = 0; bt < 25; ++bt) {
            Matrix Gn = G + direction * step * gradG;
            Matrix Hn = H + direction * step * gradH;
            Matrix Xn = Gn * Hn.transpose();
            const double s = Xn.norm();
            if (s <= 0) break;
            Xn /= s;
            const double fn = op.apply(Xn).squaredNorm();
            if (direction * (fn - f) > 0) {
                G = Gn / std::sqrt(s);
                H = Hn / std::sqrt(s);
                X = Xn;
                f = fn;
                improved = true;
                step *= 1.5;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return f;
}

}  // namespace

const char* to_string(RicMethod method) {
    switch (method) {
        case RicMethod::enumeration: return "enumeration";
        case RicMethod::sampling: return "sampling";
        case RicMethod::multistart: return "multistart";
    }
    return "unknown";
}

nlohmann::json RicEstimate::to_json() const {
    return nlohmann::json{{"order", order},
                          {"value", value},
                          {"exact", exact},
                          {"probes", probes},
                          {"method", to_string(method)}};
}

double gram_deviation(const Matrix& A_S) {
    if (A_S.cols() == 0) throw std::invalid_argument("gram_deviation: empty submatrix");
    check_finite(A_S, "gram_deviation");
    const Matrix gram = A_S.transpose() * A_S;
    Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
    if (eig.info() != Eigen::Success)
        throw std::runtime_error("gram_deviation: eigensolve failed");
    const auto& ev = eig.eigenvalues();
    return std::max(ev[ev.size() - 1] - 1.0, 1.0 - ev[0]);
}

RicEstimate vector_ric_exact(const Matrix& A, int k, long support_budget) {
    check_finite(A, "vector_ric_exact");
    const int cols = static_cast<int>(A.cols());
    if (k < 1 || k > cols)
        throw std::invalid_argument("vector_ric_exact: k must lie in [1, cols]");
    const long supports = binomial_capped(cols, k, support_budget);
    if (supports > support_budget) {
        std::ostringstream msg;
        msg << "vector_ric_exact: C(" << cols << ", " << k << ") exceeds the enumeration budget "
            << support_budget << "; use a sampled estimate instead";
        throw std::invalid_argument(msg.str());
    }

    std::vector<int> support(static_cast<size_t>(k));
    for (int i = 0; i < k; ++i) support[static_cast<size_t>(i)] = i;
    RicEstimate est;
    est.order = k;
    est.exact = true;
    est.method = RicMethod::enumeration;
    Matrix sub(A.rows(), k);
    while (true) {
        for (int i = 0; i < k; ++i) sub.col(i) = A.col(support[static_cast<size_t>(i)]);
        est.value = std::max(est.value, gram_deviation(sub));
        ++est.probes;
        // next combination in lexicographic order
        int pos = k - 1;
        while (pos >= 0 && support[static_cast<size_t>(pos)] == cols - k + pos) --pos;
        if (pos < 0) break;
        ++support[static_cast<size_t>(pos)];
        for (int i = pos + 1; i < k; ++i)
            support[static_cast<size_t>(i)] = support[static_cast<size_t>(i - 1)] + 1;
    }
    return est;
}

RicEstimate operator_ric_estimate(const MeasurementOperator& op, int r, int probes,
                                  int restarts, std::uint64_t seed) {
    const int n = std::min(op.n1(), op.n2());
    if (r < 1 || r > n) throw std::invalid_argument("operator_ric_estimate: r out of range");
    if (probes < 0 || restarts < 0)
        throw std::invalid_argument("operator_ric_estimate: negative probe/restart count");

    RicEstimate est;
    est.order = r;
    est.exact = false;
    est.method = restarts > 0 ? RicMethod::multistart : RicMethod::sampling;

    // probe stream is prefix-stable: more probes never lowers the maximum
    Rng probe_rng(mix_seed(seed, {0x70726f6265ULL}));
    Matrix G(op.n1(), r), H(op.n2(), r);
    for (int trial = 0; trial < probes; ++trial) {
        for (int j = 0; j < r; ++j) {
            for (int i = 0; i < op.n1(); ++i) G(i, j) = probe_rng.normal();
            for (int i = 0; i < op.n2(); ++i) H(i, j) = probe_rng.normal();
        }
        Matrix X = G * H.transpose();
        const double s = X.norm();
        if (s <= 0) continue;
        X /= s;
        est.value = std::max(est.value, deviation_of_squared_norm(op.apply(X).squaredNorm()));
        ++est.probes;
    }

    constexpr int kIterations = 200;
    for (int restart = 0; restart < restarts; ++restart) {
        Rng rng(mix_seed(seed, {0x6d756c7469ULL, static_cast<std::uint64_t>(restart)}));
        const double f_hi = local_extremum(op, r, rng, +1.0, kIterations);
        const double f_lo = local_extremum(op, r, rng, -1.0, kIterations);
        est.value = std::max({est.value, deviation_of_squared_norm(f_hi),
                              deviation_of_squared_norm(f_lo)});
        est.probes += 2 * kIterations;
    }
    return est;
}

}  // namespace sprec
