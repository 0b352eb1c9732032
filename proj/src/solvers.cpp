#include "sprec/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <nlohmann/json.hpp>

#include "sprec/rng.hpp"

namespace sprec {

namespace {

constexpr double kFeasibilitySlack = 1e-8;

Vector project_ball(const Vector& z, const Vector& center, double radius) {
    const Vector d = z - center;
    const double dist = d.norm();
    if (dist <= radius) return z;
    if (radius <= 0.0) return center;
    return center + d * (radius / dist);
}

// Soft-thresholds singular values; also reports the nuclear norm of the result.
Matrix singular_value_threshold(const Matrix& M, double tau, double* nuclear_out) {
    Eigen::JacobiSVD<Matrix> dec(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    Vector sv = dec.singularValues();
    double nuc = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) {
        sv[i] = std::max(sv[i] - tau, 0.0);
        nuc += sv[i];
    }
    if (nuclear_out) *nuclear_out = nuc;
    return dec.matrixU() * sv.asDiagonal() * dec.matrixV().transpose();
}

double schatten_pp_of(const Vector& sv, double p) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) acc += std::pow(sv[i], p);
    return acc;
}

// min v^T Q v s.t. ||B w - b|| <= eps where w = Q^{1/2} v and B = R Q^{-1/2}.
// Returns w; the caller maps back with v = Q^{-1/2} w. Exact solve via the
// Gram matrix M = B B^T; the eps > 0 case locates the KKT multiplier by
// bisection on the monotone residual curve.
Vector constrained_weighted_min(const Matrix& B, const Vector& b, double eps) {
    const Eigen::Index m = B.rows();
    Matrix M = Matrix::Zero(m, m);
    M.selfadjointView<Eigen::Lower>().rankUpdate(B);
    M = M.selfadjointView<Eigen::Lower>();

    if (eps <= 0.0) {
        Eigen::LDLT<Matrix> ldlt(M);
        if (ldlt.info() == Eigen::Success) {
            Vector u = ldlt.solve(b);
            u += ldlt.solve(b - M * u);  // one refinement step
            if ((M * u - b).norm() <= 1e-8 * std::max(1.0, b.norm()))
                return B.transpose() * u;
        }
        // rank-deficient or ill-conditioned: pseudo-inverse path
        Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
        const Vector c = eig.eigenvectors().transpose() * b;
        const Vector& ev = eig.eigenvalues();
        const double tol = std::max(ev.cwiseAbs().maxCoeff(), 1.0e-300) * 1e-14;
        Vector scaled = Vector::Zero(m);
        for (Eigen::Index i = 0; i < m; ++i)
            if (ev[i] > tol) scaled[i] = c[i] / ev[i];
        return B.transpose() * (eig.eigenvectors() * scaled);
    }

    if (b.norm() <= eps) return Vector::Zero(B.cols());

    Eigen::SelfAdjointEigenSolver<Matrix> eig(M);
    const Matrix& E = eig.eigenvectors();
    const Vector& ev = eig.eigenvalues();
    const Vector c = E.transpose() * b;
    const double ev_tol = std::max(ev.cwiseAbs().maxCoeff(), 1.0e-300) * 1e-14;

    double unreachable_sq = 0.0;
    for (Eigen::Index i = 0; i < m; ++i)
        if (ev[i] <= ev_tol) unreachable_sq += c[i] * c[i];
    auto residual_at = [&](double lambda) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < m; ++i) {
            const double denom = 1.0 + lambda * std::max(ev[i], 0.0);
            acc += (c[i] / denom) * (c[i] / denom);
        }
        return std::sqrt(acc);
    };
    auto solution_at = [&](double lambda) {
        Vector scaled(m);
        for (Eigen::Index i = 0; i < m; ++i)
            scaled[i] = lambda * c[i] / (1.0 + lambda * std::max(ev[i], 0.0));
        return Vector(B.transpose() * (E * scaled));
    };

    if (std::sqrt(unreachable_sq) >= eps) {
        // target not reachable within eps; return the least-squares limit
        Vector scaled = Vector::Zero(m);
        for (Eigen::Index i = 0; i < m; ++i)
            if (ev[i] > ev_tol) scaled[i] = c[i] / ev[i];
        return B.transpose() * (E * scaled);
    }

    double lo = 0.0, hi = 1.0;
    while (residual_at(hi) > eps) {
        hi *= 4.0;
        if (hi > 1e300) return solution_at(hi);
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (residual_at(mid) > eps)
            lo = mid;
        else
            hi = mid;
    }
    return solution_at(hi);  // hi side satisfies the constraint
}

// Applies T (symmetric, n1 x n1) to every column block of the column-major
// vectorization, i.e. computes rep * (I_{n2} (x) T).
Matrix apply_left_blocks(const Matrix& rep, const Matrix& T, int n1, int n2) {
    Matrix out(rep.rows(), rep.cols());
    for (int j = 0; j < n2; ++j)
        out.middleCols(static_cast<Eigen::Index>(j) * n1, n1) =
            rep.middleCols(static_cast<Eigen::Index>(j) * n1, n1) * T;
    return out;
}

// rep * (T (x) I_{n1}) for symmetric T (n2 x n2): mixes blocks.
Matrix apply_right_blocks(const Matrix& rep, const Matrix& T, int n1, int n2) {
    Matrix out(rep.rows(), rep.cols());
    using Stride = Eigen::OuterStride<>;
    for (int i = 0; i < n1; ++i) {
        Eigen::Map<const Matrix, 0, Stride> slice(rep.data() + static_cast<std::ptrdiff_t>(i) *
                                                                   rep.rows(),
                                                  rep.rows(), n2,
                                                  Stride(rep.rows() * n1));
        Eigen::Map<Matrix, 0, Stride> dest(out.data() + static_cast<std::ptrdiff_t>(i) *
                                                            out.rows(),
                                           out.rows(), n2, Stride(out.rows() * n1));
        dest = slice * T;
    }
    return out;
}

struct IrlsOutcome {
    Vector v;  // vectorized estimate
    int iterations = 0;
    std::vector<StageTrace> traces;
};

// Shared smoothed-IRLS driver. weight_inv_sqrt(v, gamma) must return the
// map Q^{-1/2} as a dense transform of the representation (B = R Q^{-1/2})
// plus an applier for recovering v = Q^{-1/2} w.
template <typename BuildB, typename ApplyWinvHalf, typename Smoothed>
IrlsOutcome run_irls(const Vector& b, const SolverConfig& config, double gamma0,
                     const Vector& init, BuildB&& build_b, ApplyWinvHalf&& apply_winv_half,
                     Smoothed&& smoothed_objective) {
    constexpr int kStageCap = 40;
    IrlsOutcome out;
    out.v = init;
    const double stop_tol = std::max(config.tolerance, 1e-14);

    for (double gamma = gamma0; gamma >= config.gamma_floor * (1.0 - 1e-12);
         gamma *= config.gamma_decay) {
        StageTrace trace;
        trace.gamma = gamma;
        double f_cur = smoothed_objective(out.v, gamma);
        trace.objectives.push_back(f_cur);
        for (int inner = 0; inner < kStageCap; ++inner) {
            if (out.iterations >= config.max_iterations) break;
            ++out.iterations;
            const Matrix B = build_b(out.v, gamma);
            const Vector w = constrained_weighted_min(B, b, config.epsilon);
            const Vector v_new = apply_winv_half(out.v, gamma, w);
            const double f_new = smoothed_objective(v_new, gamma);
            if (f_new > f_cur + 1e-12 * std::max(1.0, f_cur)) break;  // safeguard
            trace.objectives.push_back(f_new);
            out.v = v_new;
            const bool converged = std::abs(f_new - f_cur) <= stop_tol * std::max(1.0, f_cur);
            f_cur = f_new;
            if (converged) break;
        }
        out.traces.push_back(std::move(trace));
        if (out.iterations >= config.max_iterations) break;
    }
    return out;
}

// Minimum-Frobenius feasible point: the least-norm interpolator, pulled
// toward zero until the residual budget is exactly spent when eps > 0.
Vector feasible_init(const Matrix& rep, const Vector& b, double eps) {
    if (eps > 0.0 && b.norm() <= eps) return Vector::Zero(rep.cols());
    const Vector v = rep.completeOrthogonalDecomposition().solve(b);
    if (eps <= 0.0) return v;
    return v * (1.0 - eps / b.norm());
}

}  // namespace

void SolverConfig::validate() const {
    if (!(epsilon >= 0.0)) throw std::invalid_argument("solver config: epsilon < 0");
    if (max_iterations < 1) throw std::invalid_argument("solver config: max_iterations < 1");
    if (!(tolerance > 0.0)) throw std::invalid_argument("solver config: tolerance <= 0");
    if (!(gamma_decay > 0.0) || gamma_decay >= 1.0)
        throw std::invalid_argument("solver config: gamma_decay must lie in (0, 1)");
    if (!(gamma_floor > 0.0)) throw std::invalid_argument("solver config: gamma_floor <= 0");
    if (restarts < 1) throw std::invalid_argument("solver config: restarts < 1");
}

namespace {

nlohmann::json report_json_common(double objective, double residual, bool feasible,
                                  const std::optional<bool>& le_truth, int iterations,
                                  int restarts_used) {
    nlohmann::json j;
    j["objective"] = objective;
    j["residual"] = residual;
    j["feasible"] = feasible;
    if (le_truth.has_value())
        j["quasi_norm_le_truth"] = *le_truth;
    else
        j["quasi_norm_le_truth"] = nullptr;
    j["iterations"] = iterations;
    j["restarts_used"] = restarts_used;
    return j;
}

}  // namespace

nlohmann::json RecoveryReport::to_json() const {
    nlohmann::json j = report_json_common(objective, residual, feasible, quasi_norm_le_truth,
                                          iterations, restarts_used);
    j["rows"] = estimate.rows();
    j["cols"] = estimate.cols();
    std::vector<double> entries(estimate.data(), estimate.data() + estimate.size());
    j["estimate"] = std::move(entries);
    return j;
}

nlohmann::json VectorRecoveryReport::to_json() const {
    nlohmann::json j = report_json_common(objective, residual, feasible, quasi_norm_le_truth,
                                          iterations, restarts_used);
    std::vector<double> entries(estimate.data(), estimate.data() + estimate.size());
    j["estimate"] = std::move(entries);
    return j;
}

RecoveryReport nnm_solve(const MeasurementModel& model, const SolverConfig& config) {
    model.validate();
    config.validate();
    const MeasurementOperator& op = model.op;
    const Matrix& rep = op.representation();
    const int n1 = op.n1(), n2 = op.n2();

    RecoveryReport report;
    report.restarts_used = 1;
    if (model.b.norm() <= model.epsilon) {  // zero is feasible and optimal
        report.estimate = Matrix::Zero(n1, n2);
        report.residual = model.b.norm();
        report.feasible = true;
        return report;
    }

    const double L = rep.operatorNorm();
    const double step = 0.99 / std::max(L, 1e-300);
    Matrix X = Matrix::Zero(n1, n2);
    Matrix X_bar = X;
    Vector y = Vector::Zero(op.m());

    double objective = 0.0;
    std::vector<double> recent;
    recent.reserve(16);
    int iter = 0;
    for (; iter < config.max_iterations; ++iter) {
        const Vector y_hat = y + step * op.apply(X_bar);
        y = y_hat - step * project_ball(y_hat / step, model.b, model.epsilon);
        const Matrix X_new =
            singular_value_threshold(X - step * op.adjoint(y), step, &objective);
        X_bar = 2.0 * X_new - X;
        X = X_new;

        recent.push_back(objective);
        if (recent.size() > 11) recent.erase(recent.begin());
        if (iter > 50 && recent.size() == 11) {
            double lo = recent[0], hi = recent[0];
            for (double v : recent) {
                lo = std::min(lo, v);
                hi = std::max(hi, v);
            }
            if (hi - lo <= config.tolerance * std::max(1.0, hi)) break;
        }
    }

    // minimum-norm correction onto the constraint set
    const Vector res = model.b - op.apply(X);
    if (res.norm() > model.epsilon) {
        const Vector target =
            model.epsilon > 0.0 ? Vector(res * (1.0 - model.epsilon / res.norm())) : res;
        const Vector dv = rep.completeOrthogonalDecomposition().solve(target);
        X += Eigen::Map<const Matrix>(dv.data(), n1, n2);
    }

    report.estimate = X;
    report.objective = nuclear_norm(X);
    report.residual = (op.apply(X) - model.b).norm();
    report.feasible = report.residual <= model.epsilon + kFeasibilitySlack;
    report.iterations = iter;
    return report;
}

RecoveryReport psnm_solve(const MeasurementModel& model, const SolverConfig& config) {
    model.validate();
    config.validate();
    if (!(config.p > 0.0) || config.p >= 1.0)
        throw std::invalid_argument("psnm_solve: p must lie in (0, 1); use nnm_solve for p = 1");
    const MeasurementOperator& op = model.op;
    const Matrix& rep = op.representation();
    const int n1 = op.n1(), n2 = op.n2();
    const double p = config.p;
    const bool left = n1 <= n2;

    RecoveryReport report;
    report.restarts_used = config.restarts;
    if (model.b.norm() <= model.epsilon) {
        report.estimate = Matrix::Zero(n1, n2);
        report.residual = model.b.norm();
        report.feasible = true;
        report.restarts_used = 1;
        return report;
    }

    const double gamma0 = config.gamma0 > 0.0
                              ? config.gamma0
                              : 0.1 * singular_values(op.adjoint(model.b)).values[0];

    auto as_matrix = [&](const Vector& v) {
        return Matrix(Eigen::Map<const Matrix>(v.data(), n1, n2));
    };
    // W^{-1/2} on the smaller side, from the SVD of the current iterate
    auto weight_inv_half = [&](const Vector& v, double gamma) {
        const SvdFactors f = svd(as_matrix(v));
        const Matrix& basis = left ? f.U : f.V;
        Vector scale(basis.cols());
        for (Eigen::Index i = 0; i < scale.size(); ++i) {
            const double s2 = f.spectrum[i] * f.spectrum[i];
            scale[i] = std::pow(s2 + gamma, 0.25 * (2.0 - p));
        }
        return Matrix(basis * scale.asDiagonal() * basis.transpose());
    };
    auto build_b = [&](const Vector& v, double gamma) {
        const Matrix T = weight_inv_half(v, gamma);
        return left ? apply_left_blocks(rep, T, n1, n2) : apply_right_blocks(rep, T, n1, n2);
    };
    auto apply_winv_half = [&](const Vector& v, double gamma, const Vector& w) {
        const Matrix T = weight_inv_half(v, gamma);
        const Matrix W = as_matrix(w);
        const Matrix result = left ? Matrix(T * W) : Matrix(W * T);
        return Vector(Eigen::Map<const Vector>(result.data(), result.size()));
    };
    auto smoothed = [&](const Vector& v, double gamma) {
        const SingularSpectrum s = singular_values(as_matrix(v));
        double acc = 0.0;
        for (int i = 0; i < s.size(); ++i)
            acc += std::pow(s[i] * s[i] + gamma, 0.5 * p);
        return acc;
    };

    const Vector base = feasible_init(rep, model.b, config.epsilon);
    double best_objective = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < config.restarts; ++restart) {
        Vector init = base;
        if (restart > 0) {
            Rng rng(mix_seed(config.seed, {0x70736e6dULL, static_cast<std::uint64_t>(restart)}));
            Vector noise(init.size());
            for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = rng.normal();
            const double nn = noise.norm();
            if (nn > 0) init += noise * (0.25 * restart * base.norm() / nn);
        }
        IrlsOutcome outcome =
            run_irls(model.b, config, gamma0, init, build_b, apply_winv_half, smoothed);
        const Matrix X = as_matrix(outcome.v);
        const double objective = schatten_pp_of(singular_values(X).values, p);
        const double residual = (op.apply(X) - model.b).norm();
        if (residual <= config.epsilon + kFeasibilitySlack && objective < best_objective) {
            best_objective = objective;
            report.estimate = X;
            report.objective = objective;
            report.residual = residual;
            report.feasible = true;
            report.iterations = outcome.iterations;
            report.stage_traces = std::move(outcome.traces);
        }
    }
    if (!report.feasible && report.estimate.size() == 0) {
        // no restart reached the budget; return the base point honestly
        const Matrix X = as_matrix(base);
        report.estimate = X;
        report.objective = schatten_pp_of(singular_values(X).values, p);
        report.residual = (op.apply(X) - model.b).norm();
        report.feasible = report.residual <= config.epsilon + kFeasibilitySlack;
    }
    return report;
}

VectorRecoveryReport lp_vector_solve(const Matrix& A, const Vector& b,
                                     const SolverConfig& config) {
    config.validate();
    if (A.rows() != b.size()) throw std::invalid_argument("lp_vector_solve: shape mismatch");
    if (!(config.p > 0.0) || config.p > 1.0)
        throw std::invalid_argument("lp_vector_solve: p must lie in (0, 1]");
    check_finite(A, "lp_vector_solve");
    const double p = config.p;

    VectorRecoveryReport report;
    report.restarts_used = config.restarts;
    if (b.norm() <= config.epsilon) {
        report.estimate = Vector::Zero(A.cols());
        report.residual = b.norm();
        report.feasible = true;
        report.restarts_used = 1;
        return report;
    }

    const double gamma0 =
        config.gamma0 > 0.0 ? config.gamma0 : 0.1 * (A.transpose() * b).norm();

    auto winv_half_diag = [&](const Vector& v, double gamma) {
        Vector scale(v.size());
        for (Eigen::Index i = 0; i < v.size(); ++i)
            scale[i] = std::pow(v[i] * v[i] + gamma, 0.25 * (2.0 - p));
        return scale;
    };
    auto build_b = [&](const Vector& v, double gamma) {
        return Matrix(A * winv_half_diag(v, gamma).asDiagonal());
    };
    auto apply_winv_half = [&](const Vector& v, double gamma, const Vector& w) {
        return Vector(winv_half_diag(v, gamma).cwiseProduct(w));
    };
    auto smoothed = [&](const Vector& v, double gamma) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < v.size(); ++i)
            acc += std::pow(v[i] * v[i] + gamma, 0.5 * p);
        return acc;
    };

    const Vector base = feasible_init(A, b, config.epsilon);
    double best_objective = std::numeric_limits<double>::infinity();
    for (int restart = 0; restart < config.restarts; ++restart) {
        Vector init = base;
        if (restart > 0) {
            Rng rng(mix_seed(config.seed, {0x6c70ULL, static_cast<std::uint64_t>(restart)}));
            Vector noise(init.size());
            for (Eigen::Index i = 0; i < noise.size(); ++i) noise[i] = rng.normal();
            const double nn = noise.norm();
            if (nn > 0) init += noise * (0.25 * restart * base.norm() / nn);
        }
        IrlsOutcome outcome =
            run_irls(b, config, gamma0, init, build_b, apply_winv_half, smoothed);
        double objective = 0.0;
        for (Eigen::Index i = 0; i < outcome.v.size(); ++i)
            objective += std::pow(std::abs(outcome.v[i]), p);
        const double residual = (A * outcome.v - b).norm();
        if (residual <= config.epsilon + kFeasibilitySlack && objective < best_objective) {
            best_objective = objective;
            report.estimate = outcome.v;
            report.objective = objective;
            report.residual = residual;
            report.feasible = true;
            report.iterations = outcome.iterations;
            report.stage_traces = std::move(outcome.traces);
        }
    }
    if (!report.feasible && report.estimate.size() == 0) {
        report.estimate = base;
        double objective = 0.0;
        for (Eigen::Index i = 0; i < base.size(); ++i)
            objective += std::pow(std::abs(base[i]), p);
        report.objective = objective;
        report.residual = (A * base - b).norm();
        report.feasible = report.residual <= config.epsilon + kFeasibilitySlack;
    }
    return report;
}

Certificate certify_candidate(const Matrix& truth, const Matrix& estimate,
                              const MeasurementModel& model, double p) {
    if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols())
        throw std::invalid_argument("certify_candidate: shape mismatch");
    Certificate cert;
    cert.feasible =
        (model.op.apply(estimate) - model.b).norm() <= model.epsilon + kFeasibilitySlack;
    const double est_pp = schatten_pp_of(singular_values(estimate).values, p);
    const double truth_pp = schatten_pp_of(singular_values(truth).values, p);
    cert.objective_le_truth = est_pp <= truth_pp + 1e-10;
    return cert;
}

Certificate certify_candidate(const Vector& truth, const Vector& estimate, const Matrix& A,
                              const Vector& b, double epsilon, double p) {
    if (truth.size() != estimate.size())
        throw std::invalid_argument("certify_candidate: shape mismatch");
    Certificate cert;
    cert.feasible = (A * estimate - b).norm() <= epsilon + kFeasibilitySlack;
    double est_pp = 0.0, truth_pp = 0.0;
    for (Eigen::Index i = 0; i < truth.size(); ++i) {
        est_pp += std::pow(std::abs(estimate[i]), p);
        truth_pp += std::pow(std::abs(truth[i]), p);
    }
    cert.objective_le_truth = est_pp <= truth_pp + 1e-10;
    return cert;
}

}  // namespace sprec
