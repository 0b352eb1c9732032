#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sprec/linalg.hpp"
#include "sprec/operators.hpp"

namespace sprec {

struct SolverConfig {
    double p = 0.5;          // quasi-norm exponent for psnm/lp solves
    double epsilon = 0.0;    // noise budget (hard constraint)
    int max_iterations = 2000;
    double tolerance = 1e-8; // relative-change stop
    double gamma0 = 0.0;     // smoothing start; <= 0 means 0.1 * sigma_1(A*(b))
    double gamma_decay = 0.5;
    double gamma_floor = 1e-10;
    int restarts = 5;
    std::uint64_t seed = 0;

    void validate() const;
};

// Surrogate objective values of one smoothing stage, first entry is the
// value at stage start. Non-increasing within a stage.
struct StageTrace {
    double gamma = 0.0;
    std::vector<double> objectives;
};

struct RecoveryReport {
    Matrix estimate;
    double objective = 0.0;  // ||estimate||_p^p
    double residual = 0.0;   // ||A(estimate) - b||_2
    bool feasible = false;   // residual <= epsilon + 1e-8
    std::optional<bool> quasi_norm_le_truth;
    int iterations = 0;
    int restarts_used = 0;
    std::vector<StageTrace> stage_traces;  // winning restart only

    nlohmann::json to_json() const;
};

struct VectorRecoveryReport {
    Vector estimate;
    double objective = 0.0;
    double residual = 0.0;
    bool feasible = false;
    std::optional<bool> quasi_norm_le_truth;
    int iterations = 0;
    int restarts_used = 0;
    std::vector<StageTrace> stage_traces;

    nlohmann::json to_json() const;
};

// min ||X||_* s.t. ||A(X) - b|| <= epsilon, by a primal-dual splitting
// scheme whose proximal step is singular-value soft-thresholding, followed
// by a minimum-norm feasibility correction. Convex; restarts are ignored.
RecoveryReport nnm_solve(const MeasurementModel& model, const SolverConfig& config);

// min ||X||_p^p s.t. ||A(X) - b|| <= epsilon for p in (0,1), via the
// smoothed surrogate sum (sigma_i^2 + gamma)^(p/2) with geometric gamma
// decay; each stage runs reweighted steps with spectral weights
// (sigma_i^2 + gamma)^(p/2 - 1), every step solving its constrained
// subproblem exactly (iterates stay feasible). Multi-start; returns the
// best feasible candidate by objective. Global optimality is not claimed.
RecoveryReport psnm_solve(const MeasurementModel& model, const SolverConfig& config);

// Vector analogue: min ||x||_p^p s.t. ||A x - b|| <= epsilon.
VectorRecoveryReport lp_vector_solve(const Matrix& A, const Vector& b,
                                     const SolverConfig& config);

// Gate for applying the Theorem 2 bounds to a candidate: it must be
// feasible and its quasi-norm must not exceed the truth's.
struct Certificate {
    bool feasible = false;
    bool objective_le_truth = false;
};

Certificate certify_candidate(const Matrix& truth, const Matrix& estimate,
                              const MeasurementModel& model, double p);
Certificate certify_candidate(const Vector& truth, const Vector& estimate, const Matrix& A,
                              const Vector& b, double epsilon, double p);

}  // namespace sprec
