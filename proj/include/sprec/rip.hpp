#pragma once

#include <cstdint>

#include <nlohmann/json_fwd.hpp>

#include "sprec/linalg.hpp"
#include "sprec/operators.hpp"

namespace sprec {

enum class RicMethod { enumeration, sampling, multistart };

const char* to_string(RicMethod method);

// A restricted isometry constant value. Only the enumeration method is
// exact; sampling/multistart values are lower bounds on the true RIC.
struct RicEstimate {
    int order = 0;
    double value = 0.0;
    bool exact = false;
    long probes = 0;
    RicMethod method = RicMethod::sampling;

    nlohmann::json to_json() const;
};

// max(lambda_max - 1, 1 - lambda_min) of A_S^T A_S.
double gram_deviation(const Matrix& A_S);

// Exact vector RIC of order k by support enumeration over all k-column
// submatrices. Refuses when C(cols, k) exceeds the budget.
RicEstimate vector_ric_exact(const Matrix& A, int k, long support_budget = 2'000'000);

// Lower bound on the operator RIC of order r: random unit-Frobenius rank-r
// probes X = G H^T plus multi-start projected gradient ascent/descent of
// ||A(X)||_2^2 over the rank-r unit-Frobenius manifold.
RicEstimate operator_ric_estimate(const MeasurementOperator& op, int r, int probes,
                                  int restarts, std::uint64_t seed);

}  // namespace sprec
