#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace sprec {

// (p, r, t, delta) tuple feeding every threshold and constant formula.
struct GuaranteeParams {
    double p = 1.0;     // quasi-norm exponent, (0, 1]
    int r = 1;          // target rank / sparsity
    int t = 1;          // partition block size, t >= r
    double delta = 0.0; // RIC delta_{2t}, [0, 1)

    void validate() const;
};

// lambda = 2/sqrt(1-delta), mu = sqrt((1+delta)/(1-delta)) (r/t)^(1/p-1/2),
// and the four error-bound constants; defined only when mu^p < 1.
struct BoundConstants {
    double lambda = 0.0;
    double mu = 0.0;
    double c1 = 0.0;
    double d1 = 0.0;
    double c2 = 0.0;
    double d2 = 0.0;
};

struct ThresholdViolation : std::domain_error {
    ThresholdViolation(const std::string& msg, double mu_value)
        : std::domain_error(msg), mu(mu_value) {}
    double mu;
};

// RIC threshold 2(sqrt(2)-1)a / (2(sqrt(2)-1)a + 1) with a = (t/r)^(1/p-1/2).
// Evaluated in log space; strictly increasing in t/r, value in (0, 1).
double prop2_threshold(double p, int r, int t);

// RIC threshold (b-1)/(b+1) with b = (t/r)^(2/p-1). Zero at t = r.
double thm2_threshold(double p, int r, int t);

// All six constants per the displayed formulas. Throws ThresholdViolation
// (carrying mu) when mu^p >= 1, std::overflow_error when a constant leaves
// double range.
BoundConstants thm2_constants(const GuaranteeParams& params);

// Largest p0 <= 1 such that prop2_threshold(p, r, r+1) > delta for all
// p < p0, located by bisection to 1e-6. Returns 1 when the threshold at
// p = 1 already exceeds delta.
double corollary_small_p(int r, double delta);

// The t = r+1 specialization of thm2_threshold.
double smallp2_threshold(double p, int r);

// Unique p* in (0,1) where the two thresholds cross, by bisection on their
// difference; nullopt when no crossing lies in (0,1).
std::optional<double> crossing_point(int r, int t);

// Closed form: with c = 2(sqrt(2)-1), the crossing solves
// (t/r)^(1/p-1/2) = c + sqrt(c^2+1).
std::optional<double> crossing_point_closed_form(int r, int t);

struct ThresholdCurve {
    struct Sample {
        double p;
        double delta_prop2;
        double delta_thm2;
    };
    int r = 0;
    int t = 0;
    std::vector<Sample> samples;

    // header "p,delta_prop2,delta_thm2", 12 significant digits, LF endings
    std::string to_csv() const;
    nlohmann::json to_json() const;
};

// Both thresholds on a strictly increasing grid in (0, 1].
ThresholdCurve threshold_curve(int r, int t, const std::vector<double>& p_grid);

enum class BoundKind { quasi_norm, frobenius };

// Right-hand side of the Theorem 2 error bounds:
//   quasi_norm: C1' * tail_p + D1' * r^(1/p-1/2) * epsilon
//   frobenius:  C2' * t^(1/2-1/p) * tail_p + D2' * epsilon
double error_bound_rhs(BoundKind kind, const BoundConstants& constants,
                       const GuaranteeParams& params, double tail_p, double epsilon);

}  // namespace sprec
