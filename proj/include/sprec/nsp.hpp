#pragma once

#include <cstdint>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sprec/linalg.hpp"
#include "sprec/operators.hpp"

namespace sprec {

// Outcome of the null-space condition on one spectrum: the strict
// inequality sum_{i<=r} sigma_i^p < sum_{i>r} sigma_i^p.
struct NspVerdict {
    bool holds = false;
    double lhs = 0.0;     // sum_{i<=r} sigma_i^p
    double rhs = 0.0;     // sum_{i>r}  sigma_i^p
    double margin = 0.0;  // rhs - lhs; holds <=> margin > 0
};

// Rank-r recovery condition. Requires r in [1, n).
NspVerdict nsp_check(const SingularSpectrum& spectrum, int r, double p);

// The older condition with head 2r and tail from 2r+1. Requires 2r < n.
NspVerdict nsp_check_2r(const SingularSpectrum& spectrum, int r, double p);

// Whether success at p = 1 implies success at every p in p_list on this
// spectrum. Property-test primitive; expected always true.
bool nsp_monotone_in_p(const SingularSpectrum& spectrum, int r,
                       const std::vector<double>& p_list);

struct SubadditivityResult {
    bool holds = false;
    double slack = 0.0;  // lhs - rhs
    double lhs = 0.0;    // sum sigma_i^p(A - B)
    double rhs = 0.0;    // sum |sigma_i^p(A) - sigma_i^p(B)|
};

// Spectral subadditivity check: holds <=> lhs >= rhs - 1e-9 * max(1, lhs).
SubadditivityResult subadditivity_check(const Matrix& A, const Matrix& B, double p);

struct Lemma5Result {
    Matrix X1;  // -U diag(sigma(X0)) V^T with U, V from the SVD of W
    bool antecedent = false;        // ||X0 + W||_p <= ||X0||_p
    bool consequent = false;        // ||X1 + W||_p <= ||X1||_p (with slack)
    bool implication_holds = true;  // !antecedent || consequent
};

Lemma5Result lemma5_transform(const Matrix& X0, const Matrix& W, double p);

struct FalsifierReport {
    int checked = 0;
    bool witness_found = false;
    Matrix witness;                      // empty when none found
    SingularSpectrum witness_spectrum;   // spectrum of the witness
    double margin = 0.0;  // witness margin, or the smallest margin seen

    nlohmann::json to_json() const;
};

// Samples the null space of op and returns the first W whose nsp_check
// fails. Finding no witness is not a proof that the NSP holds, except when
// the null space is one-dimensional.
FalsifierReport nsp_falsify(const MeasurementOperator& op, int r, double p, int trials,
                            std::uint64_t seed);

}  // namespace sprec
