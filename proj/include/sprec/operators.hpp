#pragma once

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sprec/linalg.hpp"

namespace sprec {

enum class OperatorKind { gaussian, entry_mask, custom };

const char* to_string(OperatorKind kind);

struct EmptyNullSpaceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Linear map R^{n1 x n2} -> R^m held as a dense m x (n1*n2) array acting on
// column-major vectorized matrices. Immutable after construction.
class MeasurementOperator {
  public:
    // Entries i.i.d. N(0, 1/m) so that E||A(X)||_2^2 = ||X||_F^2.
    // Deterministic given seed. Refuses when m*n1*n2 exceeds max_entries.
    static MeasurementOperator gaussian(int m, int n1, int n2, std::uint64_t seed,
                                        std::int64_t max_entries = (std::int64_t{1} << 24));

    // A(X) lists the selected entries, ordered row-major over the sorted
    // index set. Duplicate or out-of-range indices are rejected.
    static MeasurementOperator entry_mask(std::vector<std::pair<int, int>> indices, int n1,
                                          int n2);

    static MeasurementOperator custom(Matrix representation, int n1, int n2);

    Vector apply(const Matrix& X) const;
    Matrix adjoint(const Vector& y) const;

    int m() const { return static_cast<int>(rep_.rows()); }
    int n1() const { return n1_; }
    int n2() const { return n2_; }
    OperatorKind kind() const { return kind_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<std::pair<int, int>>& indices() const { return indices_; }
    const Matrix& representation() const { return rep_; }

    // {kind, m, n1, n2, seed | indices}; dense entries only for kind=custom.
    nlohmann::json to_json() const;
    static MeasurementOperator from_json(const nlohmann::json& j);

  private:
    MeasurementOperator(Matrix rep, int n1, int n2, OperatorKind kind, std::uint64_t seed,
                        std::vector<std::pair<int, int>> indices);

    Matrix rep_;
    int n1_;
    int n2_;
    OperatorKind kind_;
    std::uint64_t seed_ = 0;
    std::vector<std::pair<int, int>> indices_;
};

struct MeasurementModel {
    MeasurementOperator op;
    Vector b;
    double epsilon = 0.0;  // noise budget, >= 0; 0 means exact measurements

    void validate() const;
};

// Nonzero matrices W with A(W) = 0, built as random combinations of an
// orthonormal basis of the null space of the representation. Throws
// EmptyNullSpaceError when the null space is trivial.
std::vector<Matrix> null_space_sample(const MeasurementOperator& op, std::uint64_t seed,
                                      int count);

}  // namespace sprec
