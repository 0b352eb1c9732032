#include "sprec/operators.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sprec/rng.hpp"

namespace sprec {

const char* to_string(OperatorKind kind) {
    switch (kind) {
        case OperatorKind::gaussian: return "gaussian";
        case OperatorKind::entry_mask: return "entry_mask";
        case OperatorKind::custom: return "custom";
    }
    return "unknown";
}

MeasurementOperator::MeasurementOperator(Matrix rep, int n1, int n2, OperatorKind kind,
                                         std::uint64_t seed,
                                         std::vector<std::pair<int, int>> indices)
    : rep_(std::move(rep)), n1_(n1), n2_(n2), kind_(kind), seed_(seed),
      indices_(std::move(indices)) {}

MeasurementOperator MeasurementOperator::gaussian(int m, int n1, int n2, std::uint64_t seed,
                                                  std::int64_t max_entries) {
    if (m < 1 || n1 < 1 || n2 < 1)
        throw std::invalid_argument("gaussian operator: dimensions must be positive");
    const std::int64_t entries =
        static_cast<std::int64_t>(m) * static_cast<std::int64_t>(n1) * n2;
    if (entries > max_entries) {
        std::ostringstream msg;
        msg << "gaussian operator: " << entries << " entries exceed the memory budget of "
            << max_entries;
        throw std::invalid_argument(msg.str());
    }
    Matrix rep(m, static_cast<Eigen::Index>(n1) * n2);
    Rng rng(mix_seed(seed, {0x6761757373ULL}));
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    for (Eigen::Index col = 0; col < rep.cols(); ++col)
        for (Eigen::Index row = 0; row < rep.rows(); ++row)
            rep(row, col) = scale * rng.normal();
    return MeasurementOperator(std::move(rep), n1, n2, OperatorKind::gaussian, seed, {});
}

MeasurementOperator MeasurementOperator::entry_mask(std::vector<std::pair<int, int>> indices,
                                                    int n1, int n2) {
    if (n1 < 1 || n2 < 1)
        throw std::invalid_argument("entry_mask: dimensions must be positive");
    if (indices.empty()) throw std::invalid_argument("entry_mask: empty index set");
    for (auto [i, j] : indices)
        if (i < 0 || i >= n1 || j < 0 || j >= n2)
            throw std::invalid_argument("entry_mask: index out of range");
    std::sort(indices.begin(), indices.end());  // row-major order over the set
    if (std::adjacent_find(indices.begin(), indices.end()) != indices.end())
        throw std::invalid_argument("entry_mask: duplicate index");
    Matrix rep = Matrix::Zero(static_cast<Eigen::Index>(indices.size()),
                              static_cast<Eigen::Index>(n1) * n2);
    for (size_t row = 0; row < indices.size(); ++row) {
        const auto [i, j] = indices[row];
        rep(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(j) * n1 + i) = 1.0;
    }
    return MeasurementOperator(std::move(rep), n1, n2, OperatorKind::entry_mask, 0,
                               std::move(indices));
}

MeasurementOperator MeasurementOperator::custom(Matrix representation, int n1, int n2) {
    if (n1 < 1 || n2 < 1)
        throw std::invalid_argument("custom operator: dimensions must be positive");
    if (representation.cols() != static_cast<Eigen::Index>(n1) * n2)
        throw std::invalid_argument("custom operator: representation has wrong column count");
    check_finite(representation, "custom operator");
    return MeasurementOperator(std::move(representation), n1, n2, OperatorKind::custom, 0, {});
}

Vector MeasurementOperator::apply(const Matrix& X) const {
    if (X.rows() != n1_ || X.cols() != n2_)
        throw std::invalid_argument("apply: matrix shape does not match the operator");
    check_finite(X, "apply");
    return rep_ * Eigen::Map<const Vector>(X.data(), X.size());
}

Matrix MeasurementOperator::adjoint(const Vector& y) const {
    if (y.size() != rep_.rows())
        throw std::invalid_argument("adjoint: measurement length does not match the operator");
    if (!y.allFinite()) throw std::invalid_argument("adjoint: non-finite entry");
    const Vector v = rep_.transpose() * y;
    return Eigen::Map<const Matrix>(v.data(), n1_, n2_);
}

nlohmann::json MeasurementOperator::to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind_);
    j["m"] = m();
    j["n1"] = n1_;
    j["n2"] = n2_;
    switch (kind_) {
        case OperatorKind::gaussian:
            j["seed"] = seed_;
            break;
        case OperatorKind::entry_mask: {
            nlohmann::json idx = nlohmann::json::array();
            for (auto [a, b] : indices_) idx.push_back({a, b});
            j["indices"] = std::move(idx);
            break;
        }
        case OperatorKind::custom: {
            std::vector<double> entries(rep_.data(), rep_.data() + rep_.size());
            j["entries"] = std::move(entries);  // column-major over the m x (n1*n2) array
            break;
        }
    }
    return j;
}

MeasurementOperator MeasurementOperator::from_json(const nlohmann::json& j) {
    const std::string kind = j.at("kind").get<std::string>();
    const int m = j.at("m").get<int>();
    const int n1 = j.at("n1").get<int>();
    const int n2 = j.at("n2").get<int>();
    if (kind == "gaussian")
        return gaussian(m, n1, n2, j.at("seed").get<std::uint64_t>());
    if (kind == "entry_mask") {
        std::vector<std::pair<int, int>> indices;
        for (const auto& pair : j.at("indices"))
            indices.emplace_back(pair.at(0).get<int>(), pair.at(1).get<int>());
        return entry_mask(std::move(indices), n1, n2);
    }
    if (kind == "custom") {
        const auto entries = j.at("entries").get<std::vector<double>>();
        if (entries.size() != static_cast<size_t>(m) * n1 * n2)
            throw std::invalid_argument("operator json: entry count mismatch");
        Matrix rep = Eigen::Map<const Matrix>(entries.data(), m,
                                              static_cast<Eigen::Index>(n1) * n2);
        return custom(std::move(rep), n1, n2);
    }
    throw std::invalid_argument("operator json: unknown kind '" + kind + "'");
}

void MeasurementModel::validate() const {
    if (b.size() != op.m())
        throw std::invalid_argument("measurement model: b length does not match operator");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("measurement model: epsilon < 0");
    if (!b.allFinite()) throw std::invalid_argument("measurement model: non-finite b");
}

std::vector<Matrix> null_space_sample(const MeasurementOperator& op, std::uint64_t seed,
                                      int count) {
    if (count < 1) throw std::invalid_argument("null_space_sample: count must be >= 1");
    const Matrix& rep = op.representation();
    const Eigen::Index N = rep.cols();
    Eigen::BDCSVD<Matrix> dec(rep, Eigen::ComputeFullV);
    const Vector& sv = dec.singularValues();
    const double tol =
        (sv.size() > 0 ? sv[0] : 0.0) * 1e-12 * static_cast<double>(std::max(rep.rows(), N));
    Eigen::Index rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > tol) ++rank;
    const Eigen::Index dim = N - rank;
    if (dim <= 0)
        throw EmptyNullSpaceError("null_space_sample: operator has a trivial null space");
    const Matrix basis = dec.matrixV().rightCols(dim);

    Rng rng(mix_seed(seed, {0x6e756c6cULL}));
    std::vector<Matrix> out;
    out.reserve(static_cast<size_t>(count));
    while (static_cast<int>(out.size()) < count) {
        Vector coeff(dim);
        for (Eigen::Index i = 0; i < dim; ++i) coeff[i] = rng.normal();
        if (coeff.norm() < 1e-12) continue;
        const Vector w = basis * coeff;
        out.push_back(Eigen::Map<const Matrix>(w.data(), op.n1(), op.n2()));
    }
    return out;
}

}  // namespace sprec
