#include "sprec/nsp.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace sprec {

namespace {

void check_p(double p) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("nsp: p must lie in (0, 1]");
}

// head = sum of sigma_i^p for i < split, tail = rest
NspVerdict split_verdict(const SingularSpectrum& spectrum, int split, double p) {
    NspVerdict v;
    for (int i = 0; i < spectrum.size(); ++i) {
        const double term = std::pow(spectrum[i], p);
        if (i < split)
            v.lhs += term;
        else
            v.rhs += term;
    }
    v.margin = v.rhs - v.lhs;
    v.holds = v.margin > 0.0;  // strict inequality; ties do not hold
    return v;
}

double schatten_pp(const Matrix& M, double p) {
    const SingularSpectrum s = singular_values(M);
    double acc = 0.0;
    for (int i = 0; i < s.size(); ++i) acc += std::pow(s[i], p);
    return acc;
}

}  // namespace

NspVerdict nsp_check(const SingularSpectrum& spectrum, int r, double p) {
    check_p(p);
    spectrum.validate();
    if (r < 1 || r >= spectrum.size())
        throw std::invalid_argument("nsp_check: requires 1 <= r < n");
    return split_verdict(spectrum, r, p);
}

NspVerdict nsp_check_2r(const SingularSpectrum& spectrum, int r, double p) {
    check_p(p);
    spectrum.validate();
    if (r < 1 || 2 * r >= spectrum.size())
        throw std::invalid_argument("nsp_check_2r: requires 1 <= 2r < n");
    return split_verdict(spectrum, 2 * r, p);
}

bool nsp_monotone_in_p(const SingularSpectrum& spectrum, int r,
                       const std::vector<double>& p_list) {
    if (!nsp_check(spectrum, r, 1.0).holds) return true;  // nothing to imply
    for (double p : p_list)
        if (!nsp_check(spectrum, r, p).holds) return false;
    return true;
}

SubadditivityResult subadditivity_check(const Matrix& A, const Matrix& B, double p) {
    check_p(p);
    if (A.rows() != B.rows() || A.cols() != B.cols())
        throw std::invalid_argument("subadditivity_check: shape mismatch");
    const SingularSpectrum sa = singular_values(A);
    const SingularSpectrum sb = singular_values(B);
    const SingularSpectrum sd = singular_values(A - B);
    SubadditivityResult out;
    for (int i = 0; i < sd.size(); ++i) {
        out.lhs += std::pow(sd[i], p);
        out.rhs += std::abs(std::pow(sa[i], p) - std::pow(sb[i], p));
    }
    out.slack = out.lhs - out.rhs;
    // 1e-9 relative slack absorbs SVD rounding; exact in reals
    out.holds = out.lhs >= out.rhs - 1e-9 * std::max(1.0, out.lhs);
    return out;
}

Lemma5Result lemma5_transform(const Matrix& X0, const Matrix& W, double p) {
    check_p(p);
    if (X0.rows() != W.rows() || X0.cols() != W.cols())
        throw std::invalid_argument("lemma5_transform: shape mismatch");
    const SvdFactors fw = svd(W);
    const SingularSpectrum s0 = singular_values(X0);

    Lemma5Result out;
    out.X1 = -(fw.U * s0.values.asDiagonal() * fw.V.transpose());

    const double x0_pp = schatten_pp(X0, p);
    const double x0w_pp = schatten_pp(X0 + W, p);
    const double x1_pp = schatten_pp(out.X1, p);
    const double x1w_pp = schatten_pp(out.X1 + W, p);

    out.antecedent = x0w_pp <= x0_pp;
    out.consequent = x1w_pp <= x1_pp * (1.0 + 1e-9) + 1e-12;
    out.implication_holds = !out.antecedent || out.consequent;
    return out;
}

nlohmann::json FalsifierReport::to_json() const {
    nlohmann::json j;
    j["checked"] = checked;
    j["witness_found"] = witness_found;
    std::vector<double> spec(witness_spectrum.values.data(),
                             witness_spectrum.values.data() + witness_spectrum.values.size());
    j["witness_spectrum"] = std::move(spec);
    j["margin"] = margin;
    return j;
}

FalsifierReport nsp_falsify(const MeasurementOperator& op, int r, double p, int trials,
                            std::uint64_t seed) {
    check_p(p);
    if (trials < 1) throw std::invalid_argument("nsp_falsify: trials must be >= 1");
    const int n = std::min(op.n1(), op.n2());
    if (r < 1 || r >= n) throw std::invalid_argument("nsp_falsify: requires 1 <= r < n");

    const std::vector<Matrix> samples = null_space_sample(op, seed, trials);
    FalsifierReport report;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const Matrix& W : samples) {
        ++report.checked;
        const SingularSpectrum s = singular_values(W);
        const NspVerdict v = nsp_check(s, r, p);
        min_margin = std::min(min_margin, v.margin);
        if (!v.holds) {
            report.witness_found = true;
            report.witness = W;
            report.witness_spectrum = s;
            report.margin = v.margin;
            return report;
        }
    }
    report.margin = min_margin;
    return report;
}

}  // namespace sprec
