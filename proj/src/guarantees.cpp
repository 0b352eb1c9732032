#include "sprec/guarantees.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

namespace sprec {

namespace {

const double kC = 2.0 * (std::sqrt(2.0) - 1.0);

void check_threshold_args(double p, int r, int t) {
    if (!(p > 0.0) || p > 1.0) throw std::invalid_argument("threshold: p must lie in (0, 1]");
    if (r < 1) throw std::invalid_argument("threshold: r must be >= 1");
    if (t < r) throw std::invalid_argument("threshold: t must be >= r");
}

std::string format_sig12(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void GuaranteeParams::validate() const {
    check_threshold_args(p, r, t);
    if (!(delta >= 0.0) || delta >= 1.0)
        throw std::invalid_argument("guarantee params: delta must lie in [0, 1)");
}

double prop2_threshold(double p, int r, int t) {
    check_threshold_args(p, r, t);
    // c*a/(c*a+1) = 1/(1 + exp(-L)) with L = log(c) + (1/p - 1/2) log(t/r);
    // the logistic form survives the huge exponents reached at small p.
    const double L = std::log(kC) + (1.0 / p - 0.5) * std::log(static_cast<double>(t) / r);
    const double value = 1.0 / (1.0 + std::exp(-L));
    // the true value is provably below 1; keep the contract when the
    // logistic saturates in double precision
    return std::min(value, std::nextafter(1.0, 0.0));
}

double thm2_threshold(double p, int r, int t) {
    check_threshold_args(p, r, t);
    // (b-1)/(b+1) = tanh(log(b)/2)
    const double logb = (2.0 / p - 1.0) * std::log(static_cast<double>(t) / r);
    return std::min(std::tanh(0.5 * logb), std::nextafter(1.0, 0.0));
}

BoundConstants thm2_constants(const GuaranteeParams& params) {
    params.validate();
    const double p = params.p;
    const double delta = params.delta;
    const double ratio = static_cast<double>(params.r) / params.t;

    BoundConstants out;
    out.lambda = 2.0 / std::sqrt(1.0 - delta);
    const double log_mu = 0.5 * (std::log1p(delta) - std::log1p(-delta)) +
                          (1.0 / p - 0.5) * std::log(ratio);
    out.mu = std::exp(log_mu);
    const double mu_p = std::exp(p * log_mu);
    if (!(mu_p < 1.0)) {
        std::ostringstream msg;
        msg << "thm2_constants: condition violated, mu = " << out.mu << " gives mu^p = " << mu_p
            << " >= 1 (delta must stay below thm2_threshold)";
        throw ThresholdViolation(msg.str(), out.mu);
    }

    const double log_two_pow = (2.0 / p - 1.0) * std::log(2.0);  // log 2^(2/p-1)
    const double log_one_minus = std::log1p(-mu_p) / p;          // log (1-mu^p)^(1/p)
    const double log_one_plus = std::log1p(mu_p) / p;            // log (1+mu^p)^(1/p)
    const double kappa = 1.0 + 2.0 * std::sqrt((1.0 + delta) / (1.0 - delta));

    out.c1 = std::exp(log_two_pow + log_one_plus - log_one_minus);
    out.d1 = std::exp(log_two_pow - log_one_minus) * out.lambda;
    out.c2 = kappa * std::exp(log_two_pow - log_one_minus);
    out.d2 = 2.0 * out.lambda +
             kappa * std::exp((1.0 / p - 1.0) * std::log(2.0) - log_one_minus) * out.lambda;

    if (!std::isfinite(out.c1) || !std::isfinite(out.d1) || !std::isfinite(out.c2) ||
        !std::isfinite(out.d2))
        throw std::overflow_error("thm2_constants: constants exceed double range");
    return out;
}

double corollary_small_p(int r, double delta) {
    if (r < 1) throw std::invalid_argument("corollary_small_p: r must be >= 1");
    if (!(delta > 0.0) || delta >= 1.0)
        throw std::invalid_argument("corollary_small_p: delta must lie in (0, 1)");
    const int t = r + 1;
    if (prop2_threshold(1.0, r, t) > delta) return 1.0;
    // threshold is continuous and strictly decreasing in p for t > r, and
    // tends to 1 as p -> 0, so a sign change is guaranteed on (0, 1].
    double lo = 1e-9, hi = 1.0;
    while (hi - lo > 1e-7) {
        const double mid = 0.5 * (lo + hi);
        if (prop2_threshold(mid, r, t) > delta)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double smallp2_threshold(double p, int r) { return thm2_threshold(p, r, r + 1); }

std::optional<double> crossing_point_closed_form(int r, int t) {
    if (r < 1 || t <= r)
        throw std::invalid_argument("crossing_point: requires t > r >= 1");
    const double xstar = kC + std::sqrt(kC * kC + 1.0);
    const double inv_p = 0.5 + std::log(xstar) / std::log(static_cast<double>(t) / r);
    const double p = 1.0 / inv_p;
    if (p <= 0.0 || p >= 1.0) return std::nullopt;
    return p;
}

std::optional<double> crossing_point(int r, int t) {
    if (r < 1 || t <= r)
        throw std::invalid_argument("crossing_point: requires t > r >= 1");
    auto diff = [&](double p) { return prop2_threshold(p, r, t) - thm2_threshold(p, r, t); };
    const double hi_end = 1.0;
    if (diff(hi_end) <= 0.0) return std::nullopt;
    // both curves saturate to 1 in double precision as p -> 0, so locate the
    // lower bracket by halving until the difference turns negative
    double lo = 0.0;
    for (double p = 0.5; p > 1e-12; p *= 0.5) {
        if (diff(p) < 0.0) {
            lo = p;
            break;
        }
    }
    if (lo == 0.0) return std::nullopt;
    double hi = hi_end;
    while (hi - lo > 1e-9) {
        const double mid = 0.5 * (lo + hi);
        if (diff(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

std::string ThresholdCurve::to_csv() const {
    std::string out = "p,delta_prop2,delta_thm2\n";
    for (const Sample& s : samples) {
        out += format_sig12(s.p);
        out += ',';
        out += format_sig12(s.delta_prop2);
        out += ',';
        out += format_sig12(s.delta_thm2);
        out += '\n';
    }
    return out;
}

nlohmann::json ThresholdCurve::to_json() const {
    nlohmann::json j;
    j["r"] = r;
    j["t"] = t;
    nlohmann::json arr = nlohmann::json::array();
    for (const Sample& s : samples)
        arr.push_back({{"p", s.p}, {"delta_prop2", s.delta_prop2}, {"delta_thm2", s.delta_thm2}});
    j["samples"] = std::move(arr);
    return j;
}

ThresholdCurve threshold_curve(int r, int t, const std::vector<double>& p_grid) {
    if (p_grid.empty()) throw std::invalid_argument("threshold_curve: empty grid");
    for (size_t i = 0; i < p_grid.size(); ++i) {
        if (!(p_grid[i] > 0.0) || p_grid[i] > 1.0)
            throw std::invalid_argument("threshold_curve: grid values must lie in (0, 1]");
        if (i > 0 && p_grid[i] <= p_grid[i - 1])
            throw std::invalid_argument("threshold_curve: grid must be strictly increasing");
    }
    ThresholdCurve curve;
    curve.r = r;
    curve.t = t;
    curve.samples.reserve(p_grid.size());
    for (double p : p_grid)
        curve.samples.push_back({p, prop2_threshold(p, r, t), thm2_threshold(p, r, t)});
    return curve;
}

double error_bound_rhs(BoundKind kind, const BoundConstants& constants,
                       const GuaranteeParams& params, double tail_p, double epsilon) {
    params.validate();
    if (!(tail_p >= 0.0)) throw std::invalid_argument("error_bound_rhs: negative tail");
    if (!(epsilon >= 0.0)) throw std::invalid_argument("error_bound_rhs: negative epsilon");
    const double p = params.p;
    if (kind == BoundKind::quasi_norm)
        return constants.c1 * tail_p +
               constants.d1 * std::pow(static_cast<double>(params.r), 1.0 / p - 0.5) * epsilon;
    return constants.c2 * std::pow(static_cast<double>(params.t), 0.5 - 1.0 / p) * tail_p +
           constants.d2 * epsilon;
}

}  // namespace sprec
