#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>

#include "jl/beta_tail.hpp"
#include "jl/special_functions.hpp"
#include "jl/sphere_geometry.hpp"

namespace jl::bounds {

using sphere::SplitParams;

// Prefactor constants, kept as exact expressions.
inline const double c_lower_b = std::exp(-2.0) / (2.0 * std::sqrt(std::numbers::pi));        // e^-2 / 2 sqrt(pi)
inline const double c_upper_b = std::exp(-1.0) / (2.0 * std::sqrt(std::numbers::pi));        // e^-1 / 2 sqrt(pi)
inline const double c_bsf_upper = 9.0 * std::exp(-1.0) / std::sqrt(2.0 * std::numbers::pi);  // 9 e^-1 / sqrt(2 pi)
inline const double c_upper_tail_ub = 27.0 * std::exp(-1.0) / std::sqrt(2.0 * std::numbers::pi);
inline const double c_lower_tail_ub = 18.0 * std::sqrt(2.0) * std::exp(0.5) / std::sqrt(std::numbers::pi);
inline const double c_upper_tail_lb = std::exp(-2.0) / (4.0 * std::sqrt(std::numbers::pi));
inline const double c_upper_tail_lb_delta = std::exp(-2.0) / (4.0 * std::numbers::pi);

// One constant dominating both tail upper bounds, used wherever a single C
// is required (the existence theorem's hypothesis).
inline const double theorem_constant_C = std::max(c_upper_tail_ub, c_lower_tail_ub);

// Regime gate for every evaluator below: eps, delta in (0, 1/2],
// k - 4 >= eps^-2, s0 < 0.4. parity_ok tracks the even-k, even-d
// requirement separately.
struct AssumptionSet {
    double eps = 0.0;
    double delta = 0.0;
    SplitParams params;
    bool eps_ok = false;
    bool delta_ok = false;
    bool k_ok = false;
    bool s0_ok = false;
    bool parity_ok = false;

    bool holds() const { return eps_ok && delta_ok && k_ok && s0_ok; }
};

inline AssumptionSet assumptions_hold(double eps, double delta, const SplitParams& params) {
    AssumptionSet a{eps, delta, params};
    a.eps_ok = eps > 0.0 && eps <= 0.5;
    a.delta_ok = delta > 0.0 && delta <= 0.5;
    a.k_ok = static_cast<double>(params.k) - 4.0 >= 1.0 / (eps * eps);
    a.s0_ok = params.s0() < 0.4;
    a.parity_ok = params.k % 2 == 0 && params.d % 2 == 0;
    return a;
}

// Robbins' two-sided Stirling bounds on log n!.
inline std::pair<double, double> robbins_log_factorial_bounds(std::int64_t n) {
    if (n < 1) throw std::domain_error("robbins_log_factorial_bounds: n must be >= 1");
    const double nd = static_cast<double>(n);
    const double core = sf::half_log_two_pi + (nd + 0.5) * std::log(nd) - nd;
    return {core + 1.0 / (12.0 * nd + 1.0), core + 1.0 / (12.0 * nd)};
}

namespace detail {

inline void require_even_parity(const SplitParams& params, const char* who) {
    if (params.k % 2 != 0 || params.d % 2 != 0)
        throw std::domain_error(std::string(who) + ": k and d must both be even");
    if (params.k < 4 || params.d - params.k < 4)
        throw std::domain_error(std::string(who) + ": need k >= 4 and d - k >= 4");
}

inline void require_tail_regime(int k, double eps, const char* who) {
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::domain_error(std::string(who) + ": eps must lie in (0, 1/2]");
    if (k % 2 != 0) throw std::domain_error(std::string(who) + ": k must be even");
    if (static_cast<double>(k) - 4.0 < 1.0 / (eps * eps))
        throw std::domain_error(std::string(who) + ": need k - 4 >= eps^-2");
}

}

// Two-sided bound on B for even k, d (log domain):
//   e^-2/(2 sqrt pi) * (d-2)^{(d-1)/2} / ((k-2)^{(k-1)/2} (d-k-2)^{(d-k-1)/2})
// below, the same with e^-1 above.
inline std::pair<double, double> b_bounds(const SplitParams& params) {
    detail::require_even_parity(params, "b_bounds");
    const double k = params.k, d = params.d;
    const double shape = 0.5 * (d - 1.0) * std::log(d - 2.0) - 0.5 * (k - 1.0) * std::log(k - 2.0) -
                         0.5 * (d - k - 1.0) * std::log(d - k - 2.0);
    return {std::log(c_lower_b) + shape, std::log(c_upper_b) + shape};
}

// Bracket for B s0 f(s0):  e^-2/(2 sqrt pi) sqrt(k) <= B s0 f(s0) <= 9 e^-1/sqrt(2 pi) sqrt(k).
inline std::pair<double, double> bsf_bounds(const SplitParams& params) {
    detail::require_even_parity(params, "bsf_bounds");
    if (!(params.s0() < 0.4)) throw std::domain_error("bsf_bounds: need s0 < 0.4");
    const double root_k = std::sqrt(static_cast<double>(params.k));
    return {c_lower_b * root_k, c_bsf_upper * root_k};
}

// --- the four tail bounds, log-domain cores ---------------------------------

inline double log_upper_tail_lower_bound(const SplitParams& params, double eps) {
    detail::require_tail_regime(params.k, eps, "upper_tail_lower_bound");
    if (params.d % 2 != 0) throw std::domain_error("upper_tail_lower_bound: d must be even");
    if (!(params.s0() < 0.4)) throw std::domain_error("upper_tail_lower_bound: need s0 < 0.4");
    const double s0 = params.s0();
    const double root = std::sqrt(static_cast<double>(params.k)) * eps + 1.0;
    return std::log(c_upper_tail_lb) - 0.25 * root * root * (1.0 + s0) / (1.0 - s0);
}

inline double log_upper_tail_upper_bound(int k, double eps) {
    detail::require_tail_regime(k, eps, "upper_tail_upper_bound");
    return std::log(c_upper_tail_ub) - 0.25 * (k - 2.0) * eps * eps * (1.0 - 2.0 * eps / 3.0);
}

inline double log_lower_tail_lower_bound(const SplitParams& params, double eps) {
    detail::require_tail_regime(params.k, eps, "lower_tail_lower_bound");
    if (params.d % 2 != 0) throw std::domain_error("lower_tail_lower_bound: d must be even");
    if (!(params.s0() < 0.4)) throw std::domain_error("lower_tail_lower_bound: need s0 < 0.4");
    const double k = params.k;
    const double s0 = params.s0();
    const double root = std::sqrt(k) * eps + 1.0;
    const double cube = std::cbrt(k) * eps + std::pow(k, -1.0 / 6.0);
    return std::log(c_lower_b) - 0.25 * (root * root / (1.0 - s0) + 2.0 * cube * cube * cube);
}

inline double log_lower_tail_upper_bound(int k, double eps) {
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::domain_error("lower_tail_upper_bound: eps must lie in (0, 1/2]");
    if (k % 2 != 0) throw std::domain_error("lower_tail_upper_bound: k must be even");
    if (static_cast<double>(k) < 1.0 / (eps * eps))
        throw std::domain_error("lower_tail_upper_bound: need k >= eps^-2");
    return std::log(c_lower_tail_ub) - 0.25 * k * eps * eps;
}

// Weaker displayed variant with the (k-2)/4 eps^2 (1 - 2eps/3) exponent.
inline double log_lower_tail_upper_bound_weak(int k, double eps) {
    if (!(eps > 0.0 && eps <= 0.5))
        throw std::domain_error("lower_tail_upper_bound_weak: eps must lie in (0, 1/2]");
    if (k % 2 != 0) throw std::domain_error("lower_tail_upper_bound_weak: k must be even");
    if (static_cast<double>(k) < 1.0 / (eps * eps))
        throw std::domain_error("lower_tail_upper_bound_weak: need k >= eps^-2");
    return std::log(c_lower_tail_ub) - 0.25 * (k - 2.0) * eps * eps * (1.0 - 2.0 * eps / 3.0);
}

inline double upper_tail_lower_bound(const SplitParams& params, double eps) {
    return std::exp(log_upper_tail_lower_bound(params, eps));
}
inline double upper_tail_upper_bound(int k, double eps) {
    return std::exp(log_upper_tail_upper_bound(k, eps));
}
inline double lower_tail_lower_bound(const SplitParams& params, double eps) {
    return std::exp(log_lower_tail_lower_bound(params, eps));
}
inline double lower_tail_upper_bound(int k, double eps) {
    return std::exp(log_lower_tail_upper_bound(k, eps));
}
inline double lower_tail_upper_bound_weak(int k, double eps) {
    return std::exp(log_lower_tail_upper_bound_weak(k, eps));
}

// --- delta-form exponents ----------------------------------------------------

inline double gamma1(double eta, double delta, double s0) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("gamma1: delta must lie in (0,1)");
    if (!(eta > 0.0)) throw std::domain_error("gamma1: eta must be positive");
    if (!(s0 >= 0.0 && s0 < 0.4)) throw std::domain_error("gamma1: need 0 <= s0 < 0.4");
    const double root = 1.0 + 1.0 / std::sqrt(eta * std::log(1.0 / delta));
    return root * root * (1.0 + s0) / (1.0 - s0);
}

inline double gamma2(double eta, double delta, double eps, double s0) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::domain_error("gamma2: delta must lie in (0,1)");
    if (!(eta > 0.0)) throw std::domain_error("gamma2: eta must be positive");
    if (!(s0 >= 0.0 && s0 < 0.4)) throw std::domain_error("gamma2: need 0 <= s0 < 0.4");
    const double L = eta * std::log(1.0 / delta);
    const double sq = 1.0 + 1.0 / std::sqrt(L);
    const double cb = std::cbrt(eps) + 1.0 / std::cbrt(L);
    return sq * sq / (1.0 - s0) + 2.0 * cb * cb * cb;
}

// delta-form floors:  (e^-2/4pi) delta^{eta gamma1 / 4}  and
// (e^-2/2 sqrt pi) delta^{eta gamma2 / 4}.
inline double log_upper_tail_delta_form(double eta, double delta, double s0) {
    return std::log(c_upper_tail_lb_delta) - 0.25 * eta * gamma1(eta, delta, s0) * std::log(1.0 / delta);
}
inline double log_lower_tail_delta_form(double eta, double delta, double eps, double s0) {
    return std::log(c_lower_b) - 0.25 * eta * gamma2(eta, delta, eps, s0) * std::log(1.0 / delta);
}
inline double upper_tail_delta_form(double eta, double delta, double s0) {
    return std::exp(log_upper_tail_delta_form(eta, delta, s0));
}
inline double lower_tail_delta_form(double eta, double delta, double eps, double s0) {
    return std::exp(log_lower_tail_delta_form(eta, delta, eps, s0));
}

// --- report ------------------------------------------------------------------

struct BoundReport {
    SplitParams params;
    double eps = 0.0;
    double exact_above = 0.0;
    double exact_below = 0.0;
    std::optional<double> lower_of_above;
    std::optional<double> upper_of_above;
    std::optional<double> lower_of_below;
    std::optional<double> upper_of_below;
    std::optional<bool> sandwich_above;
    std::optional<bool> sandwich_below;
    AssumptionSet assumptions;
};

// Bounds are strict inequalities; 1e-12 covers roundoff only.
inline constexpr double sandwich_slack = 1e-12;

inline BoundReport make_bound_report(const SplitParams& params, double eps, double delta = 0.25) {
    BoundReport r{params, eps};
    const tails::TailQuery q(params, eps);
    r.exact_above = tails::tail_above(q);
    r.exact_below = tails::tail_below(q);
    r.assumptions = assumptions_hold(eps, delta, params);
    if (r.assumptions.holds() && r.assumptions.parity_ok) {
        r.lower_of_above = upper_tail_lower_bound(params, eps);
        r.upper_of_above = upper_tail_upper_bound(params.k, eps);
        r.lower_of_below = lower_tail_lower_bound(params, eps);
        r.upper_of_below = lower_tail_upper_bound(params.k, eps);
        r.sandwich_above = *r.lower_of_above <= r.exact_above + sandwich_slack &&
                           r.exact_above <= *r.upper_of_above + sandwich_slack;
        r.sandwich_below = *r.lower_of_below <= r.exact_below + sandwich_slack &&
                           r.exact_below <= *r.upper_of_below + sandwich_slack;
    }
    return r;
}

inline const char* bound_report_csv_header() {
    return "k,d,eps,exact_above,lb_above,ub_above,exact_below,lb_below,ub_below,sandwich_above,sandwich_below";
}

inline std::string bound_report_csv_row(const BoundReport& r) {
    char buf[64];
    auto num = [&buf](double v) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return std::string(buf);
    };
    auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
    auto flag = [](const std::optional<bool>& v) {
        return v ? std::string(*v ? "true" : "false") : std::string();
    };
    std::string row = std::to_string(r.params.k) + "," + std::to_string(r.params.d) + "," + num(r.eps);
    row += "," + num(r.exact_above) + "," + opt(r.lower_of_above) + "," + opt(r.upper_of_above);
    row += "," + num(r.exact_below) + "," + opt(r.lower_of_below) + "," + opt(r.upper_of_below);
    row += "," + flag(r.sandwich_above) + "," + flag(r.sandwich_below);
    return row;
}

}
