#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "jl/parallel.hpp"
#include "jl/quadrature.hpp"
#include "jl/rng.hpp"
#include "jl/special_functions.hpp"
#include "jl/sphere_geometry.hpp"

namespace jl::tails {

using sphere::SplitParams;

enum class TailMethod { closed, quadrature, monte_carlo };
enum class TailSide { above, below };

struct TailQuery {
    SplitParams params;
    double eps;

    TailQuery(SplitParams p, double eps_) : params(p), eps(eps_) {
        if (!(eps > 0.0)) throw std::domain_error("TailQuery: eps must be positive");
    }
};

struct TailProbabilities {
    double above = 0.0;
    double below = 0.0;
    TailMethod method = TailMethod::closed;
    // closed: continued-fraction design bound; quadrature: summed GK error;
    // monte_carlo: one binomial standard error (worst of the two tails).
    double abs_error_estimate = 0.0;
};

// CDF of the split statistic: P[s <= t] for s with density B f(s). By the
// identity verified against quadrature in the test suite this equals the
// regularized incomplete beta I_t(k/2, (d-k)/2).
inline double cdf(const SplitParams& params, double t) {
    if (t < 0.0 || t > 1.0) throw std::domain_error("tails::cdf: t outside [0,1]");
    return sf::reg_inc_beta(0.5 * params.k, 0.5 * (params.d - params.k), t);
}

inline double tail_above(const TailQuery& q) {
    const double t = q.params.s0() * (1.0 + q.eps);
    if (t >= 1.0) return 0.0;
    return 1.0 - cdf(q.params, t);
}

inline double tail_below(const TailQuery& q) {
    const double t = q.params.s0() * (1.0 - q.eps);
    if (t <= 0.0) return 0.0;
    return cdf(q.params, t);
}

// Log-domain accessors for the deep-tail regime (values under 1e-300).
// Both thresholds sit on the direct continued-fraction branch of their
// respective orientation, so no complement is ever formed.
inline double log_tail_above(const TailQuery& q) {
    const double t = q.params.s0() * (1.0 + q.eps);
    if (t >= 1.0) return -std::numeric_limits<double>::infinity();
    const double a = 0.5 * q.params.k;
    const double b = 0.5 * (q.params.d - q.params.k);
    return sf::log_reg_inc_beta(b, a, 1.0 - t);
}

inline double log_tail_below(const TailQuery& q) {
    const double t = q.params.s0() * (1.0 - q.eps);
    if (t <= 0.0) return -std::numeric_limits<double>::infinity();
    const double a = 0.5 * q.params.k;
    const double b = 0.5 * (q.params.d - q.params.k);
    return sf::log_reg_inc_beta(a, b, t);
}

// Independent oracle: adaptive Gauss-Kronrod integration of B f(s) over the
// tail interval, carried out on exp(log-integrand - M) with M the largest
// log-integrand probe so the scaled integrand stays representable.
inline double tail_quadrature(const TailQuery& q, TailSide side) {
    const double s0 = q.params.s0();
    double lo, hi;
    if (side == TailSide::above) {
        lo = s0 * (1.0 + q.eps);
        hi = 1.0;
        if (lo >= 1.0) return 0.0;
    } else {
        lo = 0.0;
        hi = s0 * (1.0 - q.eps);
        if (hi <= 0.0) return 0.0;
    }

    const double log_norm = sphere::log_B(q.params);
    auto log_integrand = [&](double s) { return log_norm + sphere::log_density_f(s, q.params); };

    // Probe the mode and a coarse grid for the scaling constant.
    double peak = -std::numeric_limits<double>::infinity();
    const int probes = 33;
    for (int i = 1; i < probes; ++i) {
        const double s = lo + (hi - lo) * i / probes;
        peak = std::max(peak, log_integrand(s));
    }
    if (q.params.d > 4) {
        const double mode = static_cast<double>(q.params.k - 2) / (q.params.d - 4);
        if (mode > lo && mode < hi) peak = std::max(peak, log_integrand(mode));
    }
    if (!std::isfinite(peak)) peak = 0.0;

    auto integrand = [&](double s) {
        const double lf = log_integrand(s);
        return std::isfinite(lf) ? std::exp(lf - peak) : 0.0;
    };
    const double scaled_tol = 1e-12 * std::exp(-std::min(peak, 600.0));
    const auto res = quad::integrate_adaptive(integrand, lo, hi, std::max(scaled_tol, 1e-300));
    return std::exp(peak) * res.value;
}

// Exact floor L = min of the two tails; a universal lower bound on the
// failure probability of any rank-k matrix.
inline double certified_tail_floor(const TailQuery& q) {
    return std::min(tail_above(q), tail_below(q));
}

inline TailProbabilities tails_closed(const TailQuery& q) {
    return TailProbabilities{tail_above(q), tail_below(q), TailMethod::closed, 1e-12};
}

inline TailProbabilities tails_quadrature(const TailQuery& q) {
    return TailProbabilities{tail_quadrature(q, TailSide::above), tail_quadrature(q, TailSide::below),
                             TailMethod::quadrature, 1e-10};
}

// Monte Carlo over uniform sphere points; trial i consumes substream
// (seed, i), so the counts are independent of the thread layout.
inline TailProbabilities tails_monte_carlo(const TailQuery& q, std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw std::domain_error("tails_monte_carlo: n must be >= 1");
    const double lo = q.params.s0() * (1.0 - q.eps);
    const double hi = q.params.s0() * (1.0 + q.eps);
    const int k = q.params.k;
    const int d = q.params.d;

    const std::uint64_t chunk = 4096;
    const std::uint64_t n_chunks = (static_cast<std::uint64_t>(n) + chunk - 1) / chunk;
    std::vector<std::int64_t> above(n_chunks, 0), below(n_chunks, 0);
    par::for_chunks(static_cast<std::uint64_t>(n), chunk, [&](std::uint64_t c, std::uint64_t b0, std::uint64_t b1) {
        std::int64_t na = 0, nb = 0;
        for (std::uint64_t i = b0; i < b1; ++i) {
            rng::Stream stream(seed, i);
            double s = 0.0, norm2 = 0.0;
            for (int j = 0; j < d; ++j) {
                const double g = stream.normal();
                norm2 += g * g;
                if (j < k) s += g * g;
            }
            const double ratio = s / norm2;
            if (ratio > hi) ++na;
            if (ratio < lo) ++nb;
        }
        above[c] = na;
        below[c] = nb;
    });
    std::int64_t na = 0, nb = 0;
    for (std::uint64_t c = 0; c < n_chunks; ++c) {
        na += above[c];
        nb += below[c];
    }
    const double pa = static_cast<double>(na) / n;
    const double pb = static_cast<double>(nb) / n;
    const double se = std::max(std::sqrt(pa * (1.0 - pa) / n), std::sqrt(pb * (1.0 - pb) / n));
    return TailProbabilities{pa, pb, TailMethod::monte_carlo, se};
}

inline TailProbabilities tails(const TailQuery& q, TailMethod method = TailMethod::closed,
                               std::int64_t n = 0, std::uint64_t seed = 0) {
    switch (method) {
        case TailMethod::closed: return tails_closed(q);
        case TailMethod::quadrature: return tails_quadrature(q);
        case TailMethod::monte_carlo: return tails_monte_carlo(q, n, seed);
    }
    throw std::domain_error("tails: unknown method");
}

}
