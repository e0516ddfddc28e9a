#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "jl/beta_tail.hpp"
#include "jl/concentration_bounds.hpp"
#include "jl/errors.hpp"
#include "jl/jl_transforms.hpp"
#include "jl/rng.hpp"
#include "jl/sphere_geometry.hpp"

namespace jl::cert {

using sphere::SplitParams;
using transforms::DistortionEstimate;
using transforms::ProjectionMatrix;

// Cyclic Jacobi eigensolver for a symmetric n x n matrix (row-major, in
// place). Rotates until the off-diagonal Frobenius mass falls below
// tol * ||M||_F. eigvecs, when given, receives the rotation product V with
// M = V diag(eigvals) V^t.
inline void jacobi_eigen_sym(std::vector<double>& m, int n, std::vector<double>& eigvals,
                             std::vector<double>* eigvecs = nullptr, double tol = 1e-12,
                             int max_sweeps = 64) {
    auto at = [&](int i, int j) -> double& { return m[static_cast<std::size_t>(i) * n + j]; };
    double frob2 = 0.0;
    for (double v : m) frob2 += v * v;
    const double off_target2 = tol * tol * std::max(frob2, 1e-300);

    if (eigvecs) {
        eigvecs->assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int i = 0; i < n; ++i) (*eigvecs)[static_cast<std::size_t>(i) * n + i] = 1.0;
    }

    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        double off2 = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) off2 += 2.0 * at(i, j) * at(i, j);
        if (off2 <= off_target2) {
            eigvals.resize(static_cast<std::size_t>(n));
            for (int i = 0; i < n; ++i) eigvals[i] = at(i, i);
            return;
        }
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = at(p, q);
                if (apq == 0.0) continue;
                const double app = at(p, p);
                const double aqq = at(q, q);
                const double theta = 0.5 * (aqq - app) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int i = 0; i < n; ++i) {
                    const double mip = at(i, p);
                    const double miq = at(i, q);
                    at(i, p) = c * mip - s * miq;
                    at(i, q) = s * mip + c * miq;
                }
                for (int i = 0; i < n; ++i) {
                    const double mpi = at(p, i);
                    const double mqi = at(q, i);
                    at(p, i) = c * mpi - s * mqi;
                    at(q, i) = s * mpi + c * mqi;
                }
                if (eigvecs) {
                    for (int i = 0; i < n; ++i) {
                        double& vip = (*eigvecs)[static_cast<std::size_t>(i) * n + p];
                        double& viq = (*eigvecs)[static_cast<std::size_t>(i) * n + q];
                        const double tp = vip, tq = viq;
                        vip = c * tp - s * tq;
                        viq = s * tp + c * tq;
                    }
                }
            }
        }
    }
    throw numeric_error("jacobi_eigen_sym: off-diagonal mass not below tolerance after " +
                        std::to_string(max_sweeps) + " sweeps");
}

// Singular values of a k x d matrix, nonincreasing; zeros permitted.
struct SpectralProfile {
    int k = 0;
    int d = 0;
    std::vector<double> singular_values;

    // Singular values below 1e-10 * lambda_1 count as zero.
    int effective_rank() const {
        if (singular_values.empty()) return 0;
        const double cut = 1e-10 * singular_values.front();
        int r = 0;
        for (double s : singular_values)
            if (s > cut) ++r;
        return r;
    }
};

// Profile via the k x k Gram matrix A A^t and Jacobi rotations (k << d in
// every use here, so the d-sized factor is never formed).
inline SpectralProfile spectral_profile(const ProjectionMatrix& A) {
    for (double v : A.entries)
        if (!std::isfinite(v)) throw std::domain_error("spectral_profile: non-finite matrix entry");
    if (A.k > A.d) throw std::domain_error("spectral_profile: need k <= d");

    const int k = A.k, d = A.d;
    std::vector<double> gram(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i) {
        const double* ri = A.entries.data() + static_cast<std::size_t>(i) * d;
        for (int j = i; j < k; ++j) {
            const double* rj = A.entries.data() + static_cast<std::size_t>(j) * d;
            double dot = 0.0;
            for (int t = 0; t < d; ++t) dot += ri[t] * rj[t];
            gram[static_cast<std::size_t>(i) * k + j] = dot;
            gram[static_cast<std::size_t>(j) * k + i] = dot;
        }
    }
    std::vector<double> eig;
    jacobi_eigen_sym(gram, k, eig);
    SpectralProfile profile{k, d, {}};
    profile.singular_values.reserve(static_cast<std::size_t>(k));
    for (double e : eig) profile.singular_values.push_back(e > 0.0 ? std::sqrt(e) : 0.0);
    std::sort(profile.singular_values.begin(), profile.singular_values.end(), std::greater<>());
    return profile;
}

inline SpectralProfile spectral_profile_file(const std::string& path) {
    return spectral_profile(transforms::read_matrix_file(path));
}

// The universal failure floor of Lemma-type exact tails: every rank-k matrix
// fails with probability at least min of the two exact tails.
inline double exact_failure_floor(int k, int d, double eps) {
    const tails::TailQuery q(SplitParams(k, d), eps);
    return tails::certified_tail_floor(q);
}

enum class FailurePath { direct, split_law };

// Monte Carlo failure probability of a fixed matrix over w ~ uniform(S^{d-1}).
// direct: apply A to a fresh sphere point per trial. split_law: use
// ‖Aw‖^2 = s c(u) with s ~ Beta(k/2, (d-k)/2), u ~ uniform(S^{k-1}) and
// c(u) = sum_i lambda_i^2 u_i^2; same law, O(k) per trial.
inline DistortionEstimate empirical_failure_prob(const ProjectionMatrix& A, double eps,
                                                 std::int64_t n, std::uint64_t seed,
                                                 FailurePath path = FailurePath::direct) {
    if (n < 1) throw std::domain_error("empirical_failure_prob: n must be >= 1");
    if (path == FailurePath::direct) return transforms::estimate_distortion_prob(A, eps, n, seed);

    const auto profile = spectral_profile(A);
    std::vector<double> lambda2(profile.singular_values.size());
    for (std::size_t i = 0; i < lambda2.size(); ++i)
        lambda2[i] = profile.singular_values[i] * profile.singular_values[i];
    const double a = 0.5 * A.k;
    const double b = 0.5 * (A.d - A.k);
    if (!(b > 0.0)) throw std::domain_error("empirical_failure_prob: split_law path needs k < d");

    return transforms::detail::run_trials(n, eps, [&, a, b](std::uint64_t i) {
        rng::Stream stream(seed, i);
        const double s = stream.beta(a, b);
        double c = 0.0, norm2 = 0.0;
        for (std::size_t j = 0; j < lambda2.size(); ++j) {
            const double g = stream.normal();
            norm2 += g * g;
            c += lambda2[j] * g * g;
        }
        c /= norm2;
        return std::fabs(s * c - 1.0) > eps;
    });
}

// Certificate record: L exceeding delta proves no (eps,delta)-JL
// distribution exists on k x d matrices at this d.
struct CertVerdict {
    int k = 0;
    int d = 0;
    double eps = 0.0;
    double delta = 0.0;
    double L = 0.0;
    double margin = 0.0;
    bool no_jld = false;
    double eta = 0.0;
    double gamma1 = 0.0;
    double gamma2 = 0.0;
    double analytic_floor = 0.0;  // max of the two delta-form lower bounds
};

inline CertVerdict certify_no_jld(int k, int d, double eps, double delta) {
    if (k < 1 || k >= d) throw std::domain_error("certify_no_jld: need 1 <= k < d");
    if (!(eps > 0.0 && eps < 0.5) || !(delta > 0.0 && delta < 0.5))
        throw std::domain_error("certify_no_jld: need eps, delta in (0, 1/2)");
    CertVerdict v;
    v.k = k;
    v.d = d;
    v.eps = eps;
    v.delta = delta;
    v.L = exact_failure_floor(k, d, eps);
    v.margin = v.L - delta;
    v.no_jld = v.L > delta;
    const double L_log = std::log(1.0 / delta);
    v.eta = static_cast<double>(k) * eps * eps / L_log;
    const double s0 = static_cast<double>(k) / d;
    if (v.eta > 0.0 && s0 < 0.4) {
        v.gamma1 = bounds::gamma1(v.eta, delta, s0);
        v.gamma2 = bounds::gamma2(v.eta, delta, eps, s0);
        v.analytic_floor = std::max(bounds::upper_tail_delta_form(v.eta, delta, s0),
                                    bounds::lower_tail_delta_form(v.eta, delta, eps, s0));
    }
    return v;
}

// Sets k = floor(eta eps^-2 log(1/delta)) and certifies at that k.
inline CertVerdict eta_threshold_scan(double eta, double eps, double delta, int d) {
    if (!(eta > 0.0)) throw std::domain_error("eta_threshold_scan: eta must be positive");
    if (!(eps > 0.0 && eps < 0.5) || !(delta > 0.0 && delta < 0.5))
        throw std::domain_error("eta_threshold_scan: need eps, delta in (0, 1/2)");
    const double raw = eta / (eps * eps) * std::log(1.0 / delta);
    const long long k = static_cast<long long>(std::floor(raw));
    if (k < 1) throw std::domain_error("eta_threshold_scan: eta too small, k would be < 1");
    if (k >= d)
        throw std::domain_error("eta_threshold_scan: k = " + std::to_string(k) +
                                " >= d = " + std::to_string(d) + "; increase d");
    CertVerdict v = certify_no_jld(static_cast<int>(k), d, eps, delta);
    v.eta = eta;  // report the requested eta, not the back-derived one
    const double s0 = static_cast<double>(k) / d;
    if (s0 < 0.4) {
        v.gamma1 = bounds::gamma1(eta, delta, s0);
        v.gamma2 = bounds::gamma2(eta, delta, eps, s0);
        v.analytic_floor = std::max(bounds::upper_tail_delta_form(eta, delta, s0),
                                    bounds::lower_tail_delta_form(eta, delta, eps, s0));
    }
    return v;
}

}
