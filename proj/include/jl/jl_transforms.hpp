#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jl/concentration_bounds.hpp"
#include "jl/errors.hpp"
#include "jl/parallel.hpp"
#include "jl/rng.hpp"
#include "jl/sphere_geometry.hpp"

namespace jl::transforms {

enum class MatrixKind { achlioptas, gaussian, orthogonal };

inline const char* kind_name(MatrixKind kind) {
    switch (kind) {
        case MatrixKind::achlioptas: return "achlioptas";
        case MatrixKind::gaussian: return "gaussian";
        case MatrixKind::orthogonal: return "orthogonal";
    }
    throw std::domain_error("kind_name: unknown matrix kind");
}

inline MatrixKind kind_from_name(const std::string& name) {
    if (name == "achlioptas") return MatrixKind::achlioptas;
    if (name == "gaussian") return MatrixKind::gaussian;
    if (name == "orthogonal") return MatrixKind::orthogonal;
    throw std::domain_error("kind_from_name: unknown matrix kind '" + name + "'");
}

// Dense k x d projection matrix, row-major, with the construction's scaling
// already applied to the stored entries.
struct ProjectionMatrix {
    MatrixKind kind = MatrixKind::gaussian;
    int k = 0;
    int d = 0;
    double scale = 1.0;
    std::vector<double> entries;

    double at(int i, int j) const { return entries[static_cast<std::size_t>(i) * d + j]; }
    double& at(int i, int j) { return entries[static_cast<std::size_t>(i) * d + j]; }
};

// Achlioptas sparse-sign matrix: entries sqrt(3/k) * {+1 w.p. 1/6, 0 w.p.
// 2/3, -1 w.p. 1/6}. A draw u ~ U[0,1) maps to +1 on [0,1/6), -1 on
// [1/6,1/3), 0 otherwise.
inline ProjectionMatrix achlioptas_matrix(int k, int d, rng::Stream& stream) {
    if (k < 1 || d < 1) throw std::domain_error("achlioptas_matrix: k, d must be >= 1");
    ProjectionMatrix A{MatrixKind::achlioptas, k, d, std::sqrt(3.0 / k)};
    A.entries.resize(static_cast<std::size_t>(k) * d);
    for (auto& e : A.entries) {
        const double u = stream.uniform01();
        e = u < 1.0 / 6.0 ? A.scale : (u < 1.0 / 3.0 ? -A.scale : 0.0);
    }
    return A;
}

// Dense Gaussian baseline: i.i.d. N(0, 1/k) entries.
inline ProjectionMatrix gaussian_matrix(int k, int d, rng::Stream& stream) {
    if (k < 1 || d < 1) throw std::domain_error("gaussian_matrix: k, d must be >= 1");
    ProjectionMatrix A{MatrixKind::gaussian, k, d, 1.0 / std::sqrt(static_cast<double>(k))};
    A.entries.resize(static_cast<std::size_t>(k) * d);
    for (auto& e : A.entries) e = A.scale * stream.normal();
    return A;
}

namespace detail {

// Orthonormalizes k Gaussian rows of dimension d in place (modified
// Gram-Schmidt with one re-orthogonalization pass). The result has the law
// of the first k rows of a Haar orthogonal matrix: row-wise MGS of a
// Gaussian matrix G is the transposed QR factorization of G^t with positive
// triangular diagonal.
inline void haar_rows(std::vector<double>& rows, int k, int d, rng::Stream& stream) {
    rows.resize(static_cast<std::size_t>(k) * d);
    for (int i = 0; i < k; ++i) {
        double* row = rows.data() + static_cast<std::size_t>(i) * d;
        for (;;) {
            for (int j = 0; j < d; ++j) row[j] = stream.normal();
            for (int pass = 0; pass < 2; ++pass) {
                for (int p = 0; p < i; ++p) {
                    const double* prev = rows.data() + static_cast<std::size_t>(p) * d;
                    double dot = 0.0;
                    for (int j = 0; j < d; ++j) dot += row[j] * prev[j];
                    for (int j = 0; j < d; ++j) row[j] -= dot * prev[j];
                }
            }
            double norm2 = 0.0;
            for (int j = 0; j < d; ++j) norm2 += row[j] * row[j];
            if (norm2 > 1e-250) {
                const double inv = 1.0 / std::sqrt(norm2);
                for (int j = 0; j < d; ++j) row[j] *= inv;
                break;
            }
        }
    }
}

}

// First k rows of a Haar orthogonal d x d matrix, scaled by 1/sqrt(s0) with
// s0 = k/d; only the needed rows are generated.
inline ProjectionMatrix orthogonal_projection_matrix(int k, int d, rng::Stream& stream) {
    if (k < 1) throw std::domain_error("orthogonal_projection_matrix: k must be >= 1");
    if (k >= d) throw std::domain_error("orthogonal_projection_matrix: need k < d");
    const double s0 = static_cast<double>(k) / d;
    ProjectionMatrix A{MatrixKind::orthogonal, k, d, 1.0 / std::sqrt(s0)};
    detail::haar_rows(A.entries, k, d, stream);
    for (auto& e : A.entries) e *= A.scale;
    return A;
}

inline std::vector<double> apply(const ProjectionMatrix& A, std::span<const double> x) {
    if (static_cast<int>(x.size()) != A.d)
        throw std::domain_error("transforms::apply: vector dim does not match matrix d");
    std::vector<double> y(static_cast<std::size_t>(A.k), 0.0);
    for (int i = 0; i < A.k; ++i) {
        const double* row = A.entries.data() + static_cast<std::size_t>(i) * A.d;
        double acc = 0.0;
        for (int j = 0; j < A.d; ++j) acc += row[j] * x[j];
        y[i] = acc;
    }
    return y;
}

// Achlioptas' dimension: smallest integer strictly above
// 2 log(2/delta) / (eps^2/2 - eps^3/3).
inline int achlioptas_k(double eps, double delta) {
    if (!(eps > 0.0 && eps < 0.5) || !(delta > 0.0 && delta < 0.5))
        throw std::domain_error("achlioptas_k: need eps, delta in (0, 1/2)");
    const double raw = 2.0 * std::log(2.0 / delta) / (eps * eps / 2.0 - eps * eps * eps / 3.0);
    return static_cast<int>(std::floor(raw)) + 1;
}

// Dimension from the explicit o(1) bracket: smallest integer strictly above
//   4 eps^-2 log(1/delta) [ 1 + 2eps/(3-2eps)
//                             + log(2C)/log(1/delta) * 1/(1-2eps/3)
//                             + 2eps^2/(4 log(1/delta)) ].
inline int kmn_upper_k(double eps, double delta, double C = bounds::theorem_constant_C) {
    if (!(eps > 0.0 && eps < 0.5) || !(delta > 0.0 && delta < 0.5))
        throw std::domain_error("kmn_upper_k: need eps, delta in (0, 1/2)");
    if (!(C >= 1.0)) throw std::domain_error("kmn_upper_k: need C >= 1");
    const double L = std::log(1.0 / delta);
    const double bracket = 1.0 + 2.0 * eps / (3.0 - 2.0 * eps) +
                           std::log(2.0 * C) / L / (1.0 - 2.0 * eps / 3.0) +
                           2.0 * eps * eps / (4.0 * L);
    const double raw = 4.0 / (eps * eps) * L * bracket;
    return static_cast<int>(std::floor(raw)) + 1;
}

struct DistortionEstimate {
    double p_hat = 0.0;
    std::int64_t n_samples = 0;
    double std_error = 0.0;
    double eps = 0.0;
};

namespace detail {

inline DistortionEstimate finish_estimate(std::int64_t failures, std::int64_t n, double eps) {
    DistortionEstimate e;
    e.p_hat = static_cast<double>(failures) / static_cast<double>(n);
    e.n_samples = n;
    e.std_error = std::sqrt(e.p_hat * (1.0 - e.p_hat) / static_cast<double>(n));
    e.eps = eps;
    return e;
}

template <class TrialFail>
DistortionEstimate run_trials(std::int64_t n, double eps, TrialFail&& fails) {
    const std::uint64_t chunk = 1024;
    const std::uint64_t n_chunks = (static_cast<std::uint64_t>(n) + chunk - 1) / chunk;
    std::vector<std::int64_t> counts(n_chunks, 0);
    par::for_chunks(static_cast<std::uint64_t>(n), chunk,
                    [&](std::uint64_t c, std::uint64_t b0, std::uint64_t b1) {
                        std::int64_t local = 0;
                        for (std::uint64_t i = b0; i < b1; ++i)
                            if (fails(i)) ++local;
                        counts[c] = local;
                    });
    std::int64_t failures = 0;
    for (auto c : counts) failures += c;
    return finish_estimate(failures, n, eps);
}

}

// Failure-probability estimate for a fixed matrix: trial i draws
// w ~ uniform(S^{d-1}) from substream (seed, i) and tests |‖Aw‖^2 - 1| > eps.
inline DistortionEstimate estimate_distortion_prob(const ProjectionMatrix& A, double eps,
                                                   std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw std::domain_error("estimate_distortion_prob: n must be >= 1");
    return detail::run_trials(n, eps, [&](std::uint64_t i) {
        rng::Stream stream(seed, i);
        const auto w = sphere::sample_uniform_sphere(A.d, stream);
        const auto y = apply(A, w.coords);
        double norm2 = 0.0;
        for (double v : y) norm2 += v * v;
        return std::fabs(norm2 - 1.0) > eps;
    });
}

// Failure-probability estimate for a construction: trial i draws a fresh
// matrix from substream (seed, i) and uses the fixed vector w = e1. Only
// A e1 enters the statistic, so each trial generates just the first column
// of the construction, whose law is:
//   achlioptas  - k i.i.d. sparse signs scaled by sqrt(3/k),
//   gaussian    - k i.i.d. N(0, 1/k),
//   orthogonal  - (1/sqrt(s0)) times the first k coordinates of a uniform
//                 point on S^{d-1} (the first column of a Haar matrix).
inline DistortionEstimate estimate_distortion_prob(MatrixKind kind, int k, int d, double eps,
                                                   std::int64_t n, std::uint64_t seed) {
    if (n < 1) throw std::domain_error("estimate_distortion_prob: n must be >= 1");
    if (k < 1 || d < 1) throw std::domain_error("estimate_distortion_prob: k, d must be >= 1");
    if (kind == MatrixKind::orthogonal && k >= d)
        throw std::domain_error("estimate_distortion_prob: orthogonal kind needs k < d");

    switch (kind) {
        case MatrixKind::achlioptas:
            return detail::run_trials(n, eps, [&](std::uint64_t i) {
                rng::Stream stream(seed, i);
                std::int64_t nonzero = 0;
                for (int j = 0; j < k; ++j) {
                    const double u = stream.uniform01();
                    if (u < 1.0 / 3.0) ++nonzero;
                }
                const double norm2 = 3.0 / k * static_cast<double>(nonzero);
                return std::fabs(norm2 - 1.0) > eps;
            });
        case MatrixKind::gaussian:
            return detail::run_trials(n, eps, [&](std::uint64_t i) {
                rng::Stream stream(seed, i);
                double norm2 = 0.0;
                for (int j = 0; j < k; ++j) {
                    const double g = stream.normal();
                    norm2 += g * g;
                }
                return std::fabs(norm2 / k - 1.0) > eps;
            });
        case MatrixKind::orthogonal:
            return detail::run_trials(n, eps, [&](std::uint64_t i) {
                rng::Stream stream(seed, i);
                double s = 0.0, norm2 = 0.0;
                for (int j = 0; j < d; ++j) {
                    const double g = stream.normal();
                    norm2 += g * g;
                    if (j < k) s += g * g;
                }
                const double ratio = s / norm2 * static_cast<double>(d) / k;
                return std::fabs(ratio - 1.0) > eps;
            });
    }
    throw std::domain_error("estimate_distortion_prob: unknown matrix kind");
}

// --- matrix file format ------------------------------------------------------
// First line "k d kind scale", then k rows of d space-separated decimals
// with 17 significant digits.

inline void write_matrix(std::ostream& os, const ProjectionMatrix& A) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", A.scale);
    os << A.k << ' ' << A.d << ' ' << kind_name(A.kind) << ' ' << buf << "\n";
    for (int i = 0; i < A.k; ++i) {
        for (int j = 0; j < A.d; ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", A.at(i, j));
            if (j) os << ' ';
            os << buf;
        }
        os << "\n";
    }
    if (!os) throw io_error("write_matrix: stream failure");
}

inline ProjectionMatrix read_matrix(std::istream& is) {
    ProjectionMatrix A;
    std::string kind;
    if (!(is >> A.k >> A.d >> kind >> A.scale)) throw io_error("read_matrix: malformed header");
    if (A.k < 1 || A.d < 1) throw io_error("read_matrix: invalid dimensions");
    A.kind = kind_from_name(kind);
    A.entries.resize(static_cast<std::size_t>(A.k) * A.d);
    for (auto& e : A.entries)
        if (!(is >> e)) throw io_error("read_matrix: truncated entry table");
    return A;
}

inline void write_matrix_file(const std::string& path, const ProjectionMatrix& A) {
    std::ofstream os(path);
    if (!os) throw io_error("write_matrix_file: cannot open " + path);
    write_matrix(os, A);
}

inline ProjectionMatrix read_matrix_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("read_matrix_file: cannot open " + path);
    return read_matrix(is);
}

}
