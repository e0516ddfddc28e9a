#pragma once

#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <ostream>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "jl/errors.hpp"
#include "jl/rng.hpp"
#include "jl/special_functions.hpp"

namespace jl::sphere {

// Point on S^{d-1}. d = 1 is allowed: S^0 = {-1, +1}.
struct UnitVector {
    int dim = 0;
    std::vector<double> coords;

    UnitVector() = default;
    UnitVector(int d, std::vector<double> c) : dim(d), coords(std::move(c)) {
        if (dim < 1) throw std::domain_error("UnitVector: dim must be >= 1");
        if (static_cast<int>(coords.size()) != dim)
            throw std::domain_error("UnitVector: coordinate count does not match dim");
        double norm2 = 0.0;
        for (double x : coords) norm2 += x * x;
        if (std::fabs(std::sqrt(norm2) - 1.0) > 1e-12)
            throw std::domain_error("UnitVector: norm deviates from 1 by more than 1e-12");
    }
};

// The (k, d) pair of a sphere split; s0 = k/d is always recomputed.
struct SplitParams {
    int k = 0;
    int d = 0;

    SplitParams() = default;  // empty placeholder; the validating ctor is the normal path
    SplitParams(int k_, int d_) : k(k_), d(d_) {
        if (k < 1 || k >= d) throw std::domain_error("SplitParams: need 1 <= k < d");
    }
    double s0() const { return static_cast<double>(k) / static_cast<double>(d); }
};

// Image of the split map: x on S^{d-1} maps to (s, u, v) with
// s = x_1^2 + ... + x_k^2, u on S^{k-1}, v on S^{d-k-1}.
struct SphereSplit {
    double s = 0.0;
    UnitVector u;
    UnitVector v;
};

inline UnitVector sample_uniform_sphere(int d, rng::Stream& stream) {
    if (d < 1) throw std::domain_error("sample_uniform_sphere: d must be >= 1");
    std::vector<double> coords(static_cast<std::size_t>(d));
    for (;;) {
        double norm2 = 0.0;
        for (auto& x : coords) {
            x = stream.normal();
            norm2 += x * x;
        }
        if (norm2 > 0.0) {
            const double inv = 1.0 / std::sqrt(norm2);
            for (auto& x : coords) x *= inv;
            return UnitVector(d, std::move(coords));
        }
    }
}

inline SphereSplit split(const UnitVector& x, const SplitParams& params) {
    if (x.dim != params.d) throw std::domain_error("split: vector dim does not match params.d");
    const int k = params.k;
    const int m = params.d - k;
    double s = 0.0;
    for (int i = 0; i < k; ++i) s += x.coords[i] * x.coords[i];
    if (s > 1.0) s = 1.0;

    std::vector<double> u(static_cast<std::size_t>(k), 0.0);
    std::vector<double> v(static_cast<std::size_t>(m), 0.0);
    if (s == 0.0) {
        u[0] = 1.0;  // endpoint convention: u = e1
        for (int i = 0; i < m; ++i) v[i] = x.coords[k + i];
    } else if (s == 1.0) {
        const double inv = 1.0 / std::sqrt(s);
        for (int i = 0; i < k; ++i) u[i] = x.coords[i] * inv;
        v[0] = 1.0;  // endpoint convention: v = e1
    } else {
        const double iu = 1.0 / std::sqrt(s);
        const double iv = 1.0 / std::sqrt(1.0 - s);
        for (int i = 0; i < k; ++i) u[i] = x.coords[i] * iu;
        for (int i = 0; i < m; ++i) v[i] = x.coords[k + i] * iv;
    }
    return SphereSplit{s, UnitVector(k, std::move(u)), UnitVector(m, std::move(v))};
}

inline UnitVector unsplit(const SphereSplit& sp) {
    if (sp.s < 0.0 || sp.s > 1.0) throw std::domain_error("unsplit: s outside [0,1]");
    const double root_s = std::sqrt(sp.s);
    const double root_c = std::sqrt(1.0 - sp.s);
    std::vector<double> coords;
    coords.reserve(sp.u.coords.size() + sp.v.coords.size());
    for (double x : sp.u.coords) coords.push_back(root_s * x);
    for (double x : sp.v.coords) coords.push_back(root_c * x);
    return UnitVector(sp.u.dim + sp.v.dim, std::move(coords));
}

// log of the surface area of S^{d-1}: log(2 pi^{d/2} / Gamma(d/2)).
inline double log_sphere_area(int d) {
    if (d < 1) throw std::domain_error("log_sphere_area: d must be >= 1");
    const double half_d = 0.5 * static_cast<double>(d);
    return std::numbers::ln2 + half_d * std::log(std::numbers::pi) - sf::log_gamma(half_d);
}

// log f(s) with f(s) = s^{(k-2)/2} (1-s)^{(d-k-2)/2}; endpoints follow the
// 0^0 = 1 convention, so a zero exponent contributes nothing.
inline double log_density_f(double s, const SplitParams& params) {
    if (s < 0.0 || s > 1.0) throw std::domain_error("log_density_f: s outside [0,1]");
    const double ea = 0.5 * (params.k - 2);
    const double eb = 0.5 * (params.d - params.k - 2);
    double out = 0.0;
    if (ea != 0.0) {
        if (s == 0.0)
            out += ea > 0.0 ? -std::numeric_limits<double>::infinity()
                            : std::numeric_limits<double>::infinity();
        else
            out += ea * std::log(s);
    }
    if (eb != 0.0) {
        if (s == 1.0)
            out += eb > 0.0 ? -std::numeric_limits<double>::infinity()
                            : std::numeric_limits<double>::infinity();
        else
            out += eb * std::log1p(-s);
    }
    return out;
}

// log B with B = Gamma(d/2) / (Gamma(k/2) Gamma((d-k)/2)), any parity.
inline double log_B(const SplitParams& params) {
    return sf::log_gamma(0.5 * params.d) - sf::log_gamma(0.5 * params.k) -
           sf::log_gamma(0.5 * (params.d - params.k));
}

// --- sample dump format -----------------------------------------------------
// Header line "# sphere d=<d> seed=<seed>", then one vector per line,
// space-separated, 17 significant digits.

inline void write_sample_dump(std::ostream& os, std::span<const UnitVector> samples, int d,
                              std::uint64_t seed) {
    os << "# sphere d=" << d << " seed=" << seed << "\n";
    char buf[32];
    for (const auto& x : samples) {
        if (x.dim != d) throw std::domain_error("write_sample_dump: dimension mismatch");
        for (int i = 0; i < d; ++i) {
            std::snprintf(buf, sizeof buf, "%.17g", x.coords[i]);
            if (i) os << ' ';
            os << buf;
        }
        os << "\n";
    }
    if (!os) throw io_error("write_sample_dump: stream failure");
}

struct SampleDump {
    int d = 0;
    std::uint64_t seed = 0;
    std::vector<UnitVector> samples;
};

inline SampleDump read_sample_dump(std::istream& is) {
    SampleDump dump;
    std::string header;
    if (!std::getline(is, header)) throw io_error("read_sample_dump: missing header");
    unsigned long long seed = 0;
    if (std::sscanf(header.c_str(), "# sphere d=%d seed=%llu", &dump.d, &seed) != 2)
        throw io_error("read_sample_dump: malformed header: " + header);
    dump.seed = seed;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::istringstream ls(line);
        std::vector<double> coords;
        coords.reserve(static_cast<std::size_t>(dump.d));
        double x;
        while (ls >> x) coords.push_back(x);
        if (static_cast<int>(coords.size()) != dump.d)
            throw io_error("read_sample_dump: row length does not match d");
        dump.samples.emplace_back(dump.d, std::move(coords));
    }
    return dump;
}

}
