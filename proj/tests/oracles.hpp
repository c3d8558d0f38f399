#pragma once
// Reference implementations used only by the tests. Each one takes a
// different computational route from the library code it checks.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <vector>

#include "distmon/density.hpp"
#include "distmon/geometry.hpp"

namespace oracle {

using distmon::Mat3;
using distmon::WorldPoint;

/// Pinhole camera looking at the ground plane: K [r1 r2 t], world -> image.
inline Mat3 camera_homography(double focal, double cx, double cy, WorldPoint eye, double height, double tilt,
                              double yaw) {
    const double ct = std::cos(tilt), st = std::sin(tilt), cyw = std::cos(yaw), syw = std::sin(yaw);
    const std::array<double, 3> fwd{-syw * ct, cyw * ct, -st};
    const std::array<double, 3> right{cyw, syw, 0.0};
    const std::array<double, 3> down{fwd[1] * right[2] - fwd[2] * right[1], fwd[2] * right[0] - fwd[0] * right[2],
                                     fwd[0] * right[1] - fwd[1] * right[0]};
    const std::array<std::array<double, 3>, 3> r{right, down, fwd};
    const std::array<double, 3> c{eye.x, eye.y, height};
    std::array<double, 3> t{};
    for (int i = 0; i < 3; ++i) t[i] = -(r[i][0] * c[0] + r[i][1] * c[1] + r[i][2] * c[2]);
    // rows of [r1 r2 t]
    const std::array<std::array<double, 3>, 3> e{{{r[0][0], r[0][1], t[0]}, {r[1][0], r[1][1], t[1]}, {r[2][0], r[2][1], t[2]}}};
    const std::array<std::array<double, 3>, 3> k{{{focal, 0, cx}, {0, focal, cy}, {0, 0, 1}}};
    Mat3 m{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            double s = 0;
            for (int q = 0; q < 3; ++q) s += k[i][q] * e[q][j];
            m[i * 3 + j] = s;
        }
    return m;
}

/// Random camera plus a sampler of ground points well in front of it.
struct RandomCamera {
    Mat3 m;
    WorldPoint eye;
    double yaw;

    template <typename Rng>
    static RandomCamera draw(Rng& rng) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        RandomCamera c;
        c.eye = {-5 + 10 * u(rng), -5 + 10 * u(rng)};
        c.yaw = -M_PI + 2 * M_PI * u(rng);
        const double tilt = (20 + 50 * u(rng)) * M_PI / 180;
        c.m = camera_homography(600 + 600 * u(rng), 640, 360, c.eye, 3 + 12 * u(rng), tilt, c.yaw);
        return c;
    }

    template <typename Rng>
    WorldPoint ground_point(Rng& rng) const {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double ahead = 5 + 35 * u(rng), side = -10 + 20 * u(rng);
        return {eye.x - std::sin(yaw) * ahead + std::cos(yaw) * side,
                eye.y + std::cos(yaw) * ahead + std::sin(yaw) * side};
    }
};

/// Explicit projective application with dehomogenization.
inline std::array<double, 2> project(const Mat3& m, double x, double y) {
    const double w = m[6] * x + m[7] * y + m[8];
    return {(m[0] * x + m[1] * y + m[2]) / w, (m[3] * x + m[4] * y + m[5]) / w};
}

/// Relative Frobenius distance after aligning scale by least squares.
inline double relative_frobenius(const Mat3& estimate, const Mat3& truth) {
    double num = 0, den = 0;
    for (int i = 0; i < 9; ++i) {
        num += estimate[i] * truth[i];
        den += estimate[i] * estimate[i];
    }
    const double scale = num / den;
    double err = 0, norm = 0;
    for (int i = 0; i < 9; ++i) {
        err += (scale * estimate[i] - truth[i]) * (scale * estimate[i] - truth[i]);
        norm += truth[i] * truth[i];
    }
    return std::sqrt(err / norm);
}

/// Full n x n distance matrix by double loop, then the upper triangle.
inline std::vector<double> distances(const std::vector<WorldPoint>& p) {
    const std::size_t n = p.size();
    std::vector<std::vector<double>> full(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = p[i].x - p[j].x, dy = p[i].y - p[j].y;
            full[i][j] = std::sqrt(dx * dx + dy * dy);
        }
    std::vector<double> out;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) out.push_back(full[i][j]);
    return out;
}

struct ProximityTruth {
    std::uint64_t v = 0;
    std::optional<double> d_min, d_avg;
};

/// Literal double sum over i and j != i, plus nearest-neighbor statistics.
inline ProximityTruth proximity(const std::vector<WorldPoint>& p, double d_c) {
    ProximityTruth t;
    const std::size_t n = p.size();
    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            const double dx = p[i].x - p[j].x, dy = p[i].y - p[j].y;
            const double d = std::sqrt(dx * dx + dy * dy);
            if (d < d_c) ++t.v;
            nearest[i] = std::min(nearest[i], d);
        }
    if (n >= 2) {
        double sum = 0;
        for (double d : nearest) sum += d;
        t.d_min = *std::min_element(nearest.begin(), nearest.end());
        t.d_avg = sum / static_cast<double>(n);
    }
    return t;
}

struct TextbookFit {
    double beta0, beta1, s;
};

/// Raw-sum normal equations, residual variance from explicit residuals.
inline TextbookFit ols(const std::vector<distmon::DensitySample>& samples) {
    long double n = samples.size(), sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& s : samples) {
        sx += s.rho;
        sy += s.v;
        sxx += (long double)s.rho * s.rho;
        sxy += (long double)s.rho * s.v;
    }
    const long double b1 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const long double b0 = (sy - b1 * sx) / n;
    long double rss = 0;
    for (const auto& s : samples) {
        const long double r = s.v - (b0 + b1 * s.rho);
        rss += r * r;
    }
    return {double(b0), double(b1), double(std::sqrt(rss / (n - 2)))};
}

/// Lower prediction bound written out from its definition with a given t.
inline double lower_bound(const std::vector<distmon::DensitySample>& samples, double t, double rho) {
    const auto f = ols(samples);
    double mean = 0;
    for (const auto& s : samples) mean += s.rho;
    mean /= samples.size();
    double sxx = 0;
    for (const auto& s : samples) sxx += (s.rho - mean) * (s.rho - mean);
    const double n = samples.size();
    return f.beta0 + f.beta1 * rho - t * f.s * std::sqrt(1 + 1 / n + (rho - mean) * (rho - mean) / sxx);
}

/// First grid point at which `lower` becomes non-negative, scanning from 0.
template <typename F>
std::optional<double> grid_first_crossing(F lower, double step, double limit) {
    for (std::int64_t k = 0;; ++k) {
        const double rho = step * static_cast<double>(k);
        if (rho > limit) return std::nullopt;
        if (lower(rho) >= 0.0) return rho;
    }
}

/// Two-pass moment skewness in long double.
inline double skewness(const std::vector<double>& x) {
    long double mean = 0;
    for (double v : x) mean += v;
    mean /= x.size();
    long double m2 = 0, m3 = 0;
    for (double v : x) {
        const long double d = v - mean;
        m2 += d * d;
        m3 += d * d * d;
    }
    m2 /= x.size();
    m3 /= x.size();
    return double(m3 / std::pow(m2, 1.5L));
}

/// Area by fanning triangles from the first vertex.
inline double fan_area(const std::vector<WorldPoint>& v) {
    double a = 0;
    for (std::size_t i = 1; i + 1 < v.size(); ++i) {
        const double ux = v[i].x - v[0].x, uy = v[i].y - v[0].y;
        const double wx = v[i + 1].x - v[0].x, wy = v[i + 1].y - v[0].y;
        a += 0.5 * (ux * wy - uy * wx);
    }
    return std::abs(a);
}

}  // namespace oracle
