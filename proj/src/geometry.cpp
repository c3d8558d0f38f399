#include "distmon/geometry.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "distmon/error.hpp"

namespace distmon {
namespace {

constexpr double kMinDeterminant = 1e-12;

bool all_finite(const Mat3& m) {
    return std::all_of(m.begin(), m.end(), [](double v) { return std::isfinite(v); });
}

Mat3 normalized(const Mat3& m) {
    const auto it = std::max_element(m.begin(), m.end(),
                                      [](double a, double b) { return std::abs(a) < std::abs(b); });
    const double pivot = *it;
    Mat3 out{};
    for (std::size_t i = 0; i < 9; ++i) out[i] = m[i] / pivot;
    return out;
}

Mat3 adjugate_inverse(const Mat3& m, double det) {
    const auto& a = m;
    Mat3 inv{
        a[4] * a[8] - a[5] * a[7], a[2] * a[7] - a[1] * a[8], a[1] * a[5] - a[2] * a[4],
        a[5] * a[6] - a[3] * a[8], a[0] * a[8] - a[2] * a[6], a[2] * a[3] - a[0] * a[5],
        a[3] * a[7] - a[4] * a[6], a[1] * a[6] - a[0] * a[7], a[0] * a[4] - a[1] * a[3],
    };
    for (double& v : inv) v /= det;
    return inv;
}

struct Projected {
    double x, y, w;
};

inline Projected apply(const Mat3& m, double x, double y) noexcept {
    return {m[0] * x + m[1] * y + m[2], m[3] * x + m[4] * y + m[5], m[6] * x + m[7] * y + m[8]};
}

// Similarity that moves the centroid to the origin and scales the RMS radius to sqrt(2).
template <typename GetX, typename GetY>
Eigen::Matrix3d similarity_normalizer(std::span<const Correspondence> pairs, GetX gx, GetY gy) {
    const double n = static_cast<double>(pairs.size());
    double cx = 0.0, cy = 0.0;
    for (const auto& c : pairs) {
        cx += gx(c);
        cy += gy(c);
    }
    cx /= n;
    cy /= n;
    double sq = 0.0;
    for (const auto& c : pairs) {
        const double dx = gx(c) - cx, dy = gy(c) - cy;
        sq += dx * dx + dy * dy;
    }
    const double rms = std::sqrt(sq / n);
    if (!(rms > 0.0)) throw DegenerateConfiguration("all points coincide");
    const double s = std::sqrt(2.0) / rms;
    Eigen::Matrix3d t;
    t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
    return t;
}

}  // namespace

double determinant(const Mat3& a) noexcept {
    return a[0] * (a[4] * a[8] - a[5] * a[7]) - a[1] * (a[3] * a[8] - a[5] * a[6]) +
           a[2] * (a[3] * a[7] - a[4] * a[6]);
}

Homography::Homography() : forward_{1, 0, 0, 0, 1, 0, 0, 0, 1}, inverse_{1, 0, 0, 0, 1, 0, 0, 0, 1} {}

Homography Homography::from_world_to_image(const Mat3& m) {
    if (!all_finite(m)) throw NonFinite("homography has non-finite entries");
    if (std::all_of(m.begin(), m.end(), [](double v) { return v == 0.0; }))
        throw DegenerateConfiguration("homography is the zero matrix");
    const Mat3 fwd = normalized(m);
    const double det = determinant(fwd);
    if (!(std::abs(det) > kMinDeterminant))
        throw DegenerateConfiguration("homography is singular (|det| = " + std::to_string(std::abs(det)) + ")");
    return Homography(fwd, adjugate_inverse(fwd, det));
}

Homography Homography::from_image_to_world(const Mat3& m) {
    if (!all_finite(m)) throw NonFinite("homography has non-finite entries");
    const Mat3 inv = normalized(m);
    const double det = determinant(inv);
    if (!(std::abs(det) > kMinDeterminant))
        throw DegenerateConfiguration("homography is singular");
    return from_world_to_image(adjugate_inverse(inv, det));
}

std::optional<WorldPoint> try_image_to_world(const Homography& h, ImagePoint p) noexcept {
    const auto r = apply(h.inverse(), p.x, p.y);
    if (!(std::abs(r.w) > kHomogeneousCutoff)) return std::nullopt;
    return WorldPoint{r.x / r.w, r.y / r.w};
}

std::optional<ImagePoint> try_world_to_image(const Homography& h, WorldPoint p) noexcept {
    const auto r = apply(h.matrix(), p.x, p.y);
    if (!(std::abs(r.w) > kHomogeneousCutoff)) return std::nullopt;
    return ImagePoint{r.x / r.w, r.y / r.w};
}

WorldPoint image_to_world(const Homography& h, ImagePoint p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw NonFinite("image point");
    if (auto w = try_image_to_world(h, p)) return *w;
    throw PointAtInfinity("pixel (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") maps to the horizon");
}

ImagePoint world_to_image(const Homography& h, WorldPoint p) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw NonFinite("world point");
    if (auto i = try_world_to_image(h, p)) return *i;
    throw PointAtInfinity("world point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                          ") projects to infinity");
}

Homography estimate_homography(std::span<const Correspondence> pairs) {
    if (pairs.size() < 4)
        throw DegenerateConfiguration("need at least 4 correspondences, got " + std::to_string(pairs.size()));
    for (const auto& c : pairs) {
        if (!std::isfinite(c.image.x) || !std::isfinite(c.image.y) || !std::isfinite(c.world.x) ||
            !std::isfinite(c.world.y))
            throw NonFinite("correspondence coordinates");
    }

    const Eigen::Matrix3d tw = similarity_normalizer(
        pairs, [](const Correspondence& c) { return c.world.x; }, [](const Correspondence& c) { return c.world.y; });
    const Eigen::Matrix3d ti = similarity_normalizer(
        pairs, [](const Correspondence& c) { return c.image.x; }, [](const Correspondence& c) { return c.image.y; });

    const auto rows = static_cast<Eigen::Index>(2 * pairs.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(std::max<Eigen::Index>(rows, 9), 9);
    Eigen::Index r = 0;
    for (const auto& c : pairs) {
        const Eigen::Vector3d w = tw * Eigen::Vector3d(c.world.x, c.world.y, 1.0);
        const Eigen::Vector3d i = ti * Eigen::Vector3d(c.image.x, c.image.y, 1.0);
        const double X = w.x(), Y = w.y(), u = i.x(), v = i.y();
        a.row(r++) << X, Y, 1, 0, 0, 0, -u * X, -u * Y, -u;
        a.row(r++) << 0, 0, 0, X, Y, 1, -v * X, -v * Y, -v;
    }

    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    // A unique solution needs a one-dimensional null space: rank 8.
    if (!(sv(7) > 1e-10 * sv(0)))
        throw DegenerateConfiguration("correspondences do not determine a homography (collinear points?)");

    const Eigen::VectorXd h = svd.matrixV().col(8);
    Eigen::Matrix3d hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    const Eigen::Matrix3d hm = ti.inverse() * hn * tw;

    Mat3 out{};
    for (int row = 0; row < 3; ++row)
        for (int col = 0; col < 3; ++col) out[static_cast<std::size_t>(row * 3 + col)] = hm(row, col);
    return Homography::from_world_to_image(out);
}

}  // namespace distmon
