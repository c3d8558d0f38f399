#pragma once

#include <array>
#include <optional>
#include <span>

namespace distmon {

/// Pixel coordinates: x rightward, y downward.
struct ImagePoint {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const ImagePoint&, const ImagePoint&) = default;
};

/// Ground-plane (z = 0) coordinates in meters.
struct WorldPoint {
    double x = 0.0;
    double y = 0.0;
    friend bool operator==(const WorldPoint&, const WorldPoint&) = default;
};

struct Correspondence {
    ImagePoint image;
    WorldPoint world;
};

using Mat3 = std::array<double, 9>;  // row-major

/// Homogeneous |w| at or below this marks a point on (or beyond) the horizon.
inline constexpr double kHomogeneousCutoff = 1e-12;

/// Invertible ground-plane -> image projective map.
///
/// The matrix is held in the world->image direction, rescaled so its
/// largest-magnitude entry is exactly +1. The inverse is computed once at
/// construction.
class Homography {
public:
    /// Identity map.
    Homography();

    /// Throws NonFinite or DegenerateConfiguration (|det| <= 1e-12 after
    /// normalization).
    static Homography from_world_to_image(const Mat3& m);
    static Homography from_image_to_world(const Mat3& m);

    const Mat3& matrix() const noexcept { return forward_; }
    const Mat3& inverse() const noexcept { return inverse_; }

private:
    Homography(const Mat3& forward, const Mat3& inverse) : forward_(forward), inverse_(inverse) {}

    Mat3 forward_;
    Mat3 inverse_;
};

/// Throws PointAtInfinity when the pixel maps to the horizon or beyond.
WorldPoint image_to_world(const Homography& h, ImagePoint p);
ImagePoint world_to_image(const Homography& h, WorldPoint p);

/// Non-throwing variants for the per-frame hot path.
std::optional<WorldPoint> try_image_to_world(const Homography& h, ImagePoint p) noexcept;
std::optional<ImagePoint> try_world_to_image(const Homography& h, WorldPoint p) noexcept;

/// Normalized direct linear transform over >= 4 correspondences.
/// Returns the world->image homography minimizing algebraic error.
Homography estimate_homography(std::span<const Correspondence> pairs);

double determinant(const Mat3& m) noexcept;

}  // namespace distmon
