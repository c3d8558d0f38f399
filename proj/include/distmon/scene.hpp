#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "distmon/config.hpp"
#include "distmon/geometry.hpp"

namespace distmon {

/// Simple ground-plane polygon, stored counterclockwise.
class RoiPolygon {
public:
    /// Validates and orients the vertex list. Clockwise input is reversed.
    /// Throws TooFewVertices, SelfIntersecting, NonFinite.
    explicit RoiPolygon(std::vector<WorldPoint> vertices);

    const std::vector<WorldPoint>& vertices() const noexcept { return vertices_; }
    double area() const noexcept { return area_; }

    struct Bounds {
        double min_x, min_y, max_x, max_y;
    };
    Bounds bounds() const noexcept;

private:
    std::vector<WorldPoint> vertices_;
    double area_ = 0.0;
};

/// Signed shoelace area (positive for counterclockwise order).
double signed_area(std::span<const WorldPoint> vertices) noexcept;

/// Validates simplicity, then returns the (positive) shoelace area.
double polygon_area(std::span<const WorldPoint> vertices);
inline double polygon_area(const RoiPolygon& roi) noexcept { return roi.area(); }

/// Even-odd ray casting; points on the boundary count as inside.
bool contains(const RoiPolygon& roi, WorldPoint p) noexcept;

/// True when segment a-b lies in the closed polygon (no proper edge crossing).
bool segment_inside(const RoiPolygon& roi, WorldPoint a, WorldPoint b) noexcept;

struct SceneConfig {
    Homography homography;
    RoiPolygon roi;
    double area_a0;  // m^2, override or shoelace area
    double min_distance_dc = 2.0;
    double violation_budget_u0 = 0.05;
    double score_threshold = 0.5;
    bool area_overridden = false;
};

inline constexpr double kDefaultMinDistance = 2.0;
inline constexpr double kDefaultViolationBudget = 0.05;
inline constexpr double kDefaultScoreThreshold = 0.5;

/// Reads the [homography] section (direction + 9 row-major numbers).
Homography load_homography(const ConfigDocument& doc);
RoiPolygon load_roi(const ConfigDocument& doc);

/// Parses and validates a scene document. Emits a warning through the
/// logger when an A0 override is present. Throws ParseError/ValidationError.
SceneConfig load_scene(std::string_view config_text);
SceneConfig load_scene(const ConfigDocument& doc);

/// Writes a [homography] section in the config format.
std::string format_homography_section(const Homography& h);

}  // namespace distmon
