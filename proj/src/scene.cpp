#include "distmon/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>

#include "distmon/error.hpp"
#include "distmon/log.hpp"

namespace distmon {
namespace {

double cross(WorldPoint o, WorldPoint a, WorldPoint b) noexcept {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

bool within_box(WorldPoint a, WorldPoint b, WorldPoint p) noexcept {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

// Closed-segment intersection, including touching and collinear overlap.
bool segments_touch(WorldPoint a, WorldPoint b, WorldPoint c, WorldPoint d) noexcept {
    const int d1 = sign(cross(c, d, a)), d2 = sign(cross(c, d, b));
    const int d3 = sign(cross(a, b, c)), d4 = sign(cross(a, b, d));
    if (d1 * d2 < 0 && d3 * d4 < 0) return true;
    return (d1 == 0 && within_box(c, d, a)) || (d2 == 0 && within_box(c, d, b)) ||
           (d3 == 0 && within_box(a, b, c)) || (d4 == 0 && within_box(a, b, d));
}

// Interiors cross at a single point.
bool segments_cross(WorldPoint a, WorldPoint b, WorldPoint c, WorldPoint d) noexcept {
    const int d1 = sign(cross(c, d, a)), d2 = sign(cross(c, d, b));
    const int d3 = sign(cross(a, b, c)), d4 = sign(cross(a, b, d));
    return d1 * d2 < 0 && d3 * d4 < 0;
}

bool on_segment(WorldPoint a, WorldPoint b, WorldPoint p) noexcept {
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const double scale = std::max({1.0, std::abs(a.x), std::abs(a.y), std::abs(b.x), std::abs(b.y)});
    return std::abs(cross(a, b, p)) <= 1e-12 * scale * std::max(len, 1.0) && within_box(a, b, p);
}

void check_simple(std::span<const WorldPoint> v) {
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (v[i] == v[(i + 1) % n]) throw SelfIntersecting("repeated consecutive vertex " + std::to_string(i));
    }
    for (std::size_t i = 0; i < n; ++i) {
        const WorldPoint a = v[i], b = v[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const WorldPoint c = v[j], d = v[(j + 1) % n];
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (!adjacent) {
                if (segments_touch(a, b, c, d))
                    throw SelfIntersecting("edges " + std::to_string(i) + " and " + std::to_string(j) + " meet");
                continue;
            }
            // Adjacent edges share one vertex; they must not fold back over each other.
            const WorldPoint shared = (j == i + 1) ? b : a;
            const WorldPoint p = (j == i + 1) ? a : b;
            const WorldPoint q = (j == i + 1) ? d : c;
            if (cross(shared, p, q) == 0.0) {
                const double dot = (p.x - shared.x) * (q.x - shared.x) + (p.y - shared.y) * (q.y - shared.y);
                if (dot > 0.0)
                    throw SelfIntersecting("edges " + std::to_string(i) + " and " + std::to_string(j) + " overlap");
            }
        }
    }
}

void check_finite(std::span<const WorldPoint> v) {
    for (const auto& p : v)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw NonFinite("polygon vertex");
}

}  // namespace

double signed_area(std::span<const WorldPoint> v) noexcept {
    const std::size_t n = v.size();
    double twice = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const WorldPoint a = v[i], b = v[(i + 1) % n];
        twice += a.x * b.y - b.x * a.y;
    }
    return 0.5 * twice;
}

double polygon_area(std::span<const WorldPoint> vertices) {
    if (vertices.size() < 3) throw TooFewVertices("polygon needs at least 3 vertices");
    check_finite(vertices);
    check_simple(vertices);
    const double a = std::abs(signed_area(vertices));
    if (!(a > 0.0)) throw SelfIntersecting("polygon has zero area");
    return a;
}

RoiPolygon::RoiPolygon(std::vector<WorldPoint> vertices) : vertices_(std::move(vertices)) {
    area_ = polygon_area(vertices_);
    if (signed_area(vertices_) < 0.0) std::reverse(vertices_.begin(), vertices_.end());
}

RoiPolygon::Bounds RoiPolygon::bounds() const noexcept {
    Bounds b{vertices_[0].x, vertices_[0].y, vertices_[0].x, vertices_[0].y};
    for (const auto& p : vertices_) {
        b.min_x = std::min(b.min_x, p.x);
        b.min_y = std::min(b.min_y, p.y);
        b.max_x = std::max(b.max_x, p.x);
        b.max_y = std::max(b.max_y, p.y);
    }
    return b;
}

bool contains(const RoiPolygon& roi, WorldPoint p) noexcept {
    const auto& v = roi.vertices();
    const std::size_t n = v.size();
    bool inside = false;
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const WorldPoint a = v[i], b = v[j];
        if (on_segment(a, b, p)) return true;
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x_cross = (b.x - a.x) * (p.y - a.y) / (b.y - a.y) + a.x;
            if (p.x < x_cross) inside = !inside;
        }
    }
    return inside;
}

bool segment_inside(const RoiPolygon& roi, WorldPoint a, WorldPoint b) noexcept {
    if (!contains(roi, a) || !contains(roi, b)) return false;
    const auto& v = roi.vertices();
    const std::size_t n = v.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (segments_cross(a, b, v[i], v[(i + 1) % n])) return false;
        // A reflex vertex lying strictly inside the segment lets it graze outside.
        if (on_segment(a, b, v[i]) && !(v[i] == a) && !(v[i] == b)) {
            const WorldPoint mid1{(a.x + v[i].x) / 2, (a.y + v[i].y) / 2};
            const WorldPoint mid2{(b.x + v[i].x) / 2, (b.y + v[i].y) / 2};
            if (!contains(roi, mid1) || !contains(roi, mid2)) return false;
        }
    }
    return contains(roi, WorldPoint{(a.x + b.x) / 2, (a.y + b.y) / 2});
}

Homography load_homography(const ConfigDocument& doc) {
    if (!doc.has_section("homography")) throw ParseError(0, "homography", "missing [homography] section");
    const auto* m = doc.find("homography", "m");
    if (m == nullptr) throw ParseError(0, "homography.m", "missing matrix 'm' (9 numbers, row-major)");
    const auto values = parse_numbers(*m);
    if (values.size() != 9)
        throw ParseError(m->line, "homography.m", "expected 9 numbers, got " + std::to_string(values.size()));
    Mat3 mat{};
    std::copy(values.begin(), values.end(), mat.begin());

    std::string direction = "world_to_image";
    if (const auto* d = doc.find("homography", "direction")) direction = d->value;
    try {
        if (direction == "world_to_image") return Homography::from_world_to_image(mat);
        if (direction == "image_to_world") return Homography::from_image_to_world(mat);
    } catch (const Error& e) {
        throw ValidationError(std::string("homography: ") + e.what());
    }
    const auto* d = doc.find("homography", "direction");
    throw ParseError(d->line, "homography.direction", "expected world_to_image or image_to_world, got '" + direction + "'");
}

RoiPolygon load_roi(const ConfigDocument& doc) {
    if (!doc.has_section("roi")) throw ParseError(0, "roi", "missing [roi] section");
    std::vector<WorldPoint> vertices;
    for (const auto* e : doc.find_all("roi", "vertex")) {
        const auto xy = parse_numbers(*e);
        if (xy.size() != 2) throw ParseError(e->line, "roi.vertex", "expected 2 numbers");
        vertices.push_back({xy[0], xy[1]});
    }
    try {
        return RoiPolygon(std::move(vertices));
    } catch (const Error& e) {
        throw ValidationError(std::string("roi: ") + e.what());
    }
}

SceneConfig load_scene(const ConfigDocument& doc) {
    SceneConfig scene{load_homography(doc), load_roi(doc), 0.0};
    scene.area_a0 = scene.roi.area();
    scene.min_distance_dc = doc.number_or("scene", "d_c", kDefaultMinDistance);
    scene.violation_budget_u0 = doc.number_or("scene", "u0", kDefaultViolationBudget);
    scene.score_threshold = doc.number_or("scene", "score_threshold", kDefaultScoreThreshold);

    if (!(scene.min_distance_dc > 0.0)) throw ValidationError("d_c must be > 0");
    if (!(scene.violation_budget_u0 > 0.0 && scene.violation_budget_u0 < 1.0))
        throw ValidationError("u0 must lie in (0, 1)");
    if (!(scene.score_threshold >= 0.0 && scene.score_threshold <= 1.0))
        throw ValidationError("score_threshold must lie in [0, 1]");

    if (const auto a0 = doc.number("scene", "a0")) {
        if (!(*a0 > 0.0)) throw ValidationError("a0 must be > 0");
        log::warn("a0 override " + std::to_string(*a0) + " m^2 replaces ROI polygon area " +
                  std::to_string(scene.roi.area()) + " m^2");
        scene.area_a0 = *a0;
        scene.area_overridden = true;
    }
    return scene;
}

SceneConfig load_scene(std::string_view config_text) { return load_scene(ConfigDocument::parse(config_text)); }

std::string format_homography_section(const Homography& h) {
    std::string out = "[homography]\ndirection = world_to_image\nm =";
    char buf[64];
    for (double v : h.matrix()) {
        const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
        out += ' ';
        out.append(buf, ptr);
    }
    out += '\n';
    return out;
}

}  // namespace distmon
