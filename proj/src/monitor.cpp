#include "distmon/monitor.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>

#include "distmon/error.hpp"

namespace distmon {

LocalizedPoses localize_pedestrians(const Frame& frame, const SceneConfig& scene) {
    LocalizedPoses out;
    out.poses.reserve(frame.detections.size());
    for (const auto& d : frame.detections) {
        if (d.label != kPersonLabel || d.score < scene.score_threshold) continue;
        const auto world = try_image_to_world(scene.homography, pixel_pose(d));
        if (!world) {
            ++out.at_infinity;
            continue;
        }
        if (!contains(scene.roi, *world)) {
            ++out.outside_roi;
            continue;
        }
        out.poses.push_back(*world);
    }
    return out;
}

std::vector<double> pairwise_distances(std::span<const WorldPoint> poses) {
    const std::size_t n = poses.size();
    std::vector<double> d;
    d.reserve(n < 2 ? 0 : n * (n - 1) / 2);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            const double dx = poses[i].x - poses[j].x, dy = poses[i].y - poses[j].y;
            d.push_back(std::sqrt(dx * dx + dy * dy));
        }
    return d;
}

std::uint64_t count_violations(std::span<const double> distances, double d_c) {
    const auto pairs = static_cast<std::uint64_t>(
        std::count_if(distances.begin(), distances.end(), [d_c](double d) { return d < d_c; }));
    return 2 * pairs;
}

FrameStats frame_stats(std::span<const WorldPoint> poses, std::span<const double> distances,
                       const SceneConfig& scene) {
    const std::size_t n = poses.size();
    FrameStats s;
    s.rho = static_cast<double>(n) / scene.area_a0;
    if (n < 2) return s;

    std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j, ++k) {
            nearest[i] = std::min(nearest[i], distances[k]);
            nearest[j] = std::min(nearest[j], distances[k]);
        }
    }
    double sum = 0.0;
    double lowest = nearest[0];
    for (double d : nearest) {
        sum += d;
        lowest = std::min(lowest, d);
    }
    s.d_min = lowest;
    s.d_avg = sum / static_cast<double>(n);
    return s;
}

ControlSignals control_signals(std::size_t n, const FrameStats& stats, const SceneConfig& scene,
                               std::optional<double> rho_c) {
    ControlSignals c;
    c.c1 = n >= 2 && stats.d_min.has_value() && *stats.d_min < scene.min_distance_dc;
    c.c2 = rho_c.has_value() && stats.rho > *rho_c;
    return c;
}

Monitor::Monitor(std::shared_ptr<const SceneConfig> scene, std::optional<double> rho_c)
    : scene_(std::move(scene)), rho_c_(rho_c) {
    if (!scene_) throw ValidationError("monitor needs a scene");
    if (rho_c_ && !(std::isfinite(*rho_c_) && *rho_c_ >= 0.0)) throw ValidationError("rho_c must be finite and >= 0");
}

FrameAssessment Monitor::process_frame(const Frame& frame, Mode mode, FitAccumulator* acc) {
    if (last_index_ && frame.index <= *last_index_)
        throw OutOfOrderFrame("frame " + std::to_string(frame.index) + " after " + std::to_string(*last_index_));
    if (last_index_ && frame.timestamp < last_timestamp_)
        throw OutOfOrderFrame("timestamp " + std::to_string(frame.timestamp) + " goes backwards");
    if (mode == Mode::fit && acc == nullptr) throw ValidationError("fit mode needs an accumulator");

    const SceneConfig& scene = *scene_;
    const LocalizedPoses located = localize_pedestrians(frame, scene);
    const std::vector<double> distances = pairwise_distances(located.poses);
    const FrameStats stats = frame_stats(located.poses, distances, scene);

    FrameAssessment a;
    a.index = frame.index;
    a.timestamp = frame.timestamp;
    a.n = located.poses.size();
    a.rho = stats.rho;
    a.v = count_violations(distances, scene.min_distance_dc);
    a.pair_violations = a.v / 2;
    a.d_min = stats.d_min;
    a.d_avg = stats.d_avg;
    const ControlSignals c = control_signals(a.n, stats, scene, rho_c_);
    a.c1 = c.c1;
    a.c2 = c.c2;

    last_index_ = frame.index;
    last_timestamp_ = frame.timestamp;
    ++frames_;
    at_infinity_ += located.at_infinity;
    outside_roi_ += located.outside_roi;

    if (mode == Mode::fit) acc->add(a.rho, a.v);
    return a;
}

namespace {

template <typename T>
void put(std::vector<std::uint8_t>& out, const T& value) {
    std::uint8_t bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    out.insert(out.end(), bytes, bytes + sizeof(T));
}

}  // namespace

std::vector<std::uint8_t> Monitor::serialize_state() const {
    std::vector<std::uint8_t> out;
    put(out, std::uint32_t{0x444d4f4e});  // "DMON"
    put(out, std::uint8_t{last_index_.has_value()});
    put(out, last_index_.value_or(0));
    put(out, last_timestamp_);
    put(out, std::uint8_t{rho_c_.has_value()});
    put(out, rho_c_.value_or(0.0));
    put(out, frames_);
    put(out, at_infinity_);
    put(out, outside_roi_);
    return out;
}

}  // namespace distmon
