#include "distmon/simulate.hpp"

#include <cmath>
#include <numbers>
#include <nlohmann/json.hpp>

#include "distmon/error.hpp"

namespace distmon {
namespace {

// Waypoints whose straight path leaves a non-convex ROI are redrawn.
constexpr int kMaxWaypointDraws = 1000;

WorldPoint sample_inside(const RoiPolygon& roi, SimRng& rng) {
    const auto b = roi.bounds();
    for (;;) {
        const WorldPoint p{rng.uniform(b.min_x, b.max_x), rng.uniform(b.min_y, b.max_y)};
        if (contains(roi, p)) return p;
    }
}

WorldPoint sample_waypoint(const RoiPolygon& roi, SimRng& rng, WorldPoint from) {
    for (int i = 0; i < kMaxWaypointDraws; ++i) {
        const WorldPoint p = sample_inside(roi, rng);
        if (segment_inside(roi, from, p)) return p;
    }
    return from;
}

double sample_speed(const SimConfig& cfg, SimRng& rng) { return rng.uniform(cfg.speed_min, cfg.speed_max); }

}  // namespace

double SimRng::normal() noexcept {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::size_t SimConfig::frame_count() const noexcept {
    return static_cast<std::size_t>(std::floor(duration * frame_rate + 1e-9));
}

SimConfig load_sim_config(const ConfigDocument& doc) {
    SimConfig cfg{.roi = load_roi(doc), .homography = load_homography(doc)};
    const auto count = doc.number_or("sim", "agent_count", 0.0);
    if (count < 0.0 || count != std::floor(count)) throw ValidationError("agent_count must be a non-negative integer");
    cfg.agent_count = static_cast<std::size_t>(count);
    if (const auto* seed = doc.find("sim", "seed")) {
        const double s = parse_number(*seed);
        if (s < 0.0 || s != std::floor(s)) throw ValidationError("seed must be a non-negative integer");
        cfg.seed = static_cast<std::uint64_t>(s);
    }
    cfg.speed_min = doc.number_or("sim", "speed_min", cfg.speed_min);
    cfg.speed_max = doc.number_or("sim", "speed_max", cfg.speed_max);
    cfg.frame_rate = doc.number_or("sim", "frame_rate", cfg.frame_rate);
    cfg.duration = doc.number_or("sim", "duration", cfg.duration);
    cfg.bbox_width_px = doc.number_or("sim", "bbox_width_px", cfg.bbox_width_px);
    cfg.bbox_height_px = doc.number_or("sim", "bbox_height_px", cfg.bbox_height_px);
    cfg.pixel_noise_sigma = doc.number_or("sim", "pixel_noise_sigma", cfg.pixel_noise_sigma);

    if (!(cfg.frame_rate > 0.0)) throw ValidationError("frame_rate must be > 0");
    if (!(cfg.duration >= 0.0)) throw ValidationError("duration must be >= 0");
    if (!(cfg.speed_min >= 0.0 && cfg.speed_max >= cfg.speed_min)) throw ValidationError("need 0 <= speed_min <= speed_max");
    if (!(cfg.pixel_noise_sigma >= 0.0)) throw ValidationError("pixel_noise_sigma must be >= 0");
    if (!(cfg.bbox_width_px >= 0.0 && cfg.bbox_height_px >= 0.0)) throw ValidationError("bbox size must be >= 0");
    return cfg;
}

SimState initial_state(const SimConfig& cfg) {
    SimState state{{}, SimRng(cfg.seed)};
    state.agents.reserve(cfg.agent_count);
    for (std::size_t i = 0; i < cfg.agent_count; ++i) {
        Agent a;
        a.position = sample_inside(cfg.roi, state.rng);
        a.waypoint = sample_waypoint(cfg.roi, state.rng, a.position);
        a.speed = sample_speed(cfg, state.rng);
        state.agents.push_back(a);
    }
    return state;
}

SimState step(SimState state, const SimConfig& cfg, double dt) {
    for (auto& a : state.agents) {
        const double dx = a.waypoint.x - a.position.x, dy = a.waypoint.y - a.position.y;
        const double remaining = std::sqrt(dx * dx + dy * dy);
        const double travel = a.speed * dt;
        if (remaining <= travel) {
            a.position = a.waypoint;
            a.waypoint = sample_waypoint(cfg.roi, state.rng, a.position);
            a.speed = sample_speed(cfg, state.rng);
        } else if (travel > 0.0) {
            const double f = travel / remaining;
            a.position = {a.position.x + f * dx, a.position.y + f * dy};
        }
    }
    return state;
}

SimFrameTruth render_detections(SimState& state, const SimConfig& cfg, std::int64_t index) {
    SimFrameTruth out;
    out.index = index;
    out.frame.index = index;
    out.frame.timestamp = static_cast<double>(index) / cfg.frame_rate;
    out.truth.reserve(state.agents.size());
    out.frame.detections.reserve(state.agents.size());

    const double half_w = 0.5 * cfg.bbox_width_px;
    for (const auto& a : state.agents) {
        auto foot = try_world_to_image(cfg.homography, a.position);
        if (!foot) throw ProjectionSingular("agent projects to infinity");
        if (cfg.pixel_noise_sigma > 0.0) {
            foot->x += cfg.pixel_noise_sigma * state.rng.normal();
            foot->y += cfg.pixel_noise_sigma * state.rng.normal();
        }
        out.truth.push_back(a.position);
        out.frame.detections.push_back(
            {std::string(kPersonLabel), 1.0, {foot->x - half_w, foot->y - cfg.bbox_height_px, foot->x + half_w, foot->y}});
    }
    return out;
}

Simulator::Simulator(SimConfig cfg) : cfg_(std::move(cfg)), state_(initial_state(cfg_)) {}

std::optional<SimFrameTruth> Simulator::next() {
    if (static_cast<std::size_t>(index_) >= cfg_.frame_count()) return std::nullopt;
    if (index_ > 0) state_ = step(std::move(state_), cfg_, 1.0 / cfg_.frame_rate);
    return render_detections(state_, cfg_, index_++);
}

std::string serialize_truth(const SimFrameTruth& truth) {
    nlohmann::ordered_json positions = nlohmann::ordered_json::array();
    for (const auto& p : truth.truth) positions.push_back({p.x, p.y});
    return nlohmann::ordered_json{{"frame", truth.index}, {"positions", std::move(positions)}}.dump();
}

}  // namespace distmon
