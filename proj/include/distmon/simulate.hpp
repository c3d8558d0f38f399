#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "distmon/config.hpp"
#include "distmon/geometry.hpp"
#include "distmon/ingest.hpp"
#include "distmon/scene.hpp"

namespace distmon {

/// Platform-independent random source: std::mt19937_64 (whose output
/// sequence is fixed by the standard) with hand-rolled conversions, since the
/// standard distributions are implementation-defined.
class SimRng {
public:
    explicit SimRng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in [0, 1) from the top 53 bits of one draw.
    double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }
    /// Standard normal via Box-Muller; consumes two draws per call.
    double normal() noexcept;

    friend bool operator==(const SimRng& a, const SimRng& b) { return a.engine_ == b.engine_; }

private:
    std::mt19937_64 engine_;
};

struct SimConfig {
    std::uint64_t seed = 0;
    std::size_t agent_count = 0;
    RoiPolygon roi;
    double speed_min = 0.5;  // m/s
    double speed_max = 1.5;
    double frame_rate = 25.0;  // Hz
    double duration = 10.0;    // s
    double bbox_width_px = 20.0;
    double bbox_height_px = 60.0;
    double pixel_noise_sigma = 0.0;  // px, per axis
    Homography homography;           // world -> image

    std::size_t frame_count() const noexcept;
};

/// Reads [homography], [roi] and [sim] sections. Throws ParseError/ValidationError.
SimConfig load_sim_config(const ConfigDocument& doc);

struct Agent {
    WorldPoint position;
    WorldPoint waypoint;
    double speed = 0.0;
    friend bool operator==(const Agent&, const Agent&) = default;
};

struct SimState {
    std::vector<Agent> agents;
    SimRng rng;
    friend bool operator==(const SimState&, const SimState&) = default;
};

/// Agents placed uniformly in the ROI, each with a first waypoint and speed.
SimState initial_state(const SimConfig& cfg);

/// Random-waypoint motion: walk straight toward the waypoint at constant
/// speed; on arrival pick a new waypoint and speed.
SimState step(SimState state, const SimConfig& cfg, double dt);

struct SimFrameTruth {
    std::int64_t index = 0;
    std::vector<WorldPoint> truth;
    Frame frame;
};

/// Projects each agent's foot point and builds a box whose bottom-center is
/// that pixel plus optional Gaussian noise. Throws ProjectionSingular.
SimFrameTruth render_detections(SimState& state, const SimConfig& cfg, std::int64_t index);

/// Frame-by-frame driver over a whole configured run.
class Simulator {
public:
    explicit Simulator(SimConfig cfg);

    /// nullopt once `frame_count()` frames have been produced.
    std::optional<SimFrameTruth> next();

    const SimConfig& config() const noexcept { return cfg_; }

private:
    SimConfig cfg_;
    SimState state_;
    std::int64_t index_ = 0;
};

std::string serialize_truth(const SimFrameTruth& truth);

}  // namespace distmon
