#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "distmon/density.hpp"
#include "distmon/geometry.hpp"
#include "distmon/ingest.hpp"
#include "distmon/scene.hpp"

namespace distmon {

/// Per-frame summary. Distances are absent when fewer than two pedestrians
/// are in the ROI.
struct FrameAssessment {
    std::int64_t index = 0;
    double timestamp = 0.0;
    std::size_t n = 0;
    double rho = 0.0;
    std::uint64_t v = 0;  // ordered pairs closer than d_c
    std::uint64_t pair_violations = 0;
    std::optional<double> d_min;
    std::optional<double> d_avg;
    bool c1 = false;  // proximity cue
    bool c2 = false;  // inflow advisory
};

struct LocalizedPoses {
    std::vector<WorldPoint> poses;
    std::size_t at_infinity = 0;  // foot point on or beyond the horizon
    std::size_t outside_roi = 0;
};

/// Foot point -> ground plane -> ROI filter for each person detection.
LocalizedPoses localize_pedestrians(const Frame& frame, const SceneConfig& scene);

/// d(i, j) for i < j in lexicographic order.
std::vector<double> pairwise_distances(std::span<const WorldPoint> poses);

/// Ordered-pair count: each unordered pair closer than d_c contributes 2.
std::uint64_t count_violations(std::span<const double> distances, double d_c);

struct FrameStats {
    double rho = 0.0;
    std::optional<double> d_min;
    std::optional<double> d_avg;
};

/// `distances` must come from pairwise_distances(poses).
FrameStats frame_stats(std::span<const WorldPoint> poses, std::span<const double> distances,
                       const SceneConfig& scene);

struct ControlSignals {
    bool c1 = false;
    bool c2 = false;
};

ControlSignals control_signals(std::size_t n, const FrameStats& stats, const SceneConfig& scene,
                               std::optional<double> rho_c);

/// Training data for the density regression: (rho, v) pairs and nothing else.
class FitAccumulator {
public:
    void add(double rho, std::uint64_t v) { samples_.push_back({rho, static_cast<double>(v)}); }
    std::span<const DensitySample> samples() const noexcept { return samples_; }
    std::size_t size() const noexcept { return samples_.size(); }

private:
    std::vector<DensitySample> samples_;
};

enum class Mode { monitor, fit };

/// Sequential per-stream engine.
///
/// In monitor mode nothing derived from a frame outlives the call: the only
/// state carried between frames is the ordering guard and a few counters.
class Monitor {
public:
    explicit Monitor(std::shared_ptr<const SceneConfig> scene, std::optional<double> rho_c = std::nullopt);

    /// Throws OutOfOrderFrame when the index does not increase or time goes
    /// backwards. In fit mode appends exactly one sample to `acc`.
    FrameAssessment process_frame(const Frame& frame, Mode mode, FitAccumulator* acc = nullptr);

    FrameAssessment process(const Frame& frame) { return process_frame(frame, Mode::monitor); }
    FrameAssessment fit(const Frame& frame, FitAccumulator& acc) { return process_frame(frame, Mode::fit, &acc); }

    const SceneConfig& scene() const noexcept { return *scene_; }
    std::optional<double> rho_c() const noexcept { return rho_c_; }

    std::uint64_t frames_processed() const noexcept { return frames_; }
    std::uint64_t dropped_at_infinity() const noexcept { return at_infinity_; }
    std::uint64_t dropped_outside_roi() const noexcept { return outside_roi_; }

    /// Fixed-layout snapshot of everything the engine carries between frames.
    std::vector<std::uint8_t> serialize_state() const;

private:
    std::shared_ptr<const SceneConfig> scene_;
    std::optional<double> rho_c_;
    std::optional<std::int64_t> last_index_;
    double last_timestamp_ = 0.0;
    std::uint64_t frames_ = 0;
    std::uint64_t at_infinity_ = 0;
    std::uint64_t outside_roi_ = 0;
};

}  // namespace distmon
