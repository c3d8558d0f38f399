#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "distmon/geometry.hpp"

namespace distmon {

/// Axis-aligned box as a corner pair, y downward.
struct BoundingBox {
    double x1 = 0.0, y1 = 0.0, x2 = 0.0, y2 = 0.0;
    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Detection {
    std::string label;
    double score = 0.0;
    BoundingBox bbox;
    friend bool operator==(const Detection&, const Detection&) = default;
};

struct Frame {
    std::int64_t index = 0;
    double timestamp = 0.0;  // seconds since stream start
    std::vector<Detection> detections;
    friend bool operator==(const Frame&, const Frame&) = default;
};

inline constexpr std::string_view kPersonLabel = "person";

/// Parses one newline-delimited record:
///   {"frame": 12, "t": 0.48, "detections": [{"label": "person", "score": 0.9, "bbox": [x1, y1, x2, y2]}]}
/// Throws MalformedRecord.
Frame parse_frame(std::string_view line);

/// Single-line record without a trailing newline.
std::string serialize_frame(const Frame& frame);

/// Foot point: midpoint of the bottom edge.
inline ImagePoint pixel_pose(const Detection& d) noexcept {
    return {(d.bbox.x1 + d.bbox.x2) * 0.5, d.bbox.y2};
}

/// Person detections scoring at or above `threshold`, in input order.
std::vector<Detection> filter_persons(const Frame& frame, double threshold);

enum class ParseMode { strict, lenient };

/// Pulls frames from a line stream. Blank lines are ignored. In lenient mode
/// malformed records are skipped and counted; in strict mode they throw.
class FrameReader {
public:
    FrameReader(std::istream& in, ParseMode mode) : in_(in), mode_(mode) {}

    std::optional<Frame> next();

    std::size_t skipped() const noexcept { return skipped_; }
    std::size_t line_number() const noexcept { return line_; }

private:
    std::istream& in_;
    ParseMode mode_;
    std::size_t skipped_ = 0;
    std::size_t line_ = 0;
};

}  // namespace distmon
