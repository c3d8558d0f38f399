#include "distmon/ingest.hpp"

#include <cmath>
#include <nlohmann/json.hpp>

#include "distmon/error.hpp"
#include "distmon/log.hpp"

namespace distmon {
namespace {

using nlohmann::json;

double finite_number(const json& j, const char* what) {
    if (!j.is_number()) throw MalformedRecord(std::string(what) + " is not a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw MalformedRecord(std::string(what) + " is not finite");
    return v;
}

Detection parse_detection(const json& j) {
    if (!j.is_object()) throw MalformedRecord("detection is not an object");
    Detection d;

    const auto label = j.find("label");
    if (label == j.end() || !label->is_string()) throw MalformedRecord("detection.label missing or not a string");
    d.label = label->get<std::string>();

    const auto score = j.find("score");
    if (score == j.end()) throw MalformedRecord("detection.score missing");
    d.score = finite_number(*score, "detection.score");
    if (d.score < 0.0 || d.score > 1.0) throw MalformedRecord("detection.score outside [0, 1]");

    const auto bbox = j.find("bbox");
    if (bbox == j.end() || !bbox->is_array() || bbox->size() != 4)
        throw MalformedRecord("detection.bbox must be an array of 4 numbers");
    d.bbox = {finite_number((*bbox)[0], "bbox.x1"), finite_number((*bbox)[1], "bbox.y1"),
              finite_number((*bbox)[2], "bbox.x2"), finite_number((*bbox)[3], "bbox.y2")};
    if (d.bbox.x1 > d.bbox.x2 || d.bbox.y1 > d.bbox.y2) throw MalformedRecord("bbox corners out of order");
    return d;
}

}  // namespace

Frame parse_frame(std::string_view line) {
    const json j = json::parse(line.begin(), line.end(), nullptr, /*allow_exceptions=*/false);
    if (j.is_discarded()) throw MalformedRecord("not a valid JSON record");
    if (!j.is_object()) throw MalformedRecord("record is not an object");

    Frame f;
    const auto index = j.find("frame");
    if (index == j.end() || !index->is_number_integer()) throw MalformedRecord("frame missing or not an integer");
    f.index = index->get<std::int64_t>();

    const auto t = j.find("t");
    if (t == j.end()) throw MalformedRecord("t missing");
    f.timestamp = finite_number(*t, "t");
    if (f.timestamp < 0.0) throw MalformedRecord("t is negative");

    const auto dets = j.find("detections");
    if (dets == j.end() || !dets->is_array()) throw MalformedRecord("detections missing or not an array");
    f.detections.reserve(dets->size());
    for (const auto& d : *dets) f.detections.push_back(parse_detection(d));
    return f;
}

std::string serialize_frame(const Frame& frame) {
    using ordered = nlohmann::ordered_json;
    ordered dets = ordered::array();
    for (const auto& d : frame.detections) {
        dets.push_back({{"label", d.label},
                        {"score", d.score},
                        {"bbox", {d.bbox.x1, d.bbox.y1, d.bbox.x2, d.bbox.y2}}});
    }
    ordered j = {{"frame", frame.index}, {"t", frame.timestamp}, {"detections", std::move(dets)}};
    return j.dump();
}

std::vector<Detection> filter_persons(const Frame& frame, double threshold) {
    std::vector<Detection> out;
    for (const auto& d : frame.detections)
        if (d.label == kPersonLabel && d.score >= threshold) out.push_back(d);
    return out;
}

std::optional<Frame> FrameReader::next() {
    // The raw line lives only for the duration of this call.
    std::string line;
    while (std::getline(in_, line)) {
        ++line_;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            return parse_frame(line);
        } catch (const MalformedRecord& e) {
            if (mode_ == ParseMode::strict)
                throw MalformedRecord("line " + std::to_string(line_) + ": " + e.what());
            ++skipped_;
            log::warn("skipping line " + std::to_string(line_) + ": " + e.what());
        }
    }
    return std::nullopt;
}

}  // namespace distmon
