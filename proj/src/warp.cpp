#include "dawkit/warp.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dawkit {

namespace {

using nlohmann::json;

// Index of the segment whose [markers[i].beats, markers[i+1].beats) range
// holds b; clamps to the first/last segment outside the span (adjacent-slope
// extrapolation). Only valid for >= 2 markers.
size_t segment_index(const std::vector<WarpMarker>& markers, double beats) {
    size_t lo = 0;
    size_t hi = markers.size() - 2;
    if (beats < markers[1].beats)
        return 0;
    if (beats >= markers[hi].beats)
        return hi;
    while (lo + 1 < hi) {
        const size_t mid = (lo + hi) / 2;
        if (markers[mid].beats <= beats)
            lo = mid;
        else
            hi = mid;
    }
    return markers[lo + 1].beats <= beats ? hi : lo;
}

size_t segment_index_seconds(const std::vector<WarpMarker>& markers, double seconds) {
    size_t lo = 0;
    size_t hi = markers.size() - 2;
    if (seconds < markers[1].seconds)
        return 0;
    if (seconds >= markers[hi].seconds)
        return hi;
    while (lo + 1 < hi) {
        const size_t mid = (lo + hi) / 2;
        if (markers[mid].seconds <= seconds)
            lo = mid;
        else
            hi = mid;
    }
    return markers[lo + 1].seconds <= seconds ? hi : lo;
}

} // namespace

void ClipInfo::validate() const {
    if (markers.empty())
        throw Error(ErrorCode::ValidationError, "clip needs at least one warp marker");
    for (size_t i = 1; i < markers.size(); ++i) {
        if (!(markers[i].seconds > markers[i - 1].seconds) ||
            !(markers[i].beats > markers[i - 1].beats))
            throw Error(ErrorCode::ValidationError,
                        "marker " + std::to_string(i) + " is not strictly increasing");
    }
    if (!(source_bpm > 0.0))
        throw Error(ErrorCode::ValidationError, "source_bpm must be > 0");
    if (start_marker > end_marker)
        throw Error(ErrorCode::ValidationError, "start_marker is after end_marker");
    if (loop_on && !(loop_start < loop_end))
        throw Error(ErrorCode::ValidationError, "loop region is empty");
}

double beats_to_seconds(const ClipInfo& clip, double beats) {
    const auto& m = clip.markers;
    if (m.size() == 1)
        return m[0].seconds + (beats - m[0].beats) * (60.0 / clip.source_bpm);
    // exact at markers
    for (const auto& marker : m)
        if (marker.beats == beats)
            return marker.seconds;
    const size_t i = segment_index(m, beats);
    const double slope = (m[i + 1].seconds - m[i].seconds) / (m[i + 1].beats - m[i].beats);
    return m[i].seconds + (beats - m[i].beats) * slope;
}

double seconds_to_beats(const ClipInfo& clip, double seconds) {
    const auto& m = clip.markers;
    if (m.size() == 1)
        return m[0].beats + (seconds - m[0].seconds) * (clip.source_bpm / 60.0);
    for (const auto& marker : m)
        if (marker.seconds == seconds)
            return marker.beats;
    const size_t i = segment_index_seconds(m, seconds);
    const double slope = (m[i + 1].beats - m[i].beats) / (m[i + 1].seconds - m[i].seconds);
    return m[i].beats + (seconds - m[i].seconds) * slope;
}

double segment_tempo(const ClipInfo& clip, double beats) {
    const auto& m = clip.markers;
    if (m.size() == 1)
        return clip.source_bpm;
    const size_t i = segment_index(m, beats);
    const double slope = (m[i + 1].seconds - m[i].seconds) / (m[i + 1].beats - m[i].beats);
    return 60.0 / slope;
}

ClipInfo parse_warp_sidecar(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, std::string("warp sidecar: ") + e.what());
    }
    if (!j.is_object())
        throw Error(ErrorCode::ParseError, "warp sidecar: top level must be an object");

    ClipInfo clip;
    if (j.contains("markers")) {
        const auto& arr = j.at("markers");
        if (!arr.is_array() || arr.empty())
            throw Error(ErrorCode::ParseError, "warp sidecar: markers must be a non-empty array");
        clip.markers.clear();
        for (size_t i = 0; i < arr.size(); ++i) {
            const auto& mj = arr[i];
            if (!mj.is_object() || !mj.contains("seconds") || !mj.contains("beats"))
                throw Error(ErrorCode::ParseError,
                            "warp sidecar: marker " + std::to_string(i) +
                                " needs \"seconds\" and \"beats\"");
            clip.markers.push_back(
                {mj.at("seconds").get<double>(), mj.at("beats").get<double>()});
        }
    }

    const double span_start = clip.markers.front().beats;
    const double span_end = clip.markers.size() > 1
                                ? clip.markers.back().beats
                                : std::numeric_limits<double>::infinity();
    clip.start_marker = j.value("start_marker", span_start);
    clip.end_marker = j.value("end_marker", span_end);
    clip.loop_start = j.value("loop_start", clip.start_marker);
    clip.loop_end = j.value("loop_end", clip.end_marker);
    clip.loop_on = j.value("loop_on", false);
    clip.warp_on = j.value("warp_on", true);
    clip.source_bpm = j.value("bpm", 120.0);

    try {
        clip.validate();
    } catch (const Error& e) {
        throw Error(ErrorCode::ValidationError, std::string("warp sidecar: ") + e.what());
    }
    return clip;
}

ClipInfo load_warp_sidecar(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return parse_warp_sidecar(ss.str());
    } catch (const Error& e) {
        throw Error(e.code(), path + ": " + e.what());
    }
}

std::string dump_warp_sidecar(const ClipInfo& clip) {
    json j;
    j["markers"] = json::array();
    for (const auto& m : clip.markers)
        j["markers"].push_back({{"seconds", m.seconds}, {"beats", m.beats}});
    j["start_marker"] = clip.start_marker;
    if (std::isfinite(clip.end_marker))
        j["end_marker"] = clip.end_marker;
    j["loop_start"] = clip.loop_start;
    if (std::isfinite(clip.loop_end))
        j["loop_end"] = clip.loop_end;
    j["loop_on"] = clip.loop_on;
    j["warp_on"] = clip.warp_on;
    j["bpm"] = clip.source_bpm;
    return j.dump(2);
}

} // namespace dawkit
