#pragma once

#include <limits>
#include <string>
#include <vector>

#include "dawkit/errors.hpp"

namespace dawkit {

/// Anchor pairing a position in the source audio (seconds) with a musical
/// position (quarter-note beats).
struct WarpMarker {
    double seconds = 0.0;
    double beats = 0.0;
};

/// Warp metadata for one audio clip: the marker list plus the playable
/// region, loop region and warp switch. end_marker may be +inf, meaning the
/// region runs to the end of the source audio.
struct ClipInfo {
    std::vector<WarpMarker> markers{{0.0, 0.0}};
    double start_marker = 0.0;
    double end_marker = std::numeric_limits<double>::infinity();
    double loop_start = 0.0;
    double loop_end = std::numeric_limits<double>::infinity();
    bool loop_on = false;
    bool warp_on = true;
    double source_bpm = 120.0;  // fallback tempo for unwarped / single-marker clips

    /// Throws ValidationError naming the offending marker index or field.
    void validate() const;
};

/// One occurrence of a clip on the global beat timeline.
struct TimelinePlacement {
    double at_beats = 0.0;
    double transpose_semitones = 0.0;
};

/// Piecewise-linear map through the markers; beyond the first/last marker the
/// adjacent segment's slope extrapolates. Single-marker clips use
/// 60 / source_bpm seconds per beat through that marker.
double beats_to_seconds(const ClipInfo& clip, double beats);

/// Inverse of beats_to_seconds (the map is strictly increasing).
double seconds_to_beats(const ClipInfo& clip, double seconds);

/// 60 / (d seconds / d beats) of the active segment, right-continuous at
/// marker positions.
double segment_tempo(const ClipInfo& clip, double beats);

/// Parses the `<audio>.warp.json` sidecar format. Unknown keys are ignored;
/// missing region keys default to the full marker span.
ClipInfo parse_warp_sidecar(const std::string& json_text);
ClipInfo load_warp_sidecar(const std::string& path);

/// Serializes a clip back to sidecar JSON (used by project dumps).
std::string dump_warp_sidecar(const ClipInfo& clip);

/// Implemented by processors that place warped clips on the timeline.
class ClipUser {
public:
    virtual ~ClipUser() = default;
    virtual void set_clip(ClipInfo clip) = 0;
    virtual void set_placements(std::vector<TimelinePlacement> placements) = 0;
    virtual const ClipInfo& clip() const = 0;
    virtual const std::vector<TimelinePlacement>& placements() const = 0;
};

} // namespace dawkit
