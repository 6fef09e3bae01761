#pragma once

#include "dawkit/audio_buffer.hpp"

namespace dawkit {

/// WSOLA time-scale modification composed with resampling for pitch.
///
/// time_ratio scales duration (output/input), pitch_ratio multiplies
/// frequency; both must lie in [1/8, 8] (RatioOutOfRange otherwise). The
/// input is first resampled by 1/pitch_ratio, then stretched by
/// time_ratio * pitch_ratio with a Hann window of 2048 frames at 44.1 kHz
/// (scaled proportionally at other rates), synthesis hop of half a window,
/// and candidate alignment chosen by maximizing normalized cross-correlation
/// within +-512 frames. Channels share alignment decisions taken on the
/// channel sum. Output length is round(input_frames * time_ratio) within one
/// window.
AudioBuffer stretch(const AudioBuffer& input, double time_ratio, double pitch_ratio);

} // namespace dawkit
