#pragma once

#include "dawkit/audio_buffer.hpp"

namespace dawkit {

/// Windowed-sinc (Kaiser, 32 taps per branch) polyphase sample-rate
/// conversion. Output length is round(frames * target / source). Equal rates
/// return the input unchanged.
AudioBuffer resample(const AudioBuffer& input, double target_rate);

/// Same kernel, driven by a raw length factor (output length
/// round(frames * factor)) with the sample-rate tag left untouched. This is
/// the pitch-shift primitive: reading faster raises pitch.
AudioBuffer resample_by_factor(const AudioBuffer& input, double factor);

} // namespace dawkit
