#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dawkit/audio_buffer.hpp"

namespace dawkit {

enum class WavEncoding { Pcm16, Pcm24, Float32 };

struct WavFormat {
    WavEncoding encoding = WavEncoding::Float32;
    int channels = 1;
    double sample_rate = 44100.0;
};

struct WavFile {
    AudioBuffer buffer;
    WavFormat format;
};

/// Decodes a RIFF/WAVE container. pcm16 divides by 32768, pcm24 by 8388608;
/// unknown chunks are skipped. WAVE_FORMAT_EXTENSIBLE is accepted on read.
WavFile read_wav(std::span<const uint8_t> bytes);
WavFile read_wav_file(const std::string& path);

/// Byte-deterministic writer. PCM encodings saturate (never wrap) out-of-range
/// samples.
std::vector<uint8_t> write_wav(const AudioBuffer& buffer, WavEncoding encoding);
void write_wav_file(const std::string& path, const AudioBuffer& buffer, WavEncoding encoding);

} // namespace dawkit
