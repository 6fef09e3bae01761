#pragma once

#include <cstdint>
#include <cstring>
#include <vector>

#include "dawkit/errors.hpp"

namespace dawkit {

/// Planar multichannel sample storage. The unit of all inter-processor data
/// flow: every channel holds exactly frames() samples at sample_rate Hz.
class AudioBuffer {
public:
    AudioBuffer() = default;

    AudioBuffer(int channels, int64_t frames, double sample_rate)
        : sample_rate_(sample_rate),
          data_(static_cast<size_t>(channels),
                std::vector<float>(static_cast<size_t>(frames), 0.0f)) {
        if (channels < 1)
            throw Error(ErrorCode::ValidationError, "AudioBuffer needs at least one channel");
        if (sample_rate <= 0.0)
            throw Error(ErrorCode::ValidationError, "AudioBuffer sample_rate must be > 0");
    }

    int channels() const { return static_cast<int>(data_.size()); }
    int64_t frames() const { return data_.empty() ? 0 : static_cast<int64_t>(data_[0].size()); }
    double sample_rate() const { return sample_rate_; }
    void set_sample_rate(double sr) { sample_rate_ = sr; }

    float* channel(int c) { return data_[static_cast<size_t>(c)].data(); }
    const float* channel(int c) const { return data_[static_cast<size_t>(c)].data(); }

    std::vector<float>& channel_vec(int c) { return data_[static_cast<size_t>(c)]; }
    const std::vector<float>& channel_vec(int c) const { return data_[static_cast<size_t>(c)]; }

    void clear() {
        for (auto& ch : data_)
            std::memset(ch.data(), 0, ch.size() * sizeof(float));
    }

    void resize(int channels, int64_t frames) {
        data_.assign(static_cast<size_t>(channels),
                     std::vector<float>(static_cast<size_t>(frames), 0.0f));
    }

    /// Reads frame n of channel c as if the buffer had target_channels
    /// channels. Mono to stereo duplicates, stereo to mono averages.
    float sample_adapted(int c, int64_t n, int target_channels) const {
        const int src = channels();
        if (src == target_channels)
            return data_[static_cast<size_t>(c)][static_cast<size_t>(n)];
        if (src == 1)
            return data_[0][static_cast<size_t>(n)];
        if (target_channels == 1) {
            float acc = 0.0f;
            for (int i = 0; i < src; ++i)
                acc += data_[static_cast<size_t>(i)][static_cast<size_t>(n)];
            return acc / static_cast<float>(src);
        }
        // fewer target channels than source but not mono: take matching channel
        return data_[static_cast<size_t>(c % src)][static_cast<size_t>(n)];
    }

private:
    double sample_rate_ = 44100.0;
    std::vector<std::vector<float>> data_;
};

} // namespace dawkit
