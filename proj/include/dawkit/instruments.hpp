#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "dawkit/adsr.hpp"
#include "dawkit/dsp.hpp"
#include "dawkit/processor.hpp"

namespace dawkit {

/// One unit of polyphony. position is the fractional read position (sampler)
/// or table phase in frames (wavetable).
struct Voice {
    bool active = false;
    bool gate = false;
    int note = -1;
    int velocity = 0;
    int64_t started_at = 0;
    double position = 0.0;
    double increment = 0.0;  // read-rate (sampler) or phase step (wavetable)
    AdsrEnvelope amp_env;
    AdsrEnvelope filter_env;
    BiquadState filter[2];
    double filter_cutoff = -1.0;  // last coefficient cutoff, -1 forces recompute
    BiquadCoeffs filter_coeffs;
};

/// Automatic voice allocation: a retriggered note steals its own voice, free
/// slots are used next, otherwise the oldest voice (smallest started_at,
/// lowest index on ties) is stolen.
class VoicePool {
public:
    explicit VoicePool(int max_voices = 16) : voices_(static_cast<size_t>(max_voices)) {}

    /// Allocates the slot for a note-on and returns its index. The caller
    /// (re)initializes the voice.
    int note_on(int note, int64_t frame) {
        int slot = -1;
        for (size_t i = 0; i < voices_.size(); ++i) {
            if (voices_[i].active && voices_[i].note == note) {
                slot = static_cast<int>(i);
                break;
            }
        }
        if (slot < 0) {
            for (size_t i = 0; i < voices_.size(); ++i) {
                if (!voices_[i].active) {
                    slot = static_cast<int>(i);
                    break;
                }
            }
        }
        if (slot < 0) {
            int64_t oldest = voices_[0].started_at;
            slot = 0;
            for (size_t i = 1; i < voices_.size(); ++i) {
                if (voices_[i].started_at < oldest) {
                    oldest = voices_[i].started_at;
                    slot = static_cast<int>(i);
                }
            }
        }
        Voice& v = voices_[static_cast<size_t>(slot)];
        v.active = true;
        v.gate = true;
        v.note = note;
        v.started_at = frame;
        return slot;
    }

    /// Gate off for the oldest sounding voice of this pitch; returns its slot
    /// or -1 when none is sounding.
    int note_off(int note) {
        int slot = -1;
        int64_t oldest = 0;
        for (size_t i = 0; i < voices_.size(); ++i) {
            const Voice& v = voices_[i];
            if (v.active && v.gate && v.note == note &&
                (slot < 0 || v.started_at < oldest)) {
                slot = static_cast<int>(i);
                oldest = v.started_at;
            }
        }
        if (slot >= 0)
            voices_[static_cast<size_t>(slot)].gate = false;
        return slot;
    }

    void reset() {
        for (auto& v : voices_)
            v = Voice{};
    }

    int active_count() const {
        int n = 0;
        for (const auto& v : voices_)
            n += v.active ? 1 : 0;
        return n;
    }

    int size() const { return static_cast<int>(voices_.size()); }
    std::vector<Voice>& voices() { return voices_; }
    const std::vector<Voice>& voices() const { return voices_; }

private:
    std::vector<Voice> voices_;
};

// Factories and instance schemas for the registry.
std::unique_ptr<Processor> make_sampler_processor();
std::unique_ptr<Processor> make_wavetable_processor();
ParamSchema sampler_schema();
ParamSchema wavetable_schema();

} // namespace dawkit
