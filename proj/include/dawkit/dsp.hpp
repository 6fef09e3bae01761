#pragma once

#include <cmath>
#include <cstdint>
#include <optional>

#include "dawkit/audio_buffer.hpp"

namespace dawkit {

// Detector/filter state below this is flushed to zero (denormal guard).
inline constexpr double kDenormalFloor = 1e-20;

enum class BiquadMode { Lowpass = 0, Highpass = 1, Bandpass = 2 };

struct BiquadParams {
    BiquadMode mode = BiquadMode::Lowpass;
    double cutoff_hz = 1000.0;
    double q = 0.70710678118654752;
};

struct BiquadCoeffs {
    double b0 = 1.0, b1 = 0.0, b2 = 0.0;
    double a1 = 0.0, a2 = 0.0;
};

/// Audio-EQ-cookbook bilinear coefficients. The cutoff is clamped to
/// [10 Hz, 0.49 * sample_rate] so any scalar or automated value is usable.
BiquadCoeffs biquad_coeffs(BiquadMode mode, double cutoff_hz, double q, double sample_rate);

/// Transposed direct-form-II section; state persists across blocks.
struct BiquadState {
    double s1 = 0.0, s2 = 0.0;

    void reset() { s1 = s2 = 0.0; }

    float tick(const BiquadCoeffs& c, float x) {
        const double xd = x;
        const double y = c.b0 * xd + s1;
        s1 = c.b1 * xd - c.a1 * y + s2;
        s2 = c.b2 * xd - c.a2 * y;
        if (std::fabs(s1) < kDenormalFloor) s1 = 0.0;
        if (std::fabs(s2) < kDenormalFloor) s2 = 0.0;
        return static_cast<float>(y);
    }
};

struct CompressorParams {
    double threshold_db = -24.0;  // dBFS, [-96, 0]
    double ratio = 4.0;           // >= 1
    double attack_ms = 10.0;      // > 0
    double release_ms = 100.0;    // > 0
    double makeup_db = 0.0;
};

/// Peak detector with one-pole ballistics, hard knee:
///   env[n]   = a * env[n-1] + (1 - a) * |sc[n]|,
///              a = exp(-1 / (tau * sr)), tau = attack while rising else release
///   gain_db  = min(0, (threshold - 20*log10(max(env, 1e-10))) * (1 - 1/ratio)) + makeup
struct CompressorState {
    double env = 0.0;

    void reset() { env = 0.0; }

    /// Linear gain to apply to the main signal at this frame, driven by the
    /// detector sample sc_abs (absolute value, channels already collapsed).
    double tick_gain(const CompressorParams& p, double sc_abs, double sample_rate) {
        const double tau_ms = (sc_abs > env) ? p.attack_ms : p.release_ms;
        const double a = std::exp(-1.0 / (tau_ms * 1e-3 * sample_rate));
        env = a * env + (1.0 - a) * sc_abs;
        if (env < kDenormalFloor) env = 0.0;
        const double level_db = 20.0 * std::log10(std::max(env, 1e-10));
        double gain_db = (p.threshold_db - level_db) * (1.0 - 1.0 / p.ratio);
        if (gain_db > 0.0) gain_db = 0.0;
        gain_db += p.makeup_db;
        return std::pow(10.0, gain_db / 20.0);
    }
};

/// One compressed block. With no sidechain the main signal is its own
/// detector; the detector sample is the mean across channels.
AudioBuffer compressor_process(const CompressorParams& params, const AudioBuffer& main,
                               const AudioBuffer* sidechain = nullptr);

} // namespace dawkit
