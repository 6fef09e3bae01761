#include "dawkit/dsp.hpp"

#include <algorithm>

namespace dawkit {

BiquadCoeffs biquad_coeffs(BiquadMode mode, double cutoff_hz, double q, double sample_rate) {
    const double fc = std::clamp(cutoff_hz, 10.0, 0.49 * sample_rate);
    const double qq = std::max(q, 1e-3);
    const double w0 = 2.0 * M_PI * fc / sample_rate;
    const double cw = std::cos(w0);
    const double sw = std::sin(w0);
    const double alpha = sw / (2.0 * qq);

    double b0, b1, b2, a0, a1, a2;
    switch (mode) {
        case BiquadMode::Lowpass:
            b0 = (1.0 - cw) / 2.0;
            b1 = 1.0 - cw;
            b2 = b0;
            break;
        case BiquadMode::Highpass:
            b0 = (1.0 + cw) / 2.0;
            b1 = -(1.0 + cw);
            b2 = b0;
            break;
        case BiquadMode::Bandpass:  // constant 0 dB peak gain
            b0 = alpha;
            b1 = 0.0;
            b2 = -alpha;
            break;
        default:
            b0 = 1.0; b1 = 0.0; b2 = 0.0;
            break;
    }
    a0 = 1.0 + alpha;
    a1 = -2.0 * cw;
    a2 = 1.0 - alpha;

    BiquadCoeffs c;
    c.b0 = b0 / a0;
    c.b1 = b1 / a0;
    c.b2 = b2 / a0;
    c.a1 = a1 / a0;
    c.a2 = a2 / a0;
    return c;
}

AudioBuffer compressor_process(const CompressorParams& params, const AudioBuffer& main,
                               const AudioBuffer* sidechain) {
    const AudioBuffer& det = sidechain ? *sidechain : main;
    const int64_t frames = main.frames();
    AudioBuffer out(main.channels(), frames, main.sample_rate());
    CompressorState state;
    for (int64_t n = 0; n < frames; ++n) {
        double sc = 0.0;
        if (det.frames() > 0) {
            const int64_t dn = std::min(n, det.frames() - 1);
            for (int c = 0; c < det.channels(); ++c)
                sc += std::fabs(det.channel(c)[dn]);
            sc /= det.channels();
        }
        const double g = state.tick_gain(params, sc, main.sample_rate());
        for (int c = 0; c < main.channels(); ++c)
            out.channel(c)[n] = static_cast<float>(main.channel(c)[n] * g);
    }
    return out;
}

} // namespace dawkit
