#include "dawkit/stretch.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "dawkit/resample.hpp"

namespace dawkit {

namespace {

// Window of 2048 frames, hop of half a window and a +-512-frame search range
// at 44.1 kHz; all three scale proportionally at other rates.
int window_for_rate(double sample_rate) {
    int w = static_cast<int>(std::lround(2048.0 * sample_rate / 44100.0));
    w = std::max(64, w);
    return w & ~1;  // keep it even so the hop is exact
}

} // namespace

AudioBuffer stretch(const AudioBuffer& input, double time_ratio, double pitch_ratio) {
    if (!(time_ratio >= 0.125 && time_ratio <= 8.0) ||
        !(pitch_ratio >= 0.125 && pitch_ratio <= 8.0))
        throw Error(ErrorCode::RatioOutOfRange,
                    "time_ratio " + std::to_string(time_ratio) + ", pitch_ratio " +
                        std::to_string(pitch_ratio) + " (both must be in [1/8, 8])");

    // resample-then-stretch: shifting pitch by p shortens the material by p,
    // so the stretch stage makes up the difference
    const AudioBuffer* src = &input;
    AudioBuffer resampled;
    if (pitch_ratio != 1.0) {
        resampled = resample_by_factor(input, 1.0 / pitch_ratio);
        src = &resampled;
    }
    const double tau = time_ratio * pitch_ratio;

    const int channels = src->channels();
    const double sr = src->sample_rate();
    const int window = window_for_rate(sr);
    const int syn_hop = window / 2;
    const int search = window / 4;
    const double ana_hop = static_cast<double>(syn_hop) / tau;

    const int64_t in_frames = src->frames();
    const int64_t out_frames = static_cast<int64_t>(std::llround(in_frames * tau));
    AudioBuffer out(channels, std::max<int64_t>(out_frames, 0), input.sample_rate());
    if (in_frames == 0 || out_frames <= 0)
        return out;

    // alignment signal: channel sum, zero-padded so every window fits
    const int64_t padded = in_frames + window + search + 1;
    std::vector<float> mono(static_cast<size_t>(padded), 0.0f);
    for (int c = 0; c < channels; ++c) {
        const float* in = src->channel(c);
        for (int64_t i = 0; i < in_frames; ++i)
            mono[static_cast<size_t>(i)] += in[i];
    }
    std::vector<std::vector<float>> padded_ch(static_cast<size_t>(channels));
    for (int c = 0; c < channels; ++c) {
        padded_ch[static_cast<size_t>(c)].assign(static_cast<size_t>(padded), 0.0f);
        std::copy(src->channel(c), src->channel(c) + in_frames,
                  padded_ch[static_cast<size_t>(c)].begin());
    }

    std::vector<double> hann(static_cast<size_t>(window));
    for (int i = 0; i < window; ++i)
        hann[static_cast<size_t>(i)] =
            0.5 - 0.5 * std::cos(2.0 * M_PI * i / static_cast<double>(window));

    // prefix sums of mono^2 for the normalized-cross-correlation denominator
    std::vector<double> energy(static_cast<size_t>(padded) + 1, 0.0);
    for (int64_t i = 0; i < padded; ++i)
        energy[static_cast<size_t>(i + 1)] =
            energy[static_cast<size_t>(i)] + static_cast<double>(mono[static_cast<size_t>(i)]) *
                                                 mono[static_cast<size_t>(i)];
    auto window_energy = [&](int64_t start) {
        return energy[static_cast<size_t>(start + window)] - energy[static_cast<size_t>(start)];
    };

    const int64_t max_start = std::max<int64_t>(padded - window - 1, 0);
    std::vector<double> weight(static_cast<size_t>(out_frames + window), 0.0);
    std::vector<std::vector<double>> acc_ch(
        static_cast<size_t>(channels), std::vector<double>(static_cast<size_t>(out_frames + window), 0.0));

    int64_t prev_sel = 0;
    for (int64_t k = 0;; ++k) {
        const int64_t out_pos = k * syn_hop;
        if (out_pos >= out_frames)
            break;
        const int64_t nominal =
            std::clamp<int64_t>(static_cast<int64_t>(std::llround(k * ana_hop)), 0, max_start);

        int64_t sel = nominal;
        if (k > 0) {
            // natural continuation of the previously copied window
            const int64_t tmpl = std::clamp<int64_t>(prev_sel + syn_hop, 0, max_start);
            const float* t = mono.data() + tmpl;
            const double t_energy = window_energy(tmpl);
            double best = -2.0;
            int64_t best_abs_delta = 0;
            for (int64_t delta = -search; delta <= search; ++delta) {
                const int64_t cand = nominal + delta;
                if (cand < 0 || cand > max_start)
                    continue;
                const float* c = mono.data() + cand;
                double dot = 0.0;
                for (int i = 0; i < window; ++i)
                    dot += static_cast<double>(t[i]) * c[i];
                const double denom = t_energy * window_energy(cand);
                const double score = denom > 0.0 ? dot / std::sqrt(denom) : 0.0;
                const int64_t abs_delta = delta < 0 ? -delta : delta;
                if (score > best || (score == best && abs_delta < best_abs_delta)) {
                    best = score;
                    sel = cand;
                    best_abs_delta = abs_delta;
                }
            }
        }
        prev_sel = sel;

        for (int c = 0; c < channels; ++c) {
            const float* in = padded_ch[static_cast<size_t>(c)].data() + sel;
            double* dst = acc_ch[static_cast<size_t>(c)].data() + out_pos;
            for (int i = 0; i < window; ++i)
                dst[i] += hann[static_cast<size_t>(i)] * in[i];
        }
        double* w = weight.data() + out_pos;
        for (int i = 0; i < window; ++i)
            w[i] += hann[static_cast<size_t>(i)];
    }

    // normalize by the accumulated window weight so edges keep full level
    for (int c = 0; c < channels; ++c) {
        float* dst = out.channel(c);
        const std::vector<double>& a = acc_ch[static_cast<size_t>(c)];
        for (int64_t i = 0; i < out_frames; ++i) {
            const double w = weight[static_cast<size_t>(i)];
            dst[i] = static_cast<float>(w > 1e-9 ? a[static_cast<size_t>(i)] / w : 0.0);
        }
    }
    return out;
}

} // namespace dawkit
