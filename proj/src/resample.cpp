#include "dawkit/resample.hpp"

#include <cmath>
#include <vector>

namespace dawkit {

namespace {

constexpr int kTaps = 32;        // taps per polyphase branch
constexpr int kPhases = 512;     // fractional-position resolution
constexpr double kKaiserBeta = 8.0;

double bessel_i0(double x) {
    // power series, converges quickly for the beta range used here
    double sum = 1.0, term = 1.0;
    for (int k = 1; k < 64; ++k) {
        term *= (x / (2.0 * k)) * (x / (2.0 * k));
        sum += term;
        if (term < 1e-18 * sum)
            break;
    }
    return sum;
}

double sinc(double x) {
    if (std::fabs(x) < 1e-12)
        return 1.0;
    const double px = M_PI * x;
    return std::sin(px) / px;
}

/// Polyphase filter bank: table[(phase)(tap)] where phase subdivides one
/// input-sample interval. Each branch is normalized to unit sum so DC passes
/// exactly.
struct FilterBank {
    std::vector<double> taps;  // (kPhases + 1) * kTaps, extra row for interpolation

    explicit FilterBank(double cutoff) {
        taps.resize(static_cast<size_t>(kPhases + 1) * kTaps);
        const double i0_beta = bessel_i0(kKaiserBeta);
        const double half_span = kTaps / 2.0;
        for (int p = 0; p <= kPhases; ++p) {
            const double frac = static_cast<double>(p) / kPhases;
            double sum = 0.0;
            for (int t = 0; t < kTaps; ++t) {
                // tap t reads input index i0 + t - kTaps/2 + 1, at time offset
                // (t - kTaps/2 + 1 - frac) from the output position
                const double x = t - half_span + 1.0 - frac;
                double w = 0.0;
                const double u = x / half_span;
                if (u > -1.0 && u < 1.0)
                    w = bessel_i0(kKaiserBeta * std::sqrt(1.0 - u * u)) / i0_beta;
                const double h = 2.0 * cutoff * sinc(2.0 * cutoff * x) * w;
                taps[static_cast<size_t>(p) * kTaps + t] = h;
                sum += h;
            }
            if (sum != 0.0) {
                for (int t = 0; t < kTaps; ++t)
                    taps[static_cast<size_t>(p) * kTaps + t] /= sum;
            }
        }
    }
};

} // namespace

AudioBuffer resample_by_factor(const AudioBuffer& input, double factor) {
    if (!(factor > 0.0))
        throw Error(ErrorCode::ValidationError, "resample factor must be > 0");
    if (factor == 1.0)
        return input;

    const int64_t in_frames = input.frames();
    const int64_t out_frames = static_cast<int64_t>(std::llround(in_frames * factor));
    AudioBuffer out(input.channels(), out_frames, input.sample_rate());
    if (in_frames == 0 || out_frames == 0)
        return out;

    // anti-alias below the output Nyquist when decimating
    const double cutoff = 0.5 * std::min(1.0, factor);
    FilterBank bank(cutoff);

    const double step = 1.0 / factor;  // input samples per output sample
    for (int c = 0; c < input.channels(); ++c) {
        const float* in = input.channel(c);
        float* dst = out.channel(c);
        for (int64_t m = 0; m < out_frames; ++m) {
            const double x = m * step;
            const int64_t i0 = static_cast<int64_t>(std::floor(x));
            const double frac = x - static_cast<double>(i0);
            const double pf = frac * kPhases;
            const int p = static_cast<int>(pf);
            const double pfrac = pf - p;
            const double* h0 = &bank.taps[static_cast<size_t>(p) * kTaps];
            const double* h1 = h0 + kTaps;
            double acc = 0.0;
            for (int t = 0; t < kTaps; ++t) {
                const int64_t idx = i0 + t - kTaps / 2 + 1;
                if (idx < 0 || idx >= in_frames)
                    continue;
                const double h = h0[t] + pfrac * (h1[t] - h0[t]);
                acc += h * in[idx];
            }
            dst[m] = static_cast<float>(acc);
        }
    }
    return out;
}

AudioBuffer resample(const AudioBuffer& input, double target_rate) {
    if (!(target_rate > 0.0) || !(input.sample_rate() > 0.0))
        throw Error(ErrorCode::ValidationError, "sample rates must be > 0");
    if (target_rate == input.sample_rate())
        return input;
    AudioBuffer out = resample_by_factor(input, target_rate / input.sample_rate());
    out.set_sample_rate(target_rate);
    return out;
}

} // namespace dawkit
