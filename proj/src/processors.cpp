#include <algorithm>
#include <cmath>
#include <map>

#include "dawkit/dsp.hpp"
#include "dawkit/instruments.hpp"
#include "dawkit/playback.hpp"
#include "dawkit/processor.hpp"

namespace dawkit {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// ---------------------------------------------------------------------------
// oscillator: sine with a phase accumulator, phase continuous across blocks.
// params: freq_hz, gain, phase (additive offset in radians)
// ---------------------------------------------------------------------------

class OscillatorProcessor final : public Processor {
public:
    enum { kFreq = 0, kGain = 1, kPhase = 2 };

    void prepare(const PrepareInfo& info) override {
        sr_ = info.sample_rate;
        acc_ = 0.0;
    }

    int output_channels(std::span<const int>) const override { return 1; }

    void process(ProcessContext& ctx) override {
        float* out = ctx.out->channel(0);
        const double limit = 0.49 * sr_;
        for (int i = 0; i < ctx.frames; ++i) {
            const int64_t n = ctx.start_frame + i;
            const double freq = std::clamp(ctx.params->get(kFreq, n), 0.0, limit);
            const double gain = ctx.params->get(kGain, n);
            const double phase = ctx.params->get(kPhase, n);
            out[i] = static_cast<float>(gain * std::sin(acc_ + phase));
            acc_ += kTwoPi * freq / sr_;
            if (acc_ >= kTwoPi)
                acc_ -= kTwoPi;
        }
    }

private:
    double sr_ = 44100.0;
    double acc_ = 0.0;
};

// ---------------------------------------------------------------------------
// gain: out[n] = in[n] * gain[n]
// ---------------------------------------------------------------------------

class GainProcessor final : public Processor {
public:
    enum { kGain = 0 };

    void process(ProcessContext& ctx) override {
        const AudioBuffer& in = *ctx.inputs[0];
        for (int c = 0; c < ctx.out->channels(); ++c) {
            const float* src = in.channel(c);
            float* dst = ctx.out->channel(c);
            for (int i = 0; i < ctx.frames; ++i)
                dst[i] = static_cast<float>(src[i] * ctx.params->get(kGain, ctx.start_frame + i));
        }
    }
};

// ---------------------------------------------------------------------------
// add: bus summation, out[n] = sum_i gain_i[n] * in_i[n] in fixed input order.
// Inputs are channel-adapted to the widest input.
// ---------------------------------------------------------------------------

class AddProcessor final : public Processor {
public:
    int output_channels(std::span<const int> input_channels) const override {
        int widest = 1;
        for (int c : input_channels)
            widest = std::max(widest, c);
        return widest;
    }

    void process(ProcessContext& ctx) override {
        if (ctx.inputs.empty())
            throw Error(ErrorCode::NoInputs, "add processor needs at least one input");
        const int channels = ctx.out->channels();
        for (int c = 0; c < channels; ++c) {
            float* dst = ctx.out->channel(c);
            for (int i = 0; i < ctx.frames; ++i) {
                const int64_t n = ctx.start_frame + i;
                double acc = 0.0;
                for (size_t k = 0; k < ctx.inputs.size(); ++k) {
                    const double g = ctx.params->get(static_cast<int>(k), n);
                    acc += g * ctx.inputs[k]->sample_adapted(c, i, channels);
                }
                dst[i] = static_cast<float>(acc);
            }
        }
    }
};

// ---------------------------------------------------------------------------
// biquad: audio-EQ-cookbook filter, transposed direct form II. Coefficients
// are recomputed when cutoff or q change, at most once per frame.
// params: mode (0 lp, 1 hp, 2 bp; fixed per render), cutoff_hz, q
// ---------------------------------------------------------------------------

class BiquadProcessor final : public Processor {
public:
    enum { kMode = 0, kCutoff = 1, kQ = 2 };

    void prepare(const PrepareInfo& info) override {
        sr_ = info.sample_rate;
        states_.clear();
        last_cutoff_ = -1.0;
        last_q_ = -1.0;
    }

    void process(ProcessContext& ctx) override {
        const AudioBuffer& in = *ctx.inputs[0];
        const int channels = ctx.out->channels();
        if (static_cast<int>(states_.size()) != channels)
            states_.assign(static_cast<size_t>(channels), BiquadState{});
        const auto mode = static_cast<BiquadMode>(
            static_cast<int>(ctx.params->scalar(kMode)));
        for (int i = 0; i < ctx.frames; ++i) {
            const int64_t n = ctx.start_frame + i;
            const double cutoff = ctx.params->get(kCutoff, n);
            const double q = ctx.params->get(kQ, n);
            if (cutoff != last_cutoff_ || q != last_q_) {
                coeffs_ = biquad_coeffs(mode, cutoff, q, sr_);
                last_cutoff_ = cutoff;
                last_q_ = q;
            }
            for (int c = 0; c < channels; ++c)
                ctx.out->channel(c)[i] = states_[static_cast<size_t>(c)].tick(coeffs_, in.channel(c)[i]);
        }
    }

private:
    double sr_ = 44100.0;
    std::vector<BiquadState> states_;
    BiquadCoeffs coeffs_;
    double last_cutoff_ = -1.0;
    double last_q_ = -1.0;
};

// ---------------------------------------------------------------------------
// compressor: two inputs (main, detector). Feed the same node twice to
// compress a signal against itself.
// params: threshold_db, ratio, attack_ms, release_ms, makeup_db
// ---------------------------------------------------------------------------

class CompressorProcessor final : public Processor {
public:
    enum { kThreshold = 0, kRatio = 1, kAttack = 2, kRelease = 3, kMakeup = 4 };

    void prepare(const PrepareInfo& info) override {
        sr_ = info.sample_rate;
        state_.reset();
    }

    int output_channels(std::span<const int> input_channels) const override {
        return input_channels.empty() ? 1 : input_channels[0];
    }

    void process(ProcessContext& ctx) override {
        const AudioBuffer& main = *ctx.inputs[0];
        const AudioBuffer& det = *ctx.inputs[ctx.inputs.size() > 1 ? 1 : 0];
        const int channels = ctx.out->channels();
        CompressorParams p;
        for (int i = 0; i < ctx.frames; ++i) {
            const int64_t n = ctx.start_frame + i;
            p.threshold_db = ctx.params->get(kThreshold, n);
            p.ratio = ctx.params->get(kRatio, n);
            p.attack_ms = ctx.params->get(kAttack, n);
            p.release_ms = ctx.params->get(kRelease, n);
            p.makeup_db = ctx.params->get(kMakeup, n);
            double sc = 0.0;
            for (int c = 0; c < det.channels(); ++c)
                sc += std::fabs(det.channel(c)[i]);
            sc /= det.channels();
            const double g = state_.tick_gain(p, sc, sr_);
            for (int c = 0; c < channels; ++c)
                ctx.out->channel(c)[i] = static_cast<float>(main.channel(c)[i] * g);
        }
    }

private:
    double sr_ = 44100.0;
    CompressorState state_;
};

// ---------------------------------------------------------------------------
// schemas
// ---------------------------------------------------------------------------

ParamSchema oscillator_schema(int) {
    return ParamSchema({
        {"freq_hz", 440.0, 0.0, 96000.0, true},
        {"gain", 1.0, -16.0, 16.0, true},
        {"phase", 0.0, -kTwoPi, kTwoPi, true},
    });
}

ParamSchema gain_schema(int) {
    return ParamSchema({{"gain", 1.0, -16.0, 16.0, true}});
}

ParamSchema add_schema(int n_inputs) {
    std::vector<ParamSpec> specs;
    specs.reserve(static_cast<size_t>(std::max(n_inputs, 0)));
    for (int i = 0; i < n_inputs; ++i)
        specs.push_back({"gain" + std::to_string(i), 1.0, -16.0, 16.0, true});
    return ParamSchema(std::move(specs));
}

ParamSchema biquad_schema(int) {
    return ParamSchema({
        {"mode", 0.0, 0.0, 2.0, false},
        {"cutoff_hz", 1000.0, 10.0, 96000.0, true},
        {"q", 0.70710678118654752, 0.05, 20.0, true},
    });
}

ParamSchema compressor_schema(int) {
    return ParamSchema({
        {"threshold_db", -24.0, -96.0, 0.0, true},
        {"ratio", 4.0, 1.0, 1000.0, true},
        {"attack_ms", 10.0, 0.01, 1000.0, true},
        {"release_ms", 100.0, 0.01, 5000.0, true},
        {"makeup_db", 0.0, -24.0, 24.0, true},
    });
}

template <class T>
std::unique_ptr<Processor> make_simple(int) {
    return std::make_unique<T>();
}

ParamSchema sampler_schema_n(int) { return sampler_schema(); }
ParamSchema wavetable_schema_n(int) { return wavetable_schema(); }
ParamSchema playback_schema_n(int) { return playback_schema(); }
ParamSchema playback_warp_schema_n(int) { return playback_warp_schema(); }
std::unique_ptr<Processor> make_sampler_n(int) { return make_sampler_processor(); }
std::unique_ptr<Processor> make_wavetable_n(int) { return make_wavetable_processor(); }
std::unique_ptr<Processor> make_playback_n(int) { return make_playback_processor(); }
std::unique_ptr<Processor> make_playback_warp_n(int) { return make_playback_warp_processor(); }

const std::map<std::string, KindInfo>& kind_table() {
    static const std::map<std::string, KindInfo> table = {
        {"oscillator", {{0, 0}, oscillator_schema, make_simple<OscillatorProcessor>}},
        {"gain", {{1, 1}, gain_schema, make_simple<GainProcessor>}},
        {"add", {{1, 64}, add_schema, make_simple<AddProcessor>}},
        {"biquad", {{1, 1}, biquad_schema, make_simple<BiquadProcessor>}},
        {"compressor", {{2, 2}, compressor_schema, make_simple<CompressorProcessor>}},
        {"sampler", {{0, 0}, sampler_schema_n, make_sampler_n}},
        {"wavetable_synth", {{0, 0}, wavetable_schema_n, make_wavetable_n}},
        {"playback", {{0, 0}, playback_schema_n, make_playback_n}},
        {"playback_warp", {{0, 0}, playback_warp_schema_n, make_playback_warp_n}},
    };
    return table;
}

} // namespace

const KindInfo* find_kind(const std::string& kind) {
    const auto& table = kind_table();
    auto it = table.find(kind);
    return it == table.end() ? nullptr : &it->second;
}

std::vector<std::string> kind_names() {
    std::vector<std::string> names;
    for (const auto& [name, info] : kind_table())
        names.push_back(name);
    return names;
}

} // namespace dawkit
