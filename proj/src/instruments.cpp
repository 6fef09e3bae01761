#include "dawkit/instruments.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "dawkit/note.hpp"

namespace dawkit {

namespace {

struct ScheduledEvent {
    int64_t frame;
    bool on;
    int note;
    int velocity;
};

/// Shared machinery of the two MIDI-driven instruments: event scheduling from
/// a note sequence (sample-accurate offsets inside blocks) and the voice
/// pool.
class PolyInstrument : public Processor, public SourceBufferUser, public NoteConsumer {
public:
    void set_source_buffer(AudioBuffer buffer) override { source_ = std::move(buffer); }
    const AudioBuffer* source_buffer() const override {
        return source_.frames() > 0 ? &source_ : nullptr;
    }

    void set_notes(NoteSequence sequence, bool beats_mode) override {
        notes_ = std::move(sequence);
        beats_mode_ = beats_mode;
    }
    const NoteSequence& notes() const override { return notes_; }
    bool notes_in_beats() const override { return beats_mode_; }

    void prepare(const PrepareInfo& info) override {
        sr_ = info.sample_rate;
        configure(info);
        const int max_voices = static_cast<int>(info.params->scalar(max_voices_index()));
        pool_ = VoicePool(max_voices);
        build_schedule(info);
        cursor_ = 0;
    }

    void process(ProcessContext& ctx) override {
        ctx.out->clear();
        const int channels = ctx.out->channels();
        for (int i = 0; i < ctx.frames; ++i) {
            const int64_t n = ctx.start_frame + i;
            while (cursor_ < events_.size() && events_[cursor_].frame == n) {
                const ScheduledEvent& ev = events_[cursor_++];
                if (ev.on) {
                    const int slot = pool_.note_on(ev.note, n);
                    start_voice(pool_.voices()[static_cast<size_t>(slot)], ev);
                } else {
                    const int slot = pool_.note_off(ev.note);
                    if (slot >= 0)
                        release_voice(pool_.voices()[static_cast<size_t>(slot)]);
                }
            }
            double acc[2] = {0.0, 0.0};
            for (auto& v : pool_.voices()) {
                if (!v.active)
                    continue;
                tick_voice(v, acc, channels);
            }
            for (int c = 0; c < channels; ++c)
                ctx.out->channel(c)[i] = static_cast<float>(acc[c]);
        }
    }

protected:
    virtual void configure(const PrepareInfo& info) = 0;
    virtual int max_voices_index() const = 0;
    virtual void start_voice(Voice& v, const ScheduledEvent& ev) = 0;
    virtual void release_voice(Voice& v) {
        v.gate = false;
        v.amp_env.note_off();
        v.filter_env.note_off();
    }
    virtual void tick_voice(Voice& v, double* acc, int channels) = 0;

    void build_schedule(const PrepareInfo& info) {
        events_.clear();
        std::set<std::pair<int, int64_t>> seen;  // (note, frame) dedup
        const double spb = 60.0 / info.bpm;
        for (const auto& ev : notes_) {
            const double start_s = beats_mode_ ? ev.start_beats * spb : ev.start_seconds;
            const double dur_s = beats_mode_ ? ev.duration_beats * spb : ev.duration_seconds;
            if (!(dur_s > 0.0))
                continue;
            const int64_t frame = std::llround(start_s * sr_);
            if (frame < 0)
                continue;
            const int note = std::clamp(ev.note, 0, 127);
            if (!seen.insert({note, frame}).second)
                continue;
            const int64_t off = frame + std::max<int64_t>(1, std::llround(dur_s * sr_));
            const int velocity = std::clamp(ev.velocity, 1, 127);
            events_.push_back({frame, true, note, velocity});
            events_.push_back({off, false, note, 0});
        }
        std::stable_sort(events_.begin(), events_.end(),
                         [](const ScheduledEvent& a, const ScheduledEvent& b) {
                             if (a.frame != b.frame)
                                 return a.frame < b.frame;
                             return !a.on && b.on;  // offs first at the same frame
                         });
    }

    AudioBuffer source_;
    NoteSequence notes_;
    bool beats_mode_ = false;
    double sr_ = 44100.0;
    VoicePool pool_{16};
    std::vector<ScheduledEvent> events_;
    size_t cursor_ = 0;
};

// ---------------------------------------------------------------------------
// sampler: one-shot pitched sample playback with amplitude and filter
// envelopes. Velocity maps linearly to amplitude; pitch scales the read rate
// by 2^((note - root)/12); the per-voice lowpass tracks
// filter_base_hz + filter_depth_hz * filter_env.
// ---------------------------------------------------------------------------

class SamplerProcessor final : public PolyInstrument {
public:
    enum {
        kRootNote = 0,
        kAttack, kDecay, kSustain, kRelease,
        kFilterAttack, kFilterDecay, kFilterSustain, kFilterRelease,
        kFilterBase, kFilterDepth,
        kMaxVoices,
    };

    int output_channels(std::span<const int>) const override {
        if (source_.frames() == 0)
            throw Error(ErrorCode::ValidationError, "sampler has no sample loaded");
        return source_.channels();
    }

protected:
    void configure(const PrepareInfo& info) override {
        const ParamResolver& p = *info.params;
        root_note_ = p.scalar(kRootNote);
        amp_ = {p.scalar(kAttack), p.scalar(kDecay), p.scalar(kSustain), p.scalar(kRelease)};
        filt_ = {p.scalar(kFilterAttack), p.scalar(kFilterDecay), p.scalar(kFilterSustain),
                 p.scalar(kFilterRelease)};
        filter_base_ = p.scalar(kFilterBase);
        filter_depth_ = p.scalar(kFilterDepth);
        // a depth of zero with the base beyond the audible clamp means the
        // filter stage is a no-op, so it is bypassed entirely
        filter_enabled_ = !(filter_depth_ == 0.0 && filter_base_ >= 0.49 * sr_);
        if (source_.frames() == 0)
            throw Error(ErrorCode::ValidationError, "sampler has no sample loaded");
    }

    int max_voices_index() const override { return kMaxVoices; }

    void start_voice(Voice& v, const ScheduledEvent& ev) override {
        v.velocity = ev.velocity;
        v.position = 0.0;
        v.increment = std::exp2((static_cast<double>(v.note) - root_note_) / 12.0);
        v.amp_env.configure(amp_, sr_);
        v.amp_env.note_on();
        v.filter_env.configure(filt_, sr_);
        v.filter_env.note_on();
        v.filter[0].reset();
        v.filter[1].reset();
        v.filter_cutoff = -1.0;
    }

    void tick_voice(Voice& v, double* acc, int channels) override {
        const int64_t frames = source_.frames();
        const double last_pos = static_cast<double>(frames - 1);
        const double amp_gain = (static_cast<double>(v.velocity) / 127.0) * v.amp_env.tick();
        double cutoff_env = 0.0;
        if (filter_enabled_)
            cutoff_env = v.filter_env.tick();

        if (v.position <= last_pos) {
            const auto i = static_cast<int64_t>(v.position);
            const double frac = v.position - static_cast<double>(i);
            double cutoff = 0.0;
            if (filter_enabled_) {
                cutoff = std::clamp(filter_base_ + filter_depth_ * cutoff_env, 10.0, 0.49 * sr_);
                if (cutoff != v.filter_cutoff) {
                    v.filter_coeffs = biquad_coeffs(BiquadMode::Lowpass, cutoff, 0.70710678118654752, sr_);
                    v.filter_cutoff = cutoff;
                }
            }
            for (int c = 0; c < channels; ++c) {
                const float* s = source_.channel(std::min(c, source_.channels() - 1));
                const double a = s[i];
                const double b = (i + 1 <= frames - 1) ? s[i + 1] : 0.0;
                double sample = a + frac * (b - a);
                if (filter_enabled_)
                    sample = v.filter[c & 1].tick(v.filter_coeffs, static_cast<float>(sample));
                acc[c] += amp_gain * sample;
            }
        }

        v.position += v.increment;
        if (v.amp_env.idle() || (v.position > last_pos && !v.gate))
            v.active = false;
    }

private:
    double root_note_ = 60.0;
    AdsrParams amp_;
    AdsrParams filt_;
    double filter_base_ = 100000.0;
    double filter_depth_ = 0.0;
    bool filter_enabled_ = false;
};

// ---------------------------------------------------------------------------
// wavetable synth: linear-interpolated wraparound reads of a single-cycle
// table at f = 440 * 2^((note - 69)/12).
// ---------------------------------------------------------------------------

class WavetableProcessor final : public PolyInstrument {
public:
    enum { kAttack = 0, kDecay, kSustain, kRelease, kMaxVoices };

    int output_channels(std::span<const int>) const override { return 1; }

    void set_source_buffer(AudioBuffer buffer) override {
        if (buffer.frames() < 4)
            throw Error(ErrorCode::ValidationError, "wavetable needs at least 4 frames");
        PolyInstrument::set_source_buffer(std::move(buffer));
    }

protected:
    void configure(const PrepareInfo& info) override {
        const ParamResolver& p = *info.params;
        amp_ = {p.scalar(kAttack), p.scalar(kDecay), p.scalar(kSustain), p.scalar(kRelease)};
        if (source_.frames() < 4)
            throw Error(ErrorCode::ValidationError, "wavetable synth has no table loaded");
    }

    int max_voices_index() const override { return kMaxVoices; }

    void start_voice(Voice& v, const ScheduledEvent& ev) override {
        v.velocity = ev.velocity;
        v.position = 0.0;
        const double freq = 440.0 * std::exp2((static_cast<double>(v.note) - 69.0) / 12.0);
        v.increment = freq * static_cast<double>(source_.frames()) / sr_;
        v.amp_env.configure(amp_, sr_);
        v.amp_env.note_on();
    }

    void tick_voice(Voice& v, double* acc, int) override {
        const auto table_len = static_cast<double>(source_.frames());
        const float* table = source_.channel(0);
        const double gain = (static_cast<double>(v.velocity) / 127.0) * v.amp_env.tick();

        const auto i = static_cast<int64_t>(v.position);
        const double frac = v.position - static_cast<double>(i);
        const double a = table[i];
        const double b = table[(i + 1) % source_.frames()];
        acc[0] += gain * (a + frac * (b - a));

        v.position += v.increment;
        while (v.position >= table_len)
            v.position -= table_len;
        if (v.amp_env.idle())
            v.active = false;
    }

private:
    AdsrParams amp_;
};

} // namespace

ParamSchema sampler_schema() {
    return ParamSchema({
        {"root_note", 60.0, 0.0, 127.0, false},
        {"attack_s", 0.0, 0.0, 60.0, false},
        {"decay_s", 0.0, 0.0, 60.0, false},
        {"sustain_level", 1.0, 0.0, 1.0, false},
        {"release_s", 0.0, 0.0, 60.0, false},
        {"filter_attack_s", 0.0, 0.0, 60.0, false},
        {"filter_decay_s", 0.0, 0.0, 60.0, false},
        {"filter_sustain_level", 1.0, 0.0, 1.0, false},
        {"filter_release_s", 0.0, 0.0, 60.0, false},
        {"filter_base_hz", 100000.0, 10.0, 100000.0, false},
        {"filter_depth_hz", 0.0, -50000.0, 50000.0, false},
        {"max_voices", 16.0, 1.0, 64.0, false},
    });
}

ParamSchema wavetable_schema() {
    return ParamSchema({
        {"attack_s", 0.0, 0.0, 60.0, false},
        {"decay_s", 0.0, 0.0, 60.0, false},
        {"sustain_level", 1.0, 0.0, 1.0, false},
        {"release_s", 0.0, 0.0, 60.0, false},
        {"max_voices", 16.0, 1.0, 64.0, false},
    });
}

std::unique_ptr<Processor> make_sampler_processor() {
    return std::make_unique<SamplerProcessor>();
}

std::unique_ptr<Processor> make_wavetable_processor() {
    return std::make_unique<WavetableProcessor>();
}

} // namespace dawkit
