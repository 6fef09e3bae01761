#include "dawkit/playback.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "dawkit/resample.hpp"
#include "dawkit/stretch.hpp"
#include "dawkit/warp.hpp"

namespace dawkit {

namespace {

enum { kAtBeats = 0, kTranspose = 1 };

ParamSchema clip_schema() {
    return ParamSchema({
        {"at_beats", 0.0, 0.0, 1e6, false},
        {"transpose_semitones", 0.0, -48.0, 48.0, false},
    });
}

/// Clip playback base: both kinds prerender their whole timeline at prepare
/// (the render duration is known up front) and stream blocks out of it, so
/// output can never depend on block size.
class ClipPlaybackBase : public Processor, public SourceBufferUser {
public:
    void set_source_buffer(AudioBuffer buffer) override { source_ = std::move(buffer); }
    const AudioBuffer* source_buffer() const override {
        return source_.frames() > 0 ? &source_ : nullptr;
    }

    int output_channels(std::span<const int>) const override {
        if (source_.frames() == 0)
            throw Error(ErrorCode::ValidationError, "playback node has no audio loaded");
        return source_.channels();
    }

    void prepare(const PrepareInfo& info) override {
        if (source_.frames() == 0)
            throw Error(ErrorCode::ValidationError, "playback node has no audio loaded");
        timeline_ = AudioBuffer(source_.channels(), info.total_frames, info.sample_rate);
        render_timeline(info);
    }

    void process(ProcessContext& ctx) override {
        for (int c = 0; c < ctx.out->channels(); ++c)
            std::memcpy(ctx.out->channel(c), timeline_.channel(c) + ctx.start_frame,
                        static_cast<size_t>(ctx.frames) * sizeof(float));
    }

protected:
    virtual void render_timeline(const PrepareInfo& info) = 0;

    /// Mixes `audio` into the timeline starting at `at_frame`.
    void paste(const AudioBuffer& audio, int64_t at_frame) {
        const int64_t n = std::min(audio.frames(), timeline_.frames() - at_frame);
        for (int c = 0; c < timeline_.channels(); ++c) {
            float* dst = timeline_.channel(c) + at_frame;
            const float* src = audio.channel(std::min(c, audio.channels() - 1));
            for (int64_t i = 0; i < n; ++i)
                dst[i] += src[i];
        }
    }

    AudioBuffer source_;
    AudioBuffer timeline_;
};

/// Raw playback: the source at rate 2^(transpose/12) from a timeline beat.
class PlaybackProcessor final : public ClipPlaybackBase {
protected:
    void render_timeline(const PrepareInfo& info) override {
        const double at_beats = info.params->scalar(kAtBeats);
        const double transpose = info.params->scalar(kTranspose);
        const double rate = std::exp2(transpose / 12.0);
        const int64_t at_frame =
            std::llround(at_beats * (60.0 / info.bpm) * info.sample_rate);
        if (at_frame >= info.total_frames)
            return;
        if (rate == 1.0) {
            paste(source_, at_frame);
        } else {
            paste(resample_by_factor(source_, 1.0 / rate), at_frame);
        }
    }
};

/// Warped playback: the clip's markers map beats to source time; each
/// marker-delimited segment is stretched by segment_tempo / engine_bpm and
/// placed back on the beat grid.
class PlaybackWarpProcessor final : public ClipPlaybackBase, public ClipUser {
public:
    void set_clip(ClipInfo clip) override { clip_ = std::move(clip); }
    void set_placements(std::vector<TimelinePlacement> placements) override {
        placements_ = std::move(placements);
    }
    const ClipInfo& clip() const override { return clip_; }
    const std::vector<TimelinePlacement>& placements() const override { return placements_; }

protected:
    void render_timeline(const PrepareInfo& info) override {
        clip_.validate();
        std::vector<TimelinePlacement> placements = placements_;
        if (placements.empty())
            placements.push_back(
                {info.params->scalar(kAtBeats), info.params->scalar(kTranspose)});
        for (const auto& p : placements)
            render_placement(info, p);
    }

private:
    void render_placement(const PrepareInfo& info, const TimelinePlacement& placement) {
        const double spb = 60.0 / info.bpm;  // engine seconds per beat
        const double sr = info.sample_rate;
        const double pitch_ratio = std::exp2(placement.transpose_semitones / 12.0);

        if (!clip_.warp_on) {
            // markers ignored: raw samples at the transpose rate
            const int64_t at_frame = std::llround(placement.at_beats * spb * sr);
            if (at_frame >= info.total_frames)
                return;
            if (pitch_ratio == 1.0)
                paste(source_, at_frame);
            else
                paste(resample_by_factor(source_, 1.0 / pitch_ratio), at_frame);
            return;
        }

        const double source_len_s = static_cast<double>(source_.frames()) / sr;
        const double source_end_beats = seconds_to_beats(clip_, source_len_s);
        const double render_beats = (static_cast<double>(info.total_frames) / sr) / spb;
        double remaining = render_beats - placement.at_beats;
        if (remaining <= 0.0)
            return;

        const double hard_end = std::min(clip_.end_marker, source_end_beats);
        double b = clip_.start_marker;
        double covered = 0.0;  // beats of timeline already produced
        constexpr double kEps = 1e-9;

        while (remaining > kEps) {
            const double limit = clip_.loop_on ? std::min(clip_.loop_end, hard_end) : hard_end;
            if (b >= limit - kEps) {
                if (!clip_.loop_on || clip_.loop_start >= limit - kEps)
                    break;
                b = clip_.loop_start;
                continue;
            }
            // next marker boundary splits the segment (tempo is constant
            // in between)
            double seg_end = limit;
            for (const auto& m : clip_.markers) {
                if (m.beats > b + kEps && m.beats < seg_end)
                    seg_end = m.beats;
            }
            const double step = std::min(seg_end - b, remaining);

            const double s0 = beats_to_seconds(clip_, b);
            const double s1 = beats_to_seconds(clip_, b + step);
            const int64_t f0 = std::llround(s0 * sr);
            const int64_t f1 = std::llround(s1 * sr);
            double time_ratio = segment_tempo(clip_, b) / info.bpm;
            time_ratio = std::clamp(time_ratio, 0.125, 8.0);

            if (f1 > f0 && f0 < source_.frames()) {
                AudioBuffer piece(source_.channels(), f1 - f0, sr);
                const int64_t avail = std::min(f1, source_.frames()) - f0;
                for (int c = 0; c < source_.channels(); ++c)
                    std::memcpy(piece.channel(c), source_.channel(c) + f0,
                                static_cast<size_t>(std::max<int64_t>(avail, 0)) * sizeof(float));
                const int64_t at_frame =
                    std::llround((placement.at_beats + covered) * spb * sr);
                if (time_ratio == 1.0 && pitch_ratio == 1.0)
                    paste(piece, at_frame);
                else
                    paste(stretch(piece, time_ratio, pitch_ratio), at_frame);
            }

            b += step;
            covered += step;
            remaining -= step;
        }
    }

    ClipInfo clip_;
    std::vector<TimelinePlacement> placements_;
};

} // namespace

ParamSchema playback_schema() { return clip_schema(); }
ParamSchema playback_warp_schema() { return clip_schema(); }

std::unique_ptr<Processor> make_playback_processor() {
    return std::make_unique<PlaybackProcessor>();
}

std::unique_ptr<Processor> make_playback_warp_processor() {
    return std::make_unique<PlaybackWarpProcessor>();
}

} // namespace dawkit
