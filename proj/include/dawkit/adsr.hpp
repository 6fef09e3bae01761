#pragma once

#include <cmath>
#include <cstdint>

namespace dawkit {

/// Piecewise-linear envelope parameters. Zero-duration segments jump
/// instantaneously.
struct AdsrParams {
    double attack_s = 0.0;
    double decay_s = 0.0;
    double sustain_level = 1.0;
    double release_s = 0.0;
};

/// Linear ADSR: rise 0 to 1 over attack, fall 1 to sustain over decay, hold
/// while the gate is on, fall from the current value to 0 over release after
/// gate off. Frame counters are integers so renders are bit-deterministic.
class AdsrEnvelope {
public:
    enum class Stage { Idle, Attack, Decay, Sustain, Release };

    void configure(const AdsrParams& params, double sample_rate) {
        attack_frames_ = std::llround(params.attack_s * sample_rate);
        decay_frames_ = std::llround(params.decay_s * sample_rate);
        release_frames_ = std::llround(params.release_s * sample_rate);
        sustain_ = params.sustain_level;
        if (sustain_ < 0.0) sustain_ = 0.0;
        if (sustain_ > 1.0) sustain_ = 1.0;
        stage_ = Stage::Idle;
        k_ = 0;
        release_from_ = 0.0;
    }

    void note_on() {
        k_ = 0;
        if (attack_frames_ > 0)
            stage_ = Stage::Attack;
        else if (decay_frames_ > 0)
            stage_ = Stage::Decay;
        else
            stage_ = Stage::Sustain;
    }

    void note_off() {
        if (stage_ == Stage::Idle || stage_ == Stage::Release)
            return;
        release_from_ = current_value();
        k_ = 0;
        stage_ = (release_frames_ > 0) ? Stage::Release : Stage::Idle;
    }

    /// Value for the current frame; advances to the next.
    double tick() {
        const double v = current_value();
        advance();
        return v;
    }

    double current_value() const {
        switch (stage_) {
            case Stage::Attack:
                return static_cast<double>(k_) / static_cast<double>(attack_frames_);
            case Stage::Decay:
                return 1.0 - (1.0 - sustain_) * static_cast<double>(k_) /
                                 static_cast<double>(decay_frames_);
            case Stage::Sustain:
                return sustain_;
            case Stage::Release:
                return release_from_ *
                       (1.0 - static_cast<double>(k_) / static_cast<double>(release_frames_));
            case Stage::Idle:
                return 0.0;
        }
        return 0.0;
    }

    bool idle() const { return stage_ == Stage::Idle; }
    Stage stage() const { return stage_; }

private:
    void advance() {
        switch (stage_) {
            case Stage::Attack:
                if (++k_ >= attack_frames_) {
                    k_ = 0;
                    stage_ = (decay_frames_ > 0) ? Stage::Decay : Stage::Sustain;
                }
                break;
            case Stage::Decay:
                if (++k_ >= decay_frames_) {
                    k_ = 0;
                    stage_ = Stage::Sustain;
                }
                break;
            case Stage::Sustain:
                break;
            case Stage::Release:
                if (++k_ >= release_frames_) {
                    k_ = 0;
                    stage_ = Stage::Idle;
                }
                break;
            case Stage::Idle:
                break;
        }
    }

    int64_t attack_frames_ = 0;
    int64_t decay_frames_ = 0;
    int64_t release_frames_ = 0;
    double sustain_ = 1.0;
    double release_from_ = 0.0;
    Stage stage_ = Stage::Idle;
    int64_t k_ = 0;
};

} // namespace dawkit
