#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dawkit/audio_buffer.hpp"
#include "dawkit/params.hpp"

namespace dawkit {

struct PrepareInfo {
    double sample_rate = 44100.0;
    int block_size = 512;
    double bpm = 120.0;
    int64_t total_frames = 0;
    const ParamResolver* params = nullptr;  // scalar config reads at prepare
};

struct ProcessContext {
    int64_t start_frame = 0;                       // absolute frame of block start
    int frames = 0;                                // valid frames in this block
    std::span<const AudioBuffer* const> inputs;    // producers' current block buffers
    AudioBuffer* out = nullptr;
    const ParamResolver* params = nullptr;
};

/// A processor instance owned by one graph node. State (phase, filter memory,
/// detector envelope) is reset in prepare() so repeated renders of an
/// unchanged graph are bit-identical.
class Processor {
public:
    virtual ~Processor() = default;

    virtual void prepare(const PrepareInfo& info) { (void)info; }
    virtual void process(ProcessContext& ctx) = 0;

    /// Output channel count given the resolved input channel counts.
    virtual int output_channels(std::span<const int> input_channels) const {
        return input_channels.empty() ? 1 : input_channels[0];
    }
};

/// Implemented by processors that play caller-provided audio (sampler sample,
/// wavetable, clip playback). Buffers must already be at the engine rate;
/// Graph::set_source_buffer resamples on the way in.
class SourceBufferUser {
public:
    virtual ~SourceBufferUser() = default;
    virtual void set_source_buffer(AudioBuffer buffer) = 0;
    virtual const AudioBuffer* source_buffer() const = 0;
};

struct ArityRange {
    int min_inputs = 0;
    int max_inputs = 0;
};

/// Static description of a processor kind: legal input arity and the
/// parameter schema for a node with n_inputs inputs.
struct KindInfo {
    ArityRange arity;
    ParamSchema (*make_schema)(int n_inputs);
    std::unique_ptr<Processor> (*make)(int n_inputs);
};

/// Registry of built-in processor kinds. Kind names are part of the
/// project-file contract.
const KindInfo* find_kind(const std::string& kind);
std::vector<std::string> kind_names();

} // namespace dawkit
