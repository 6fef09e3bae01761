#pragma once

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "dawkit/audio_buffer.hpp"
#include "dawkit/note.hpp"
#include "dawkit/params.hpp"
#include "dawkit/processor.hpp"
#include "dawkit/warp.hpp"

namespace dawkit {

/// A named processor with typed parameters, input edges and a record flag.
struct ProcessorNode {
    std::string name;
    std::string kind;
    std::vector<std::string> inputs;
    bool record = false;

    std::map<std::string, double> params;             // scalar overrides
    std::map<std::string, ControlSignal> automations; // signal overrides

    ParamSchema schema;                // instance schema (arity-dependent)
    std::unique_ptr<Processor> processor;
};

/// node name -> full-length buffer, one entry per node with record = true.
using RenderResult = std::map<std::string, AudioBuffer>;

/// The processor DAG plus engine settings. Construction and rendering are
/// single-threaded; a completed RenderResult is immutable and safe to move
/// across threads.
class Graph {
public:
    explicit Graph(double sample_rate = 44100.0, int block_size = 512, double bpm = 120.0);

    double sample_rate() const { return sample_rate_; }
    int block_size() const { return block_size_; }
    double bpm() const { return bpm_; }
    void set_block_size(int block_size);

    /// Appends a node. Inputs must already exist, so insertion order is a
    /// topological order by construction.
    void add_node(const std::string& kind, const std::string& name,
                  const std::vector<std::string>& inputs = {},
                  const std::map<std::string, double>& params = {});

    void set_parameter(const std::string& node, const std::string& param, double value);
    void set_automation(const std::string& node, const std::string& param, ControlSignal signal);
    void clear_automation(const std::string& node, const std::string& param);
    void set_record(const std::string& node, bool on);

    /// Rewires a node's inputs in place. Cycles created here surface as
    /// CycleDetected at the next compile.
    void set_inputs(const std::string& node, const std::vector<std::string>& inputs);

    /// Attaches source material; the buffer is resampled to the engine rate
    /// if needed before it enters the node.
    void set_source_buffer(const std::string& node, AudioBuffer buffer);

    void set_notes(const std::string& node, NoteSequence sequence, bool beats_mode);
    void set_clip(const std::string& node, ClipInfo clip);
    void set_placements(const std::string& node, std::vector<TimelinePlacement> placements);

    /// Deterministic execution schedule: a topological order of the edge
    /// relation with ties broken by insertion order.
    std::vector<std::string> compile() const;

    /// Renders ceil(duration * sample_rate) frames block by block and returns
    /// full-length copies of every recorded node's output. Bit-identical for
    /// identical graphs across runs and block sizes.
    RenderResult render(double duration_seconds);

    bool has_node(const std::string& name) const;
    const ProcessorNode& node(const std::string& name) const;
    ProcessorNode& node(const std::string& name);
    const std::vector<std::unique_ptr<ProcessorNode>>& nodes() const { return nodes_; }
    std::vector<std::string> node_names() const;

private:
    ProcessorNode& require_node(const std::string& name);
    int node_index(const std::string& name) const;
    std::vector<int> schedule_indices() const;

    double sample_rate_;
    int block_size_;
    double bpm_;
    std::vector<std::unique_ptr<ProcessorNode>> nodes_;
    std::map<std::string, int> index_; // name -> insertion index
};

} // namespace dawkit
