#include "dawkit/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "dawkit/resample.hpp"

namespace dawkit {

Graph::Graph(double sample_rate, int block_size, double bpm)
    : sample_rate_(sample_rate), block_size_(block_size), bpm_(bpm) {
    if (!(sample_rate > 0.0))
        throw Error(ErrorCode::ValidationError, "sample_rate must be > 0");
    if (block_size < 1)
        throw Error(ErrorCode::ValidationError, "block_size must be >= 1");
    if (!(bpm > 0.0))
        throw Error(ErrorCode::ValidationError, "bpm must be > 0");
}

void Graph::set_block_size(int block_size) {
    if (block_size < 1)
        throw Error(ErrorCode::ValidationError, "block_size must be >= 1");
    block_size_ = block_size;
}

void Graph::add_node(const std::string& kind, const std::string& name,
                     const std::vector<std::string>& inputs,
                     const std::map<std::string, double>& params) {
    if (index_.count(name))
        throw Error(ErrorCode::DuplicateName, name);
    const KindInfo* info = find_kind(kind);
    if (!info)
        throw Error(ErrorCode::UnknownKind, kind);
    for (const auto& in : inputs)
        if (!index_.count(in))
            throw Error(ErrorCode::UnknownInput, in + " (input of " + name + ")");
    const int n = static_cast<int>(inputs.size());
    if (n < info->arity.min_inputs || n > info->arity.max_inputs)
        throw Error(ErrorCode::ArityMismatch,
                    name + ": kind '" + kind + "' takes " + std::to_string(info->arity.min_inputs) +
                        ".." + std::to_string(info->arity.max_inputs) + " inputs, got " +
                        std::to_string(n));

    auto node = std::make_unique<ProcessorNode>();
    node->name = name;
    node->kind = kind;
    node->inputs = inputs;
    node->schema = info->make_schema(n);
    node->processor = info->make(n);

    index_[name] = static_cast<int>(nodes_.size());
    nodes_.push_back(std::move(node));
    for (const auto& [pname, value] : params)
        set_parameter(name, pname, value);
}

ProcessorNode& Graph::require_node(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end())
        throw Error(ErrorCode::UnknownNode, name);
    return *nodes_[static_cast<size_t>(it->second)];
}

void Graph::set_parameter(const std::string& node_name, const std::string& param, double value) {
    ProcessorNode& n = require_node(node_name);
    const int idx = n.schema.index_of(param);
    if (idx < 0)
        throw Error(ErrorCode::UnknownParameter, param + " (node " + node_name + ")");
    const ParamSpec& spec = n.schema.at(idx);
    if (!(value >= spec.min && value <= spec.max))
        throw Error(ErrorCode::OutOfRange,
                    param + "=" + std::to_string(value) + " outside [" + std::to_string(spec.min) +
                        ", " + std::to_string(spec.max) + "] (node " + node_name + ")");
    n.params[param] = value;
}

void Graph::set_automation(const std::string& node_name, const std::string& param,
                           ControlSignal signal) {
    ProcessorNode& n = require_node(node_name);
    const int idx = n.schema.index_of(param);
    if (idx < 0)
        throw Error(ErrorCode::UnknownParameter, param + " (node " + node_name + ")");
    if (!n.schema.at(idx).automatable)
        throw Error(ErrorCode::ValidationError,
                    param + " is not automatable (node " + node_name + ")");
    if (signal.values.empty())
        throw Error(ErrorCode::ValidationError, "control signal must be non-empty");
    n.automations[param] = std::move(signal);
}

void Graph::clear_automation(const std::string& node_name, const std::string& param) {
    require_node(node_name).automations.erase(param);
}

void Graph::set_record(const std::string& node_name, bool on) {
    require_node(node_name).record = on;
}

void Graph::set_inputs(const std::string& node_name, const std::vector<std::string>& inputs) {
    ProcessorNode& n = require_node(node_name);
    for (const auto& in : inputs)
        if (!index_.count(in))
            throw Error(ErrorCode::UnknownInput, in + " (input of " + node_name + ")");
    const KindInfo* info = find_kind(n.kind);
    const int count = static_cast<int>(inputs.size());
    if (count < info->arity.min_inputs || count > info->arity.max_inputs)
        throw Error(ErrorCode::ArityMismatch, node_name);
    n.inputs = inputs;
}

void Graph::set_source_buffer(const std::string& node_name, AudioBuffer buffer) {
    ProcessorNode& n = require_node(node_name);
    auto* user = dynamic_cast<SourceBufferUser*>(n.processor.get());
    if (!user)
        throw Error(ErrorCode::ValidationError,
                    "kind '" + n.kind + "' takes no source buffer (node " + node_name + ")");
    if (buffer.frames() == 0)
        throw Error(ErrorCode::ValidationError, "source buffer is empty (node " + node_name + ")");
    if (buffer.channels() > 2)
        throw Error(ErrorCode::ValidationError,
                    "source buffers are limited to 2 channels (node " + node_name + ")");
    if (buffer.sample_rate() != sample_rate_)
        buffer = resample(buffer, sample_rate_);
    user->set_source_buffer(std::move(buffer));
}

void Graph::set_notes(const std::string& node_name, NoteSequence sequence, bool beats_mode) {
    ProcessorNode& n = require_node(node_name);
    auto* consumer = dynamic_cast<NoteConsumer*>(n.processor.get());
    if (!consumer)
        throw Error(ErrorCode::ValidationError,
                    "kind '" + n.kind + "' takes no note sequence (node " + node_name + ")");
    consumer->set_notes(std::move(sequence), beats_mode);
}

void Graph::set_clip(const std::string& node_name, ClipInfo clip) {
    ProcessorNode& n = require_node(node_name);
    auto* user = dynamic_cast<ClipUser*>(n.processor.get());
    if (!user)
        throw Error(ErrorCode::ValidationError,
                    "kind '" + n.kind + "' takes no clip (node " + node_name + ")");
    clip.validate();
    user->set_clip(std::move(clip));
}

void Graph::set_placements(const std::string& node_name, std::vector<TimelinePlacement> placements) {
    ProcessorNode& n = require_node(node_name);
    auto* user = dynamic_cast<ClipUser*>(n.processor.get());
    if (!user)
        throw Error(ErrorCode::ValidationError,
                    "kind '" + n.kind + "' takes no clip placements (node " + node_name + ")");
    for (const auto& p : placements)
        if (p.at_beats < 0.0)
            throw Error(ErrorCode::ValidationError,
                        "placement at_beats must be >= 0 (node " + node_name + ")");
    user->set_placements(std::move(placements));
}

int Graph::node_index(const std::string& name) const {
    auto it = index_.find(name);
    return it == index_.end() ? -1 : it->second;
}

std::vector<int> Graph::schedule_indices() const {
    const size_t count = nodes_.size();
    std::vector<int> indegree(count, 0);
    std::vector<std::vector<int>> dependents(count);
    for (size_t i = 0; i < count; ++i) {
        for (const auto& in : nodes_[i]->inputs) {
            const int src = node_index(in);
            if (src < 0)
                throw Error(ErrorCode::UnknownInput, in);
            dependents[static_cast<size_t>(src)].push_back(static_cast<int>(i));
            ++indegree[i];
        }
    }

    // Kahn's algorithm, always taking the lowest insertion index so the
    // schedule is deterministic and ties break by insertion order.
    std::vector<int> order;
    order.reserve(count);
    std::vector<bool> done(count, false);
    for (size_t emitted = 0; emitted < count;) {
        int pick = -1;
        for (size_t i = 0; i < count; ++i) {
            if (!done[i] && indegree[i] == 0) {
                pick = static_cast<int>(i);
                break;
            }
        }
        if (pick < 0) {
            // the remaining nodes contain a cycle; walk input edges to name it
            std::vector<int> path;
            std::vector<int> mark(count, -1);
            int u = -1;
            for (size_t i = 0; i < count; ++i)
                if (!done[i]) { u = static_cast<int>(i); break; }
            while (mark[static_cast<size_t>(u)] < 0) {
                mark[static_cast<size_t>(u)] = static_cast<int>(path.size());
                path.push_back(u);
                for (const auto& in : nodes_[static_cast<size_t>(u)]->inputs) {
                    const int src = node_index(in);
                    if (!done[static_cast<size_t>(src)]) {
                        u = src;
                        break;
                    }
                }
            }
            std::string names;
            for (size_t i = static_cast<size_t>(mark[static_cast<size_t>(u)]); i < path.size(); ++i)
                names += (names.empty() ? "" : " -> ") + nodes_[static_cast<size_t>(path[i])]->name;
            throw Error(ErrorCode::CycleDetected, names);
        }
        done[static_cast<size_t>(pick)] = true;
        order.push_back(pick);
        ++emitted;
        for (int d : dependents[static_cast<size_t>(pick)])
            --indegree[static_cast<size_t>(d)];
    }
    return order;
}

std::vector<std::string> Graph::compile() const {
    if (nodes_.empty())
        throw Error(ErrorCode::ValidationError, "graph is empty");
    std::vector<std::string> names;
    for (int i : schedule_indices())
        names.push_back(nodes_[static_cast<size_t>(i)]->name);
    return names;
}

RenderResult Graph::render(double duration_seconds) {
    if (!(duration_seconds > 0.0) || !std::isfinite(duration_seconds))
        throw Error(ErrorCode::InvalidDuration, std::to_string(duration_seconds));
    if (nodes_.empty())
        throw Error(ErrorCode::ValidationError, "graph is empty");

    const std::vector<int> order = schedule_indices();
    const int64_t total_frames =
        static_cast<int64_t>(std::ceil(duration_seconds * sample_rate_));

    PrepareInfo info{sample_rate_, block_size_, bpm_, total_frames};

    const size_t count = nodes_.size();
    std::vector<ParamResolver> resolvers(count);
    std::vector<int> channels(count, 1);
    std::vector<AudioBuffer> blocks(count);

    for (int idx : order) {
        ProcessorNode& n = *nodes_[static_cast<size_t>(idx)];
        ParamResolver& r = resolvers[static_cast<size_t>(idx)];
        r.reset(&n.schema);
        for (const auto& [pname, value] : n.params)
            r.set_scalar(n.schema.index_of(pname), value);
        for (const auto& [pname, signal] : n.automations)
            r.set_signal(n.schema.index_of(pname), &signal);

        std::vector<int> in_channels;
        for (const auto& in : n.inputs)
            in_channels.push_back(channels[static_cast<size_t>(node_index(in))]);
        info.params = &r;
        n.processor->prepare(info);
        channels[static_cast<size_t>(idx)] =
            n.processor->output_channels(std::span<const int>(in_channels));
        blocks[static_cast<size_t>(idx)] =
            AudioBuffer(channels[static_cast<size_t>(idx)], block_size_, sample_rate_);
    }

    RenderResult result;
    std::vector<AudioBuffer*> recorded(count, nullptr);
    for (int idx : order) {
        const ProcessorNode& n = *nodes_[static_cast<size_t>(idx)];
        if (n.record) {
            auto [it, inserted] = result.emplace(
                n.name, AudioBuffer(channels[static_cast<size_t>(idx)], total_frames, sample_rate_));
            recorded[static_cast<size_t>(idx)] = &it->second;
        }
    }

    std::vector<const AudioBuffer*> input_ptrs;
    for (int64_t start = 0; start < total_frames; start += block_size_) {
        const int frames = static_cast<int>(std::min<int64_t>(block_size_, total_frames - start));
        for (int idx : order) {
            ProcessorNode& n = *nodes_[static_cast<size_t>(idx)];
            input_ptrs.clear();
            for (const auto& in : n.inputs)
                input_ptrs.push_back(&blocks[static_cast<size_t>(node_index(in))]);

            ProcessContext ctx;
            ctx.start_frame = start;
            ctx.frames = frames;
            ctx.inputs = std::span<const AudioBuffer* const>(input_ptrs);
            ctx.out = &blocks[static_cast<size_t>(idx)];
            ctx.params = &resolvers[static_cast<size_t>(idx)];
            n.processor->process(ctx);

            if (AudioBuffer* dst = recorded[static_cast<size_t>(idx)]) {
                for (int c = 0; c < dst->channels(); ++c)
                    std::memcpy(dst->channel(c) + start, ctx.out->channel(c),
                                static_cast<size_t>(frames) * sizeof(float));
            }
        }
    }
    return result;
}

bool Graph::has_node(const std::string& name) const { return index_.count(name) != 0; }

const ProcessorNode& Graph::node(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end())
        throw Error(ErrorCode::UnknownNode, name);
    return *nodes_[static_cast<size_t>(it->second)];
}

ProcessorNode& Graph::node(const std::string& name) { return require_node(name); }

std::vector<std::string> Graph::node_names() const {
    std::vector<std::string> names;
    names.reserve(nodes_.size());
    for (const auto& n : nodes_)
        names.push_back(n->name);
    return names;
}

} // namespace dawkit
