#pragma once

#include <memory>
#include <string>

#include "dawkit/graph.hpp"
#include "dawkit/pairing.hpp"

namespace dawkit {

/// A declarative project: engine settings plus the constructed graph.
struct Project {
    std::unique_ptr<Graph> graph;
    double duration_seconds = 1.0;
};

struct RenderOverrides {
    double sample_rate = 0.0;  // 0 keeps the project value
    int block_size = 0;
};

/// Builds a Graph from a project file. Validation errors carry the node name
/// and the file path; parse errors carry the line.
Project load_project(const std::string& path, const RenderOverrides& overrides = {});

/// Serializes a graph back to project JSON. Nodes holding source audio write
/// it into asset_dir as `<node>_source.wav`.
std::string dump_project(const Graph& graph, double duration_seconds,
                         const std::string& asset_dir = "");

/// Renders a project and writes one `<node>.wav` per recorded node into
/// out_dir. Returns the written paths.
std::vector<std::string> render_project(const std::string& project_path, const std::string& out_dir,
                                        const RenderOverrides& overrides = {});

/// Stem/bus consistency check: for every recorded `add` node whose inputs are
/// all recorded, compares the bus against the per-frame sum of its inputs.
/// Returns the largest absolute deviation found.
double check_sum(const std::string& project_path, double tolerance = 1e-6);

/// Writes a mashup project pairing one acapella with one instrumental: the
/// engine runs at the instrumental's tempo and the acapella is warped to it.
std::string emit_pair_project(const StemDescriptor& acapella, const StemDescriptor& instrumental,
                              const std::string& out_path);

} // namespace dawkit
