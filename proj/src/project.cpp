#include "dawkit/project.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dawkit/instruments.hpp"
#include "dawkit/midi.hpp"
#include "dawkit/wav.hpp"

namespace dawkit {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json parse_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    try {
        return json::parse(ss.str());
    } catch (const json::parse_error& e) {
        // nlohmann's message carries the line/column position
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
}

std::string resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path.string() : (base / path).string();
}

struct Asset {
    AudioBuffer buffer;
    ClipInfo clip;
    bool has_clip = false;
};

Asset load_asset(const json& spec, const std::string& name, const fs::path& base) {
    Asset asset;
    if (spec.contains("path")) {
        const std::string path = resolve(base, spec.at("path").get<std::string>());
        if (!fs::exists(path))
            throw Error(ErrorCode::ValidationError, "asset \"" + name + "\": missing file " + path);
        asset.buffer = read_wav_file(path).buffer;
        // sidecar: explicit "warp" key or the conventional <audio>.warp.json
        std::string sidecar;
        if (spec.contains("warp"))
            sidecar = resolve(base, spec.at("warp").get<std::string>());
        else if (fs::exists(path + ".warp.json"))
            sidecar = path + ".warp.json";
        if (!sidecar.empty()) {
            asset.clip = load_warp_sidecar(sidecar);
            asset.has_clip = true;
        }
    } else if (spec.contains("data")) {
        const auto& data = spec.at("data");
        if (!data.is_array() || data.empty())
            throw Error(ErrorCode::ValidationError,
                        "asset \"" + name + "\": data must be an array of channel arrays");
        const double sr = spec.value("sample_rate", 44100.0);
        const auto channels = static_cast<int>(data.size());
        const auto frames = static_cast<int64_t>(data.at(0).size());
        asset.buffer = AudioBuffer(channels, frames, sr);
        for (int c = 0; c < channels; ++c) {
            const auto& ch = data.at(static_cast<size_t>(c));
            if (static_cast<int64_t>(ch.size()) != frames)
                throw Error(ErrorCode::ValidationError,
                            "asset \"" + name + "\": ragged channel data");
            for (int64_t i = 0; i < frames; ++i)
                asset.buffer.channel(c)[i] = ch.at(static_cast<size_t>(i)).get<float>();
        }
    } else {
        throw Error(ErrorCode::ValidationError,
                    "asset \"" + name + "\" needs a \"path\" or inline \"data\"");
    }
    if (!asset.has_clip && spec.contains("bpm")) {
        // no sidecar: a single-marker clip at the stated source tempo
        asset.clip.markers = {{0.0, 0.0}};
        asset.clip.source_bpm = spec.at("bpm").get<double>();
        asset.has_clip = true;
    }
    return asset;
}

ControlSignal load_automation(const json& spec, const fs::path& base, const std::string& node,
                              const std::string& param) {
    ControlSignal signal;
    if (spec.is_array()) {
        signal.values.reserve(spec.size());
        for (const auto& v : spec)
            signal.values.push_back(v.get<double>());
        return signal;
    }
    if (!spec.is_object())
        throw Error(ErrorCode::ValidationError,
                    "node \"" + node + "\": automation of " + param +
                        " must be an array or an object");
    signal.hold_last = spec.value("hold_last", true);
    if (spec.contains("values")) {
        for (const auto& v : spec.at("values"))
            signal.values.push_back(v.get<double>());
    } else if (spec.contains("file")) {
        // raw little-endian float32
        const std::string path = resolve(base, spec.at("file").get<std::string>());
        std::ifstream in(path, std::ios::binary);
        if (!in)
            throw Error(ErrorCode::ValidationError,
                        "node \"" + node + "\": cannot open automation file " + path);
        std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                                std::istreambuf_iterator<char>());
        signal.values.resize(bytes.size() / 4);
        for (size_t i = 0; i < signal.values.size(); ++i) {
            float f;
            std::memcpy(&f, bytes.data() + i * 4, 4);
            signal.values[i] = f;
        }
    } else {
        throw Error(ErrorCode::ValidationError,
                    "node \"" + node + "\": automation of " + param +
                        " needs \"values\" or \"file\"");
    }
    return signal;
}

// Scalar params may be given as numbers or, for biquad mode, as a string.
double param_value(const json& v) {
    if (v.is_string()) {
        const std::string s = v.get<std::string>();
        if (s == "lowpass") return 0.0;
        if (s == "highpass") return 1.0;
        if (s == "bandpass") return 2.0;
        throw Error(ErrorCode::ValidationError, "unknown mode \"" + s + "\"");
    }
    return v.get<double>();
}

} // namespace

Project load_project(const std::string& path, const RenderOverrides& overrides) {
    const json j = parse_json_file(path);
    if (!j.is_object())
        throw Error(ErrorCode::ParseError, path + ": project must be a JSON object");
    const fs::path base = fs::path(path).parent_path();

    const double sample_rate =
        overrides.sample_rate > 0.0 ? overrides.sample_rate : j.value("sample_rate", 44100.0);
    const int block_size =
        overrides.block_size > 0 ? overrides.block_size : j.value("block_size", 512);
    const double bpm = j.value("bpm", 120.0);

    Project project;
    project.duration_seconds = j.value("duration_seconds", 1.0);
    project.graph = std::make_unique<Graph>(sample_rate, block_size, bpm);
    Graph& graph = *project.graph;

    std::map<std::string, Asset> assets;
    if (j.contains("assets")) {
        for (const auto& [name, spec] : j.at("assets").items())
            assets.emplace(name, load_asset(spec, name, base));
    }

    if (!j.contains("nodes") || !j.at("nodes").is_array())
        throw Error(ErrorCode::ValidationError, path + ": project needs a \"nodes\" array");

    for (const auto& nj : j.at("nodes")) {
        const std::string name = nj.value("name", "");
        if (name.empty())
            throw Error(ErrorCode::ValidationError, path + ": node without a name");
        try {
            const std::string kind = nj.value("kind", "");
            std::vector<std::string> inputs;
            if (nj.contains("inputs"))
                for (const auto& in : nj.at("inputs"))
                    inputs.push_back(in.get<std::string>());

            graph.add_node(kind, name, inputs);
            if (nj.contains("params"))
                for (const auto& [pname, pv] : nj.at("params").items())
                    graph.set_parameter(name, pname, param_value(pv));
            if (nj.contains("automation"))
                for (const auto& [pname, spec] : nj.at("automation").items())
                    graph.set_automation(name, pname, load_automation(spec, base, name, pname));
            graph.set_record(name, nj.value("record", false));

            if (nj.contains("asset")) {
                const std::string asset_name = nj.at("asset").get<std::string>();
                auto it = assets.find(asset_name);
                if (it == assets.end())
                    throw Error(ErrorCode::ValidationError, "unknown asset \"" + asset_name + "\"");
                graph.set_source_buffer(name, it->second.buffer);
                if (kind == "playback_warp") {
                    if (nj.contains("clip"))
                        graph.set_clip(name, parse_warp_sidecar(nj.at("clip").dump()));
                    else if (it->second.has_clip)
                        graph.set_clip(name, it->second.clip);
                }
            } else if (nj.contains("clip") && kind == "playback_warp") {
                throw Error(ErrorCode::ValidationError, "clip given but no asset");
            }

            if (nj.contains("placements")) {
                std::vector<TimelinePlacement> placements;
                for (const auto& pj : nj.at("placements"))
                    placements.push_back({pj.value("at_beats", 0.0),
                                          pj.value("transpose_semitones", 0.0)});
                graph.set_placements(name, placements);
            }

            if (nj.contains("midi")) {
                const auto& mj = nj.at("midi");
                const std::string midi_path = resolve(base, mj.at("path").get<std::string>());
                if (!fs::exists(midi_path))
                    throw Error(ErrorCode::ValidationError, "missing MIDI file " + midi_path);
                graph.set_notes(name, to_note_sequence(parse_smf_file(midi_path)),
                                mj.value("beats_mode", false));
            } else if (nj.contains("notes")) {
                NoteSequence seq;
                for (const auto& ev : nj.at("notes"))
                    seq.push_back(make_note(ev.at("note").get<int>(),
                                            ev.value("velocity", 100),
                                            ev.at("start").get<double>(),
                                            ev.at("duration").get<double>()));
                graph.set_notes(name, seq, nj.value("notes_in_beats", true));
            }
        } catch (const Error& e) {
            if (e.code() == ErrorCode::ValidationError || e.code() == ErrorCode::ParseError)
                throw Error(e.code(), std::string(e.what()) + " [node \"" + name + "\" in " + path + "]");
            throw Error(ErrorCode::ValidationError,
                        std::string(e.what()) + " [node \"" + name + "\" in " + path + "]");
        }
    }
    return project;
}

std::string dump_project(const Graph& graph, double duration_seconds,
                         const std::string& asset_dir) {
    json j;
    j["sample_rate"] = graph.sample_rate();
    j["block_size"] = graph.block_size();
    j["bpm"] = graph.bpm();
    j["duration_seconds"] = duration_seconds;
    json assets = json::object();
    json nodes = json::array();

    for (const auto& node : graph.nodes()) {
        json nj;
        nj["name"] = node->name;
        nj["kind"] = node->kind;
        if (!node->inputs.empty())
            nj["inputs"] = node->inputs;
        if (!node->params.empty()) {
            json params = json::object();
            for (const auto& [pname, value] : node->params)
                params[pname] = value;
            nj["params"] = params;
        }
        if (!node->automations.empty()) {
            json autos = json::object();
            for (const auto& [pname, signal] : node->automations)
                autos[pname] = {{"values", signal.values}, {"hold_last", signal.hold_last}};
            nj["automation"] = autos;
        }
        if (node->record)
            nj["record"] = true;

        if (const auto* src = dynamic_cast<const SourceBufferUser*>(node->processor.get());
            src && src->source_buffer()) {
            if (asset_dir.empty())
                throw Error(ErrorCode::ValidationError,
                            "dump_project needs an asset directory for node " + node->name);
            fs::create_directories(asset_dir);
            const std::string asset_name = node->name + "_source";
            const std::string wav_path =
                (fs::path(asset_dir) / (asset_name + ".wav")).string();
            write_wav_file(wav_path, *src->source_buffer(), WavEncoding::Float32);
            assets[asset_name] = {{"path", wav_path}};
            nj["asset"] = asset_name;
        }
        if (const auto* clip_user = dynamic_cast<const ClipUser*>(node->processor.get())) {
            nj["clip"] = json::parse(dump_warp_sidecar(clip_user->clip()));
            if (!clip_user->placements().empty()) {
                json pl = json::array();
                for (const auto& p : clip_user->placements())
                    pl.push_back({{"at_beats", p.at_beats},
                                  {"transpose_semitones", p.transpose_semitones}});
                nj["placements"] = pl;
            }
        }
        if (const auto* consumer = dynamic_cast<const NoteConsumer*>(node->processor.get());
            consumer && !consumer->notes().empty()) {
            json notes = json::array();
            const bool beats = consumer->notes_in_beats();
            for (const auto& ev : consumer->notes())
                notes.push_back({{"note", ev.note},
                                 {"velocity", ev.velocity},
                                 {"start", beats ? ev.start_beats : ev.start_seconds},
                                 {"duration", beats ? ev.duration_beats : ev.duration_seconds}});
            nj["notes"] = notes;
            nj["notes_in_beats"] = beats;
        }
        nodes.push_back(nj);
    }

    if (!assets.empty())
        j["assets"] = assets;
    j["nodes"] = nodes;
    return j.dump(2);
}

std::vector<std::string> render_project(const std::string& project_path, const std::string& out_dir,
                                        const RenderOverrides& overrides) {
    Project project = load_project(project_path, overrides);
    RenderResult result = project.graph->render(project.duration_seconds);
    fs::create_directories(out_dir);
    std::vector<std::string> written;
    for (const auto& [name, buffer] : result) {
        const std::string path = (fs::path(out_dir) / (name + ".wav")).string();
        write_wav_file(path, buffer, WavEncoding::Float32);
        written.push_back(path);
    }
    return written;
}

double check_sum(const std::string& project_path, double tolerance) {
    Project project = load_project(project_path);
    Graph& graph = *project.graph;
    RenderResult result = graph.render(project.duration_seconds);

    double worst = 0.0;
    bool checked_any = false;
    for (const auto& node : graph.nodes()) {
        if (node->kind != "add" || !node->record || !result.count(node->name))
            continue;
        bool all_recorded = true;
        for (const auto& in : node->inputs)
            all_recorded = all_recorded && result.count(in) > 0;
        if (!all_recorded || node->inputs.empty())
            continue;
        checked_any = true;

        ParamResolver resolver;
        resolver.reset(&node->schema);
        for (const auto& [pname, value] : node->params)
            resolver.set_scalar(node->schema.index_of(pname), value);
        for (const auto& [pname, signal] : node->automations)
            resolver.set_signal(node->schema.index_of(pname), &signal);

        const AudioBuffer& bus = result.at(node->name);
        for (int c = 0; c < bus.channels(); ++c) {
            for (int64_t n = 0; n < bus.frames(); ++n) {
                double sum = 0.0;
                for (size_t k = 0; k < node->inputs.size(); ++k) {
                    const AudioBuffer& stem = result.at(node->inputs[k]);
                    sum += resolver.get(static_cast<int>(k), n) *
                           stem.sample_adapted(c, n, bus.channels());
                }
                worst = std::max(worst, std::fabs(sum - static_cast<double>(bus.channel(c)[n])));
            }
        }
    }
    if (!checked_any)
        throw Error(ErrorCode::ValidationError,
                    project_path + ": no recorded add node with all inputs recorded");
    if (worst >= tolerance)
        throw Error(ErrorCode::ValidationError,
                    "bus deviates from stem sum by " + std::to_string(worst));
    return worst;
}

std::string emit_pair_project(const StemDescriptor& acapella, const StemDescriptor& instrumental,
                              const std::string& out_path) {
    const WavFile acap = read_wav_file(acapella.path);
    const WavFile instr = read_wav_file(instrumental.path);
    const double acap_dur =
        static_cast<double>(acap.buffer.frames()) / acap.buffer.sample_rate();
    const double instr_dur =
        static_cast<double>(instr.buffer.frames()) / instr.buffer.sample_rate();
    // warping the acapella to the instrumental's tempo rescales its length
    const double warped_acap_dur = acap_dur * acapella.bpm / instrumental.bpm;
    const double duration = std::min(warped_acap_dur, instr_dur);
    if (!(duration > 0.0))
        throw Error(ErrorCode::ValidationError, "stems have no overlapping duration");

    auto clip_for = [](const StemDescriptor& stem) {
        const std::string sidecar = stem.path + ".warp.json";
        json clip;
        if (fs::exists(sidecar))
            clip = json::parse(dump_warp_sidecar(load_warp_sidecar(sidecar)));
        else
            clip = {{"markers", {{{"seconds", 0.0}, {"beats", 0.0}}}}, {"bpm", stem.bpm}};
        return clip;
    };

    json j;
    j["sample_rate"] = 44100;
    j["block_size"] = 512;
    j["bpm"] = instrumental.bpm;
    j["duration_seconds"] = duration;
    j["assets"] = {
        {"acapella", {{"path", fs::absolute(acapella.path).string()}}},
        {"instrumental", {{"path", fs::absolute(instrumental.path).string()}}},
    };
    j["nodes"] = json::array();
    j["nodes"].push_back({{"name", "acapella"},
                          {"kind", "playback_warp"},
                          {"asset", "acapella"},
                          {"clip", clip_for(acapella)},
                          {"record", true}});
    j["nodes"].push_back({{"name", "instrumental"},
                          {"kind", "playback_warp"},
                          {"asset", "instrumental"},
                          {"clip", clip_for(instrumental)},
                          {"record", true}});
    j["nodes"].push_back({{"name", "mix"},
                          {"kind", "add"},
                          {"inputs", {"acapella", "instrumental"}},
                          {"record", true}});

    std::ofstream out(out_path, std::ios::trunc);
    if (!out)
        throw Error(ErrorCode::IoError, "cannot write " + out_path);
    out << j.dump(2) << "\n";
    return out_path;
}

} // namespace dawkit
