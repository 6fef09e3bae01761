#include <fstream>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dawkit/graph.hpp"
#include "dawkit/midi.hpp"
#include "dawkit/pairing.hpp"
#include "dawkit/project.hpp"
#include "dawkit/resample.hpp"
#include "dawkit/stretch.hpp"
#include "dawkit/warp.hpp"
#include "dawkit/wav.hpp"

namespace py = pybind11;
using namespace dawkit;

namespace {

// (channels, frames) float32 array <-> AudioBuffer. 1-D arrays are mono.
AudioBuffer buffer_from_array(const py::array& array, double sample_rate) {
    auto arr = py::array_t<float, py::array::c_style | py::array::forcecast>::ensure(array);
    if (!arr)
        throw Error(ErrorCode::ValidationError, "expected a numeric array");
    int channels;
    int64_t frames;
    if (arr.ndim() == 1) {
        channels = 1;
        frames = arr.shape(0);
    } else if (arr.ndim() == 2) {
        channels = static_cast<int>(arr.shape(0));
        frames = arr.shape(1);
    } else {
        throw Error(ErrorCode::ValidationError, "audio arrays must be 1-D or (channels, frames)");
    }
    AudioBuffer buffer(channels, frames, sample_rate);
    const float* data = arr.data();
    for (int c = 0; c < channels; ++c)
        std::copy(data + c * frames, data + (c + 1) * frames, buffer.channel(c));
    return buffer;
}

py::array_t<float> array_from_buffer(const AudioBuffer& buffer) {
    py::array_t<float> out({static_cast<py::ssize_t>(buffer.channels()),
                            static_cast<py::ssize_t>(buffer.frames())});
    auto view = out.mutable_unchecked<2>();
    for (int c = 0; c < buffer.channels(); ++c)
        for (int64_t n = 0; n < buffer.frames(); ++n)
            view(c, n) = buffer.channel(c)[n];
    return out;
}

ControlSignal signal_from_array(const py::array& array, bool hold_last) {
    auto arr = py::array_t<double, py::array::c_style | py::array::forcecast>::ensure(array);
    if (!arr || arr.ndim() != 1)
        throw Error(ErrorCode::ValidationError, "control signals must be 1-D arrays");
    ControlSignal signal;
    signal.hold_last = hold_last;
    signal.values.assign(arr.data(), arr.data() + arr.shape(0));
    return signal;
}

ClipInfo clip_from_dict(const py::dict& d) {
    ClipInfo clip;
    if (d.contains("markers")) {
        clip.markers.clear();
        for (const auto item : d["markers"].cast<py::list>()) {
            auto pair = item.cast<py::sequence>();
            clip.markers.push_back({pair[0].cast<double>(), pair[1].cast<double>()});
        }
    }
    const double span_start = clip.markers.front().beats;
    const double span_end = clip.markers.size() > 1
                                ? clip.markers.back().beats
                                : std::numeric_limits<double>::infinity();
    clip.start_marker = d.contains("start_marker") ? d["start_marker"].cast<double>() : span_start;
    clip.end_marker = d.contains("end_marker") ? d["end_marker"].cast<double>() : span_end;
    clip.loop_start = d.contains("loop_start") ? d["loop_start"].cast<double>() : clip.start_marker;
    clip.loop_end = d.contains("loop_end") ? d["loop_end"].cast<double>() : clip.end_marker;
    clip.loop_on = d.contains("loop_on") && d["loop_on"].cast<bool>();
    clip.warp_on = !d.contains("warp_on") || d["warp_on"].cast<bool>();
    if (d.contains("bpm"))
        clip.source_bpm = d["bpm"].cast<double>();
    clip.validate();
    return clip;
}

NoteSequence notes_from_list(const py::list& list) {
    NoteSequence seq;
    for (const auto item : list) {
        if (py::isinstance<py::dict>(item)) {
            auto d = item.cast<py::dict>();
            seq.push_back(make_note(d["note"].cast<int>(),
                                    d.contains("velocity") ? d["velocity"].cast<int>() : 100,
                                    d["start"].cast<double>(), d["duration"].cast<double>()));
        } else {
            auto t = item.cast<py::sequence>();
            seq.push_back(make_note(t[0].cast<int>(), t[1].cast<int>(), t[2].cast<double>(),
                                    t[3].cast<double>()));
        }
    }
    return seq;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "offline DAG audio renderer";

    py::register_exception<Error>(m, "DawkitError");

    py::class_<Graph>(m, "Graph")
        .def(py::init<double, int, double>(), py::arg("sample_rate") = 44100.0,
             py::arg("block_size") = 512, py::arg("bpm") = 120.0)
        .def_property_readonly("sample_rate", &Graph::sample_rate)
        .def_property_readonly("block_size", &Graph::block_size)
        .def_property_readonly("bpm", &Graph::bpm)
        .def("add_node", &Graph::add_node, py::arg("kind"), py::arg("name"),
             py::arg("inputs") = std::vector<std::string>{},
             py::arg("params") = std::map<std::string, double>{})
        .def("set_parameter", &Graph::set_parameter, py::arg("node"), py::arg("param"),
             py::arg("value"))
        .def(
            "set_automation",
            [](Graph& g, const std::string& node, const std::string& param,
               const py::array& values, bool hold_last) {
                g.set_automation(node, param, signal_from_array(values, hold_last));
            },
            py::arg("node"), py::arg("param"), py::arg("values"), py::arg("hold_last") = true)
        .def("clear_automation", &Graph::clear_automation, py::arg("node"), py::arg("param"))
        .def("set_record", &Graph::set_record, py::arg("node"), py::arg("on") = true)
        .def("set_inputs", &Graph::set_inputs, py::arg("node"), py::arg("inputs"))
        .def(
            "set_source_buffer",
            [](Graph& g, const std::string& node, const py::array& audio, double sample_rate) {
                g.set_source_buffer(node, buffer_from_array(audio, sample_rate));
            },
            py::arg("node"), py::arg("audio"), py::arg("sample_rate"))
        .def(
            "set_notes",
            [](Graph& g, const std::string& node, const py::list& notes, bool beats) {
                g.set_notes(node, notes_from_list(notes), beats);
            },
            py::arg("node"), py::arg("notes"), py::arg("beats") = true)
        .def(
            "set_clip",
            [](Graph& g, const std::string& node, const py::dict& clip) {
                g.set_clip(node, clip_from_dict(clip));
            },
            py::arg("node"), py::arg("clip"))
        .def(
            "set_placements",
            [](Graph& g, const std::string& node, const py::list& placements) {
                std::vector<TimelinePlacement> out;
                for (const auto item : placements) {
                    auto t = item.cast<py::sequence>();
                    out.push_back({t[0].cast<double>(),
                                   py::len(t) > 1 ? t[1].cast<double>() : 0.0});
                }
                g.set_placements(node, out);
            },
            py::arg("node"), py::arg("placements"))
        .def("compile", &Graph::compile)
        .def(
            "render",
            [](Graph& g, double duration_seconds) {
                py::dict out;
                for (auto& [name, buffer] : g.render(duration_seconds))
                    out[py::str(name)] = array_from_buffer(buffer);
                return out;
            },
            py::arg("duration_seconds"))
        .def("node_names", &Graph::node_names);

    m.def("kind_names", &kind_names);

    m.def(
        "stretch",
        [](const py::array& audio, double sample_rate, double time_ratio, double pitch_ratio) {
            return array_from_buffer(
                stretch(buffer_from_array(audio, sample_rate), time_ratio, pitch_ratio));
        },
        py::arg("audio"), py::arg("sample_rate"), py::arg("time_ratio") = 1.0,
        py::arg("pitch_ratio") = 1.0);

    m.def(
        "resample",
        [](const py::array& audio, double sample_rate, double target_rate) {
            return array_from_buffer(resample(buffer_from_array(audio, sample_rate), target_rate));
        },
        py::arg("audio"), py::arg("sample_rate"), py::arg("target_rate"));

    m.def(
        "read_wav",
        [](const std::string& path) {
            WavFile file = read_wav_file(path);
            return py::make_tuple(array_from_buffer(file.buffer), file.buffer.sample_rate());
        },
        py::arg("path"));

    m.def(
        "write_wav",
        [](const std::string& path, const py::array& audio, double sample_rate,
           const std::string& encoding) {
            WavEncoding enc;
            if (encoding == "float32")
                enc = WavEncoding::Float32;
            else if (encoding == "pcm16")
                enc = WavEncoding::Pcm16;
            else if (encoding == "pcm24")
                enc = WavEncoding::Pcm24;
            else
                throw Error(ErrorCode::UnsupportedEncoding, encoding);
            write_wav_file(path, buffer_from_array(audio, sample_rate), enc);
        },
        py::arg("path"), py::arg("audio"), py::arg("sample_rate"),
        py::arg("encoding") = "float32");

    m.def(
        "parse_midi",
        [](const std::string& path) {
            py::list out;
            for (const auto& ev : to_note_sequence(parse_smf_file(path))) {
                py::dict d;
                d["note"] = ev.note;
                d["velocity"] = ev.velocity;
                d["start_seconds"] = ev.start_seconds;
                d["start_beats"] = ev.start_beats;
                d["duration_seconds"] = ev.duration_seconds;
                d["duration_beats"] = ev.duration_beats;
                out.append(d);
            }
            return out;
        },
        py::arg("path"));

    m.def(
        "write_midi",
        [](const std::string& path, const py::list& notes, double bpm) {
            const auto bytes = write_smf(notes_from_list(notes), bpm);
            std::ofstream out(path, std::ios::binary | std::ios::trunc);
            if (!out)
                throw Error(ErrorCode::IoError, "cannot write " + path);
            out.write(reinterpret_cast<const char*>(bytes.data()),
                      static_cast<std::streamsize>(bytes.size()));
        },
        py::arg("path"), py::arg("notes"), py::arg("bpm") = 120.0);

    m.def(
        "beats_to_seconds",
        [](const py::dict& clip, double beats) { return beats_to_seconds(clip_from_dict(clip), beats); },
        py::arg("clip"), py::arg("beats"));
    m.def(
        "seconds_to_beats",
        [](const py::dict& clip, double seconds) {
            return seconds_to_beats(clip_from_dict(clip), seconds);
        },
        py::arg("clip"), py::arg("seconds"));
    m.def(
        "segment_tempo",
        [](const py::dict& clip, double beats) { return segment_tempo(clip_from_dict(clip), beats); },
        py::arg("clip"), py::arg("beats"));

    m.def(
        "key_circle_distance",
        [](const std::string& a, const std::string& b) {
            return key_circle_distance(parse_key(a), parse_key(b));
        },
        py::arg("a"), py::arg("b"));
    m.def(
        "pair_distance",
        [](double bpm_a, const std::string& key_a, double bpm_b, const std::string& key_b,
           double w_tempo, double w_key) {
            StemDescriptor a{"", bpm_a, parse_key(key_a)};
            StemDescriptor b{"", bpm_b, parse_key(key_b)};
            return pair_distance(a, b, w_tempo, w_key);
        },
        py::arg("bpm_a"), py::arg("key_a"), py::arg("bpm_b"), py::arg("key_b"),
        py::arg("w_tempo") = 1.0, py::arg("w_key") = 1.0);

    m.def(
        "load_project",
        [](const std::string& path) {
            Project project = load_project(path);
            return py::make_tuple(
                py::cast(std::move(project.graph)),
                project.duration_seconds);
        },
        py::arg("path"));

    m.def("render_project",
          [](const std::string& path, const std::string& out_dir) {
              return render_project(path, out_dir);
          },
          py::arg("path"), py::arg("out_dir"));
}
