#include "dawkit/pairing.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dawkit/errors.hpp"

namespace dawkit {

namespace {

using nlohmann::json;

int letter_pitch_class(char c) {
    switch (c) {
        case 'C': case 'c': return 0;
        case 'D': case 'd': return 2;
        case 'E': case 'e': return 4;
        case 'F': case 'f': return 5;
        case 'G': case 'g': return 7;
        case 'A': case 'a': return 9;
        case 'B': case 'b': return 11;
        default: return -1;
    }
}

} // namespace

Key parse_key(const std::string& text) {
    if (text.empty())
        throw Error(ErrorCode::ParseError, "empty key string");
    const int base = letter_pitch_class(text[0]);
    if (base < 0)
        throw Error(ErrorCode::ParseError, "bad key tonic in \"" + text + "\"");
    size_t pos = 1;
    int tonic = base;
    if (pos < text.size() && (text[pos] == '#' || text[pos] == 'b')) {
        tonic += text[pos] == '#' ? 1 : -1;
        ++pos;
    }
    tonic = ((tonic % 12) + 12) % 12;
    std::string mode = text.substr(pos);
    std::transform(mode.begin(), mode.end(), mode.begin(), ::tolower);
    Key key{tonic, KeyMode::Major};
    if (mode == "maj" || mode == "major" || mode.empty())
        key.mode = KeyMode::Major;
    else if (mode == "min" || mode == "minor" || mode == "m")
        key.mode = KeyMode::Minor;
    else
        throw Error(ErrorCode::ParseError, "bad key mode in \"" + text + "\"");
    return key;
}

std::string key_to_string(const Key& key) {
    static const char* names[12] = {"C",  "C#", "D",  "D#", "E",  "F",
                                    "F#", "G",  "G#", "A",  "A#", "B"};
    return std::string(names[((key.tonic % 12) + 12) % 12]) +
           (key.mode == KeyMode::Major ? "maj" : "min");
}

int key_circle_distance(const Key& a, const Key& b) {
    // relative major of a minor key is three semitones up
    const int tonic_a = (a.tonic + (a.mode == KeyMode::Minor ? 3 : 0)) % 12;
    const int tonic_b = (b.tonic + (b.mode == KeyMode::Minor ? 3 : 0)) % 12;
    const int pos_a = (tonic_a * 7) % 12;
    const int pos_b = (tonic_b * 7) % 12;
    const int d = std::abs(pos_a - pos_b);
    return std::min(d, 12 - d);
}

double pair_distance(const StemDescriptor& a, const StemDescriptor& b, double w_tempo,
                     double w_key) {
    if (!(a.bpm > 0.0) || !(b.bpm > 0.0))
        throw Error(ErrorCode::MissingMetadata, "stem bpm must be > 0");
    double dt = std::numeric_limits<double>::infinity();
    for (const double r : {0.5, 1.0, 2.0})
        dt = std::min(dt, std::fabs(std::log2(a.bpm * r / b.bpm)));
    const double dk = static_cast<double>(key_circle_distance(a.key, b.key)) / 6.0;
    const double t = w_tempo * dt;
    const double k = w_key * dk;
    return std::sqrt(t * t + k * k);
}

std::vector<PairMatch> match_stems(const std::vector<StemDescriptor>& acapellas,
                                   const std::vector<StemDescriptor>& instrumentals,
                                   double w_tempo, double w_key) {
    if (acapellas.empty())
        throw Error(ErrorCode::EmptyRole, "no acapella stems");
    if (instrumentals.empty())
        throw Error(ErrorCode::EmptyRole, "no instrumental stems");

    std::vector<std::vector<double>> d(acapellas.size(),
                                       std::vector<double>(instrumentals.size()));
    for (size_t i = 0; i < acapellas.size(); ++i)
        for (size_t j = 0; j < instrumentals.size(); ++j)
            d[i][j] = pair_distance(acapellas[i], instrumentals[j], w_tempo, w_key);

    std::vector<bool> a_used(acapellas.size(), false);
    std::vector<bool> b_used(instrumentals.size(), false);
    std::vector<PairMatch> matches;
    const size_t rounds = std::min(acapellas.size(), instrumentals.size());
    for (size_t round = 0; round < rounds; ++round) {
        double best = std::numeric_limits<double>::infinity();
        int bi = -1, bj = -1;
        for (size_t i = 0; i < acapellas.size(); ++i) {
            if (a_used[i])
                continue;
            for (size_t j = 0; j < instrumentals.size(); ++j) {
                if (b_used[j])
                    continue;
                if (d[i][j] < best) {
                    best = d[i][j];
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                }
            }
        }
        a_used[static_cast<size_t>(bi)] = true;
        b_used[static_cast<size_t>(bj)] = true;
        matches.push_back({bi, bj, best});
    }
    return matches;
}

std::vector<StemDescriptor> load_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open manifest " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    json j;
    try {
        j = json::parse(ss.str());
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path + ": " + e.what());
    }
    if (!j.is_array())
        throw Error(ErrorCode::ParseError, path + ": manifest must be a JSON array");

    const auto base = std::filesystem::path(path).parent_path();
    std::vector<StemDescriptor> stems;
    for (size_t i = 0; i < j.size(); ++i) {
        const auto& e = j[i];
        if (!e.is_object() || !e.contains("path"))
            throw Error(ErrorCode::ParseError,
                        path + ": entry " + std::to_string(i) + " needs a \"path\"");
        StemDescriptor stem;
        const auto p = std::filesystem::path(e.at("path").get<std::string>());
        stem.path = p.is_absolute() ? p.string() : (base / p).string();
        if (!e.contains("bpm") || !e.at("bpm").is_number() || !(e.at("bpm").get<double>() > 0.0))
            throw Error(ErrorCode::MissingMetadata, stem.path + ": missing or invalid bpm");
        stem.bpm = e.at("bpm").get<double>();
        if (!e.contains("key"))
            throw Error(ErrorCode::MissingMetadata, stem.path + ": missing key");
        stem.key = parse_key(e.at("key").get<std::string>());
        stems.push_back(std::move(stem));
    }
    return stems;
}

} // namespace dawkit
