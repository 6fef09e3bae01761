#pragma once

#include <string>
#include <vector>

namespace dawkit {

enum class KeyMode { Major, Minor };

struct Key {
    int tonic = 0;  // pitch class 0-11, C = 0
    KeyMode mode = KeyMode::Major;
};

/// Parses "Gmaj", "Amin", "F#maj", "Bbmin" (long forms "major"/"minor" too).
Key parse_key(const std::string& text);
std::string key_to_string(const Key& key);

struct StemDescriptor {
    std::string path;
    double bpm = 0.0;
    Key key;
};

/// Distance on the circle of fifths, 0-6. Minor keys map to their relative
/// major first.
int key_circle_distance(const Key& a, const Key& b);

/// L2 distance combining tempo proximity (log2 ratio, octave-folded over
/// {1/2, 1, 2}) and circle-of-fifths distance normalized by its maximum.
double pair_distance(const StemDescriptor& a, const StemDescriptor& b, double w_tempo = 1.0,
                     double w_key = 1.0);

struct PairMatch {
    int acapella = 0;      // index into the acapella list
    int instrumental = 0;  // index into the instrumental list
    double distance = 0.0;
};

/// Greedy minimum-distance matching across the two roles; the result is
/// sorted by ascending distance.
std::vector<PairMatch> match_stems(const std::vector<StemDescriptor>& acapellas,
                                   const std::vector<StemDescriptor>& instrumentals,
                                   double w_tempo = 1.0, double w_key = 1.0);

/// Loads a manifest: a JSON array of {"path", "bpm", "key"} objects.
std::vector<StemDescriptor> load_manifest(const std::string& path);

} // namespace dawkit
