#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dawkit/note.hpp"

namespace dawkit {

/// Tick-indexed tempo events merged from all tracks of an SMF. The first
/// entry is always at tick 0 (500000 us per quarter if the file states none).
class TempoMap {
public:
    struct Entry {
        int64_t tick = 0;
        int64_t us_per_quarter = 500000;
    };

    explicit TempoMap(int ticks_per_quarter = 480);

    int ticks_per_quarter() const { return tpq_; }
    const std::vector<Entry>& entries() const { return entries_; }

    /// Inserts or replaces the tempo at a tick (replace keeps ticks strictly
    /// increasing when several tempo events share one tick).
    void set_tempo(int64_t tick, int64_t us_per_quarter);

    double seconds_at(int64_t tick) const;
    double beats_at(int64_t tick) const { return static_cast<double>(tick) / tpq_; }

private:
    int tpq_;
    std::vector<Entry> entries_;
};

struct TimePoint {
    double seconds = 0.0;
    double beats = 0.0;
};

inline TimePoint ticks_to_time(const TempoMap& map, int64_t tick) {
    return {map.seconds_at(tick), map.beats_at(tick)};
}

struct SmfNote {
    int channel = 0;
    int note = 0;
    int velocity = 0;
    int64_t on_tick = 0;
    int64_t off_tick = 0;
};

struct SmfData {
    int format = 0;
    int ticks_per_quarter = 480;
    TempoMap tempo{480};
    std::vector<std::vector<SmfNote>> tracks;
    std::vector<std::string> warnings;
};

/// Standard MIDI File parser (formats 0 and 1). Running status is honored,
/// note-on with velocity 0 is a note-off, overlapping same-pitch notes close
/// FIFO, dangling note-ons get a synthesized off at track end plus a warning.
/// SMPTE-division files and format 2 are rejected.
SmfData parse_smf(std::span<const uint8_t> bytes);
SmfData parse_smf_file(const std::string& path);

/// All tracks merged into one sequence with both clock domains filled from
/// the tempo map, sorted by start then pitch.
NoteSequence to_note_sequence(const SmfData& smf);

/// Minimal format-0 writer (single tempo). Beat positions are quantized to
/// the tick grid.
std::vector<uint8_t> write_smf(const NoteSequence& notes, double bpm, int ticks_per_quarter = 480);

/// Variable-length quantity decode; advances pos. Exposed for tests.
uint32_t decode_varint(std::span<const uint8_t> bytes, size_t& pos);

} // namespace dawkit
