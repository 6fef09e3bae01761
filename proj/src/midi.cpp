#include "dawkit/midi.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <deque>
#include <fstream>
#include <map>

#include "dawkit/errors.hpp"

namespace dawkit {

// ---------------------------------------------------------------------------
// TempoMap
// ---------------------------------------------------------------------------

TempoMap::TempoMap(int ticks_per_quarter) : tpq_(ticks_per_quarter) {
    if (tpq_ <= 0)
        throw Error(ErrorCode::BadHeader, "ticks_per_quarter must be > 0");
    entries_.push_back({0, 500000});
}

void TempoMap::set_tempo(int64_t tick, int64_t us_per_quarter) {
    if (tick < 0 || us_per_quarter <= 0)
        return;
    auto it = std::lower_bound(entries_.begin(), entries_.end(), tick,
                               [](const Entry& e, int64_t t) { return e.tick < t; });
    if (it != entries_.end() && it->tick == tick)
        it->us_per_quarter = us_per_quarter;
    else
        entries_.insert(it, {tick, us_per_quarter});
}

double TempoMap::seconds_at(int64_t tick) const {
    double seconds = 0.0;
    for (size_t i = 0; i < entries_.size(); ++i) {
        const int64_t seg_start = entries_[i].tick;
        if (tick <= seg_start)
            break;
        const int64_t seg_end =
            (i + 1 < entries_.size()) ? std::min(entries_[i + 1].tick, tick) : tick;
        seconds += (static_cast<double>(seg_end - seg_start) / tpq_) *
                   (static_cast<double>(entries_[i].us_per_quarter) * 1e-6);
    }
    return seconds;
}

// ---------------------------------------------------------------------------
// parsing
// ---------------------------------------------------------------------------

uint32_t decode_varint(std::span<const uint8_t> bytes, size_t& pos) {
    uint32_t value = 0;
    for (int i = 0; i < 4; ++i) {
        if (pos >= bytes.size())
            throw Error(ErrorCode::TruncatedChunk, "variable-length quantity runs past the end");
        const uint8_t b = bytes[pos++];
        value = (value << 7) | (b & 0x7F);
        if (!(b & 0x80))
            return value;
    }
    throw Error(ErrorCode::TruncatedChunk, "variable-length quantity longer than 4 bytes");
}

namespace {

struct Reader {
    std::span<const uint8_t> bytes;
    size_t pos = 0;

    size_t remaining() const { return bytes.size() - pos; }

    uint8_t u8(const char* what) {
        if (pos >= bytes.size())
            throw Error(ErrorCode::TruncatedChunk, what);
        return bytes[pos++];
    }

    uint16_t u16(const char* what) {
        if (remaining() < 2)
            throw Error(ErrorCode::TruncatedChunk, what);
        uint16_t v = static_cast<uint16_t>((bytes[pos] << 8) | bytes[pos + 1]);
        pos += 2;
        return v;
    }

    uint32_t u32(const char* what) {
        if (remaining() < 4)
            throw Error(ErrorCode::TruncatedChunk, what);
        uint32_t v = (static_cast<uint32_t>(bytes[pos]) << 24) |
                     (static_cast<uint32_t>(bytes[pos + 1]) << 16) |
                     (static_cast<uint32_t>(bytes[pos + 2]) << 8) |
                     static_cast<uint32_t>(bytes[pos + 3]);
        pos += 4;
        return v;
    }
};

struct OpenNote {
    int velocity = 0;
    int64_t tick = 0;
};

int data_bytes_for(uint8_t status) {
    switch (status & 0xF0) {
        case 0xC0:
        case 0xD0:
            return 1;
        default:
            return 2;
    }
}

// Parses one MTrk payload. Malformed event data ends the track early with a
// warning (partial parse) instead of failing the whole file.
void parse_track(std::span<const uint8_t> data, int track_index, TempoMap& tempo,
                 std::vector<SmfNote>& notes, std::vector<std::string>& warnings) {
    size_t pos = 0;
    int64_t tick = 0;
    uint8_t running_status = 0;
    std::map<int, std::deque<OpenNote>> open;  // (channel<<8 | note) -> FIFO

    auto warn = [&](const std::string& msg) {
        warnings.push_back("track " + std::to_string(track_index) + ": " + msg);
    };

    auto close_note = [&](int channel, int note, int64_t off_tick) {
        auto it = open.find((channel << 8) | note);
        if (it == open.end() || it->second.empty())
            return false;
        const OpenNote on = it->second.front();
        it->second.pop_front();
        if (off_tick > on.tick)
            notes.push_back({channel, note, on.velocity, on.tick, off_tick});
        else
            warn("zero-length note " + std::to_string(note) + " dropped");
        return true;
    };

    try {
        while (pos < data.size()) {
            tick += decode_varint(data, pos);
            if (pos >= data.size())
                throw Error(ErrorCode::TruncatedChunk, "event after delta time");
            uint8_t status = data[pos];
            if (status & 0x80) {
                ++pos;
            } else if (running_status & 0x80) {
                status = running_status;
            } else {
                warn("data byte with no running status; track truncated here");
                break;
            }

            if (status == 0xFF) {
                running_status = 0;
                if (pos >= data.size())
                    throw Error(ErrorCode::TruncatedChunk, "meta event type");
                const uint8_t type = data[pos++];
                const uint32_t len = decode_varint(data, pos);
                if (pos + len > data.size())
                    throw Error(ErrorCode::TruncatedChunk, "meta event payload");
                if (type == 0x51 && len == 3) {
                    const int64_t uspq = (static_cast<int64_t>(data[pos]) << 16) |
                                         (static_cast<int64_t>(data[pos + 1]) << 8) |
                                         static_cast<int64_t>(data[pos + 2]);
                    if (uspq > 0)
                        tempo.set_tempo(tick, uspq);
                    else
                        warn("tempo of 0 us/quarter ignored");
                }
                pos += len;
                if (type == 0x2F)
                    break;  // end of track
                continue;
            }
            if (status == 0xF0 || status == 0xF7) {
                running_status = 0;
                const uint32_t len = decode_varint(data, pos);
                if (pos + len > data.size())
                    throw Error(ErrorCode::TruncatedChunk, "sysex payload");
                pos += len;
                continue;
            }
            if ((status & 0xF0) == 0xF0) {
                warn("unexpected system message; track truncated here");
                break;
            }

            running_status = status;
            const int need = data_bytes_for(status);
            if (pos + static_cast<size_t>(need) > data.size())
                throw Error(ErrorCode::TruncatedChunk, "channel message data");
            const uint8_t d0 = data[pos];
            const uint8_t d1 = need > 1 ? data[pos + 1] : 0;
            pos += static_cast<size_t>(need);
            if ((d0 & 0x80) || (d1 & 0x80)) {
                warn("data byte with high bit set; track truncated here");
                break;
            }

            const int channel = status & 0x0F;
            switch (status & 0xF0) {
                case 0x90:
                    if (d1 > 0) {
                        open[(channel << 8) | d0].push_back({d1, tick});
                        break;
                    }
                    [[fallthrough]];  // velocity 0 is a note-off
                case 0x80:
                    if (!close_note(channel, d0, tick))
                        warn("note-off without matching note-on (note " + std::to_string(d0) + ")");
                    break;
                default:
                    break;  // CC / pitch bend / aftertouch / program: parsed, skipped
            }
        }
    } catch (const Error& e) {
        warn(std::string("partial parse: ") + e.what());
    }

    for (auto& [key, queue] : open) {
        while (!queue.empty()) {
            const int channel = key >> 8;
            const int note = key & 0xFF;
            warn("dangling note-on (note " + std::to_string(note) +
                 "); off synthesized at track end");
            const OpenNote on = queue.front();
            queue.pop_front();
            if (tick > on.tick)
                notes.push_back({channel, note, on.velocity, on.tick, tick});
        }
    }
}

} // namespace

SmfData parse_smf(std::span<const uint8_t> bytes) {
    Reader r{bytes};
    if (r.remaining() < 4 || std::memcmp(bytes.data(), "MThd", 4) != 0)
        throw Error(ErrorCode::BadHeader, "missing MThd chunk");
    r.pos = 4;
    const uint32_t header_len = r.u32("header length");
    if (header_len != 6)
        throw Error(ErrorCode::BadHeader, "MThd length must be 6");
    const uint16_t format = r.u16("format");
    const uint16_t ntrks = r.u16("track count");
    const uint16_t division = r.u16("division");
    if (format > 1)
        throw Error(ErrorCode::UnsupportedFormat, "format " + std::to_string(format) +
                                                      " (only 0 and 1 are supported)");
    if (division & 0x8000)
        throw Error(ErrorCode::UnsupportedFormat, "SMPTE division is not supported");
    if ((division & 0x7FFF) == 0)
        throw Error(ErrorCode::BadHeader, "division of 0 ticks per quarter");

    SmfData smf;
    smf.format = format;
    smf.ticks_per_quarter = division & 0x7FFF;
    smf.tempo = TempoMap(smf.ticks_per_quarter);

    int parsed_tracks = 0;
    while (parsed_tracks < ntrks && r.remaining() > 0) {
        if (r.remaining() < 8)
            throw Error(ErrorCode::TruncatedChunk, "chunk header");
        char id[4];
        std::memcpy(id, bytes.data() + r.pos, 4);
        r.pos += 4;
        const uint32_t len = r.u32("chunk length");
        if (len > r.remaining())
            throw Error(ErrorCode::TruncatedChunk, "chunk payload");
        auto payload = bytes.subspan(r.pos, len);
        r.pos += len;
        if (std::memcmp(id, "MTrk", 4) != 0) {
            smf.warnings.push_back("unknown chunk skipped");
            continue;
        }
        smf.tracks.emplace_back();
        parse_track(payload, parsed_tracks, smf.tempo, smf.tracks.back(), smf.warnings);
        ++parsed_tracks;
    }
    if (parsed_tracks < ntrks)
        throw Error(ErrorCode::TruncatedChunk,
                    "expected " + std::to_string(ntrks) + " tracks, found " +
                        std::to_string(parsed_tracks));
    return smf;
}

SmfData parse_smf_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(ErrorCode::IoError, "cannot open " + path);
    std::vector<uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_smf(bytes);
}

NoteSequence to_note_sequence(const SmfData& smf) {
    std::vector<SmfNote> merged;
    for (const auto& track : smf.tracks)
        merged.insert(merged.end(), track.begin(), track.end());
    std::stable_sort(merged.begin(), merged.end(), [](const SmfNote& a, const SmfNote& b) {
        if (a.on_tick != b.on_tick)
            return a.on_tick < b.on_tick;
        return a.note < b.note;
    });

    NoteSequence sequence;
    sequence.reserve(merged.size());
    for (const auto& n : merged) {
        NoteEvent ev;
        ev.note = n.note;
        ev.velocity = n.velocity;
        ev.start_seconds = smf.tempo.seconds_at(n.on_tick);
        ev.start_beats = smf.tempo.beats_at(n.on_tick);
        ev.duration_seconds = smf.tempo.seconds_at(n.off_tick) - ev.start_seconds;
        ev.duration_beats = smf.tempo.beats_at(n.off_tick) - ev.start_beats;
        sequence.push_back(ev);
    }
    return sequence;
}

// ---------------------------------------------------------------------------
// writer (format 0, single tempo)
// ---------------------------------------------------------------------------

namespace {

void put_varint(std::vector<uint8_t>& out, int64_t value) {
    uint32_t v = static_cast<uint32_t>(std::max<int64_t>(value, 0));
    uint8_t stack[4];
    int count = 0;
    do {
        stack[count++] = static_cast<uint8_t>(v & 0x7F);
        v >>= 7;
    } while (v && count < 4);
    for (int i = count - 1; i >= 0; --i)
        out.push_back(static_cast<uint8_t>(stack[i] | (i > 0 ? 0x80 : 0)));
}

void put_u32be(std::vector<uint8_t>& out, uint32_t v) {
    out.push_back(static_cast<uint8_t>(v >> 24));
    out.push_back(static_cast<uint8_t>((v >> 16) & 0xFF));
    out.push_back(static_cast<uint8_t>((v >> 8) & 0xFF));
    out.push_back(static_cast<uint8_t>(v & 0xFF));
}

void put_u16be(std::vector<uint8_t>& out, uint16_t v) {
    out.push_back(static_cast<uint8_t>(v >> 8));
    out.push_back(static_cast<uint8_t>(v & 0xFF));
}

} // namespace

std::vector<uint8_t> write_smf(const NoteSequence& notes, double bpm, int ticks_per_quarter) {
    if (!(bpm > 0.0) || ticks_per_quarter <= 0)
        throw Error(ErrorCode::ValidationError, "write_smf needs bpm > 0 and tpq > 0");

    struct Event {
        int64_t tick;
        bool is_on;
        uint8_t note;
        uint8_t velocity;
    };
    std::vector<Event> events;
    events.reserve(notes.size() * 2);
    for (const auto& n : notes) {
        const int64_t on = std::llround(n.start_beats * ticks_per_quarter);
        const int64_t off =
            on + std::max<int64_t>(1, std::llround(n.duration_beats * ticks_per_quarter));
        events.push_back({on, true, static_cast<uint8_t>(n.note & 0x7F),
                          static_cast<uint8_t>(std::clamp(n.velocity, 1, 127))});
        events.push_back({off, false, static_cast<uint8_t>(n.note & 0x7F), 0});
    }
    std::stable_sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.tick != b.tick)
            return a.tick < b.tick;
        return !a.is_on && b.is_on;  // offs first at the same tick
    });

    std::vector<uint8_t> track;
    // tempo at tick 0
    put_varint(track, 0);
    track.push_back(0xFF);
    track.push_back(0x51);
    track.push_back(0x03);
    const int64_t uspq = std::llround(60e6 / bpm);
    track.push_back(static_cast<uint8_t>((uspq >> 16) & 0xFF));
    track.push_back(static_cast<uint8_t>((uspq >> 8) & 0xFF));
    track.push_back(static_cast<uint8_t>(uspq & 0xFF));

    int64_t prev_tick = 0;
    for (const auto& ev : events) {
        put_varint(track, ev.tick - prev_tick);
        prev_tick = ev.tick;
        track.push_back(ev.is_on ? 0x90 : 0x80);
        track.push_back(ev.note);
        track.push_back(ev.is_on ? ev.velocity : 0x40);
    }
    // end of track
    put_varint(track, 0);
    track.push_back(0xFF);
    track.push_back(0x2F);
    track.push_back(0x00);

    std::vector<uint8_t> out;
    out.insert(out.end(), {'M', 'T', 'h', 'd'});
    put_u32be(out, 6);
    put_u16be(out, 0);  // format 0
    put_u16be(out, 1);  // one track
    put_u16be(out, static_cast<uint16_t>(ticks_per_quarter));
    out.insert(out.end(), {'M', 'T', 'r', 'k'});
    put_u32be(out, static_cast<uint32_t>(track.size()));
    out.insert(out.end(), track.begin(), track.end());
    return out;
}

} // namespace dawkit
