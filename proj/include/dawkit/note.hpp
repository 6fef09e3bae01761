#pragma once

#include <vector>

namespace dawkit {

/// A pitched, timed, velocity-carrying event. Start and duration are kept in
/// both clock domains; which one drives scheduling is chosen at load time.
struct NoteEvent {
    int note = 60;          // MIDI pitch 0-127
    int velocity = 100;     // 1-127
    double start_seconds = 0.0;
    double start_beats = 0.0;
    double duration_seconds = 0.0;
    double duration_beats = 0.0;
};

using NoteSequence = std::vector<NoteEvent>;

/// Builds an event with one time domain filled in; the other is derived when
/// the sequence is loaded into an instrument.
inline NoteEvent make_note(int note, int velocity, double start, double duration) {
    NoteEvent ev;
    ev.note = note;
    ev.velocity = velocity;
    ev.start_seconds = start;
    ev.start_beats = start;
    ev.duration_seconds = duration;
    ev.duration_beats = duration;
    return ev;
}

/// Implemented by processors that consume MIDI-style note sequences. With
/// beats_mode the beat fields are mapped to seconds through the engine bpm at
/// prepare time; otherwise the second fields are used as-is.
class NoteConsumer {
public:
    virtual ~NoteConsumer() = default;
    virtual void set_notes(NoteSequence sequence, bool beats_mode) = 0;
    virtual const NoteSequence& notes() const = 0;
    virtual bool notes_in_beats() const = 0;
};

} // namespace dawkit
