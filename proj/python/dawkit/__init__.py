"""Offline DAG audio renderer.

Compose graphs of audio processors, automate parameters with numpy arrays,
drive polyphonic instruments from MIDI, warp clips onto a beat timeline and
record any set of nodes in a single render pass.
"""

from ._core import (
    Graph,
    beats_to_seconds,
    seconds_to_beats,
    segment_tempo,
    stretch,
    resample,
    read_wav,
    write_wav,
    parse_midi,
    write_midi,
    key_circle_distance,
    pair_distance,
    load_project,
    render_project,
    kind_names,
)

__all__ = [
    "Graph",
    "beats_to_seconds",
    "seconds_to_beats",
    "segment_tempo",
    "stretch",
    "resample",
    "read_wav",
    "write_wav",
    "parse_midi",
    "write_midi",
    "key_circle_distance",
    "pair_distance",
    "load_project",
    "render_project",
    "kind_names",
]

__version__ = "0.1.0"
