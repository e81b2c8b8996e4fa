"""Minimal format-0 Standard MIDI File writer/reader and piano-roll JSON.

Only the subset of SMF needed here: one track, tempo meta, program change,
16 sequential notes with fixed duration and velocity.  The reader parses
exactly what the writer emits (self-format only).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .dataset import PitchVocabulary


@dataclass(frozen=True)
class MidiSettings:
    tempo_bpm: int = 120
    ticks_per_quarter: int = 480
    note_ticks: int = 240  # eighth note
    velocity: int = 80
    channel: int = 0
    program: int = 0

    def __post_init__(self):
        if self.tempo_bpm <= 0:
            raise ValueError(f"tempo_bpm must be positive, got {self.tempo_bpm}")
        if self.ticks_per_quarter <= 0:
            raise ValueError(f"ticks_per_quarter must be positive, got {self.ticks_per_quarter}")


class MidiParseError(ValueError):
    pass


def _vlq(value: int) -> bytes:
    """Minimal-length variable-length quantity."""
    if value < 0:
        raise ValueError(f"delta time must be non-negative, got {value}")
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append(0x80 | (value & 0x7F))
        value >>= 7
    return bytes(reversed(out))


def _read_vlq(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    for _ in range(4):
        if pos >= len(data):
            raise MidiParseError("truncated variable-length quantity")
        byte = data[pos]
        pos += 1
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, pos
    raise MidiParseError("variable-length quantity longer than 4 bytes")


def write_midi(seq, vocab: PitchVocabulary = PitchVocabulary(), settings: MidiSettings = MidiSettings()) -> bytes:
    pitches = vocab.tokens_to_midi(np.asarray(seq))
    if np.any(pitches < 0) or np.any(pitches > 127):
        raise ValueError(f"pitch outside MIDI 0-127 after vocabulary mapping: {pitches.tolist()}")

    tempo_us = round(60_000_000 / settings.tempo_bpm)
    track = bytearray()
    track += _vlq(0) + bytes([0xFF, 0x51, 0x03]) + tempo_us.to_bytes(3, "big")
    track += _vlq(0) + bytes([0xC0 | settings.channel, settings.program])
    for pitch in pitches:
        track += _vlq(0) + bytes([0x90 | settings.channel, int(pitch), settings.velocity])
        track += _vlq(settings.note_ticks) + bytes([0x80 | settings.channel, int(pitch), 0])
    track += _vlq(0) + bytes([0xFF, 0x2F, 0x00])

    header = (
        b"MThd"
        + (6).to_bytes(4, "big")
        + (0).to_bytes(2, "big")
        + (1).to_bytes(2, "big")
        + settings.ticks_per_quarter.to_bytes(2, "big")
    )
    return header + b"MTrk" + len(track).to_bytes(4, "big") + bytes(track)


def read_midi(data: bytes, vocab: PitchVocabulary = PitchVocabulary()) -> np.ndarray:
    if len(data) < 14 or data[:4] != b"MThd":
        raise MidiParseError("not an SMF file (missing MThd)")
    if int.from_bytes(data[4:8], "big") != 6:
        raise MidiParseError("unexpected MThd length")
    pos = 14
    if data[pos : pos + 4] != b"MTrk":
        raise MidiParseError("missing MTrk chunk")
    track_len = int.from_bytes(data[pos + 4 : pos + 8], "big")
    pos += 8
    end = pos + track_len
    if end > len(data):
        raise MidiParseError("track chunk longer than file")

    pitches = []
    while pos < end:
        _, pos = _read_vlq(data, pos)
        if pos >= end:
            raise MidiParseError("truncated event")
        status = data[pos]
        if status == 0xFF:  # meta
            if pos + 2 > end:
                raise MidiParseError("truncated meta event")
            meta_type = data[pos + 1]
            length, pos = _read_vlq(data, pos + 2)
            pos += length
            if meta_type == 0x2F:
                break
        elif status & 0xF0 in (0x90, 0x80):
            if pos + 3 > end:
                raise MidiParseError("truncated note event")
            if status & 0xF0 == 0x90 and data[pos + 2] > 0:
                pitches.append(data[pos + 1])
            pos += 3
        elif status & 0xF0 == 0xC0:
            pos += 2
        else:
            raise MidiParseError(f"unsupported status byte 0x{status:02X}")

    tokens = np.asarray(pitches, dtype=np.int64) - vocab.midi_low
    if np.any(tokens < 0) or np.any(tokens >= vocab.size):
        raise MidiParseError(
            f"pitch outside vocabulary {vocab.midi_low}..{vocab.midi_low + vocab.size - 1}"
        )
    return tokens


def to_pianoroll_json(seq, vocab: PitchVocabulary = PitchVocabulary()) -> str:
    pitches = vocab.tokens_to_midi(np.asarray(seq))
    notes = [
        {"pitch": int(p), "start": i, "dur": 1} for i, p in enumerate(pitches)
    ]
    return json.dumps({"notes": notes})
