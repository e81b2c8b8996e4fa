import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from midi_draw.dataset import PitchVocabulary
from midi_draw.midi import (
    MidiParseError,
    MidiSettings,
    _read_vlq,
    _vlq,
    read_midi,
    to_pianoroll_json,
    write_midi,
)
from midi_draw.rng import make_rng

HEADER = bytes.fromhex("4D546864 00000006 0000 0001 01E0".replace(" ", ""))


def test_header_bytes():
    data = write_midi(np.zeros(16, dtype=int))
    assert data[:14] == HEADER


def scan_events(data):
    """Independent minimal event scan used as a structural oracle."""
    assert data[14:18] == b"MTrk"
    track_len = int.from_bytes(data[18:22], "big")
    pos, end = 22, 22 + track_len
    assert end == len(data)
    events = []
    while pos < end:
        delta = 0
        while True:
            byte = data[pos]
            pos += 1
            delta = (delta << 7) | (byte & 0x7F)
            if not byte & 0x80:
                break
        status = data[pos]
        if status == 0xFF:
            length = data[pos + 2]
            events.append((delta, "meta", data[pos + 1], data[pos + 3 : pos + 3 + length]))
            pos += 3 + length
        elif status & 0xF0 == 0xC0:
            events.append((delta, "program", data[pos + 1]))
            pos += 2
        else:
            kind = "on" if status & 0xF0 == 0x90 and data[pos + 2] else "off"
            events.append((delta, kind, data[pos + 1], data[pos + 2]))
            pos += 3
    return events


def test_event_structure():
    seq = np.arange(16) % 36
    events = scan_events(write_midi(seq))
    ons = [e for e in events if e[1] == "on"]
    offs = [e for e in events if e[1] == "off"]
    metas = [e for e in events if e[1] == "meta"]
    assert len(ons) == 16 and len(offs) == 16
    assert [e[2] for e in ons] == [48 + int(t) for t in seq]
    assert all(e[3] == 80 for e in ons)
    assert all(e[0] == 0 for e in ons)  # strictly sequential: on at delta 0
    assert all(e[0] == 240 for e in offs)  # off 240 ticks later
    assert [m[2] for m in metas] == [0x51, 0x2F]  # one tempo, one end-of-track
    assert metas[0][3] == (500000).to_bytes(3, "big")


def test_round_trip_random_sequences():
    rng = make_rng(8)
    for _ in range(100):
        seq = rng.integers(36, size=16)
        assert np.array_equal(read_midi(write_midi(seq)), seq)


def test_hand_assembled_fixture():
    # 60, 62, then fourteen 60s; assembled byte-by-byte from the SMF standard
    notes = b""
    for pitch in [0x3C, 0x3E] + [0x3C] * 14:
        notes += bytes([0x00, 0x90, pitch, 0x50])
        notes += bytes([0x81, 0x70, 0x80, pitch, 0x00])
    track = (
        bytes([0x00, 0xFF, 0x51, 0x03, 0x07, 0xA1, 0x20])
        + bytes([0x00, 0xC0, 0x00])
        + notes
        + bytes([0x00, 0xFF, 0x2F, 0x00])
    )
    data = HEADER + b"MTrk" + len(track).to_bytes(4, "big") + track
    expected = np.array([12, 14] + [12] * 14)
    assert np.array_equal(read_midi(data), expected)
    assert data == write_midi(expected)  # writer emits the exact same bytes


def test_truncated_header_rejected():
    with pytest.raises(MidiParseError):
        read_midi(write_midi(np.zeros(16, dtype=int))[:10])


def test_foreign_bytes_rejected():
    with pytest.raises(MidiParseError):
        read_midi(b"RIFF" + b"\x00" * 40)


def test_pitch_outside_midi_range():
    with pytest.raises(ValueError, match="0-127"):
        write_midi(np.full(16, 90))  # token 90 -> pitch 138
    with pytest.raises(ValueError, match="0-127"):
        write_midi(np.full(16, -50))


def test_pitch_outside_vocabulary_on_read():
    data = write_midi(np.zeros(16, dtype=int), PitchVocabulary(midi_low=40, size=36))
    with pytest.raises(MidiParseError, match="vocabulary"):
        read_midi(data)  # pitch 40 below default low of 48


def test_settings_validation():
    with pytest.raises(ValueError):
        MidiSettings(tempo_bpm=0)


def test_vlq_known_values():
    assert _vlq(0) == b"\x00"
    assert _vlq(127) == b"\x7f"
    assert _vlq(128) == b"\x81\x00"
    assert _vlq(240) == b"\x81\x70"
    assert _vlq(0x0FFFFFFF) == b"\xff\xff\xff\x7f"


@given(st.integers(min_value=0, max_value=0x0FFFFFFF))
def test_vlq_round_trip(value):
    encoded = _vlq(value)
    decoded, pos = _read_vlq(encoded, 0)
    assert decoded == value and pos == len(encoded)
    # minimal length: no redundant leading 0x80 septet
    assert len(encoded) == max(1, (value.bit_length() + 6) // 7)


def test_pianoroll_json():
    text = to_pianoroll_json(np.full(16, 12))
    doc = json.loads(text)
    assert len(doc["notes"]) == 16
    for i, note in enumerate(doc["notes"]):
        assert note == {"pitch": 60, "start": i, "dur": 1}


def test_pianoroll_pitch_mapping():
    seq = np.arange(16)
    doc = json.loads(to_pianoroll_json(seq))
    assert [n["pitch"] for n in doc["notes"]] == [48 + i for i in range(16)]
