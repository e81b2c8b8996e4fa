"""Synthetic training corpus: a pitch-transition Markov chain plus bookkeeping.

Transitions favor small intervals via an exponential decay over circular
pitch distance. The circulant structure makes the matrix doubly stochastic,
so the uniform distribution over tokens is stationary and every pitch is
equally likely a priori. Wrap-around jumps (top of the range to the bottom)
are the accepted price of that guarantee.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .contour import N_STEPS, extract_components
from .rng import make_rng

DATASET_FORMAT_VERSION = 1


class DatasetParseError(ValueError):
    """A dataset file violated the line format or an invariant."""


@dataclass(frozen=True)
class PitchVocabulary:
    """Token i stands for MIDI pitch midi_low + i."""

    midi_low: int = 48
    size: int = 36

    def __post_init__(self):
        if not (0 < self.size <= 128 and 0 <= self.midi_low and self.midi_low + self.size <= 128):
            raise ValueError(f"vocabulary out of MIDI range: low={self.midi_low} size={self.size}")

    def tokens_to_midi(self, tokens) -> np.ndarray:
        return np.asarray(tokens) + self.midi_low


@dataclass(frozen=True)
class TransitionMatrix:
    """Row-stochastic next-token probabilities with interval-decay scale tau."""

    p: np.ndarray
    tau: float


@dataclass(frozen=True)
class ComponentStats:
    mean: np.ndarray
    std: np.ndarray


@dataclass
class MelodyDataset:
    sequences: np.ndarray  # (n, 16) int64 tokens
    components: np.ndarray  # (n, 3) float64, aligned with sequences
    vocab: PitchVocabulary
    seed: int
    tau: float = 2.0

    def __len__(self) -> int:
        return len(self.sequences)


def build_transition_matrix(vocab: PitchVocabulary, tau: float) -> TransitionMatrix:
    """Interval-decay kernel p[i][j] ~ exp(-d(i,j)/tau) over circular distance."""
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    v = vocab.size
    idx = np.arange(v)
    diff = np.abs(idx[None, :] - idx[:, None])
    dist = np.minimum(diff, v - diff)
    weights = np.exp(-dist / tau)
    p = weights / weights.sum(axis=1, keepdims=True)
    p.setflags(write=False)
    return TransitionMatrix(p=p, tau=float(tau))


def sample_sequence(matrix: TransitionMatrix, rng: np.random.Generator) -> np.ndarray:
    """Draw 16 tokens: uniform start (the stationary law), then chain steps."""
    v = matrix.p.shape[0]
    cum = np.cumsum(matrix.p, axis=1)
    tokens = np.empty(N_STEPS, dtype=np.int64)
    tokens[0] = rng.integers(v)
    for t in range(1, N_STEPS):
        u = rng.random()
        tokens[t] = min(int(np.searchsorted(cum[tokens[t - 1]], u, side="right")), v - 1)
    return tokens


def generate_dataset(
    vocab: PitchVocabulary = PitchVocabulary(),
    tau: float = 2.0,
    n: int = 5000,
    seed: int = 0,
) -> MelodyDataset:
    """Sample n sequences and their trend components, reproducibly from seed."""
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    matrix = build_transition_matrix(vocab, tau)
    rng = make_rng(seed)
    sequences = np.stack([sample_sequence(matrix, rng) for _ in range(n)])
    components = np.stack(
        [extract_components(vocab.tokens_to_midi(s).astype(np.float64)).as_array() for s in sequences]
    )
    return MelodyDataset(sequences=sequences, components=components, vocab=vocab, seed=seed, tau=tau)


def component_stats(dataset: MelodyDataset) -> ComponentStats:
    """Per-component corpus mean and population std; degenerate corpora are refused."""
    if len(dataset) < 2:
        raise ValueError("need at least 2 sequences for corpus statistics")
    mean = dataset.components.mean(axis=0)
    std = dataset.components.std(axis=0)
    if np.any(std == 0):
        dead = [int(i) + 1 for i in np.flatnonzero(std == 0)]
        raise ValueError(f"degenerate corpus: zero variance in component(s) {dead}")
    return ComponentStats(mean=mean, std=std)


def save_dataset(dataset: MelodyDataset, path) -> None:
    """Write the line-delimited text format (one JSON record per melody)."""
    header = {
        "version": DATASET_FORMAT_VERSION,
        "vocab_low": dataset.vocab.midi_low,
        "vocab_size": dataset.vocab.size,
        "tau": dataset.tau,
        "seed": dataset.seed,
        "n": len(dataset),
    }
    lines = [json.dumps(header, separators=(",", ":"))]
    for tokens, comps in zip(dataset.sequences, dataset.components):
        toks = ",".join(str(int(t)) for t in tokens)
        cs = ",".join(f"{c:.17g}" for c in comps)
        lines.append(f'{{"tokens":[{toks}],"components":[{cs}]}}')
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def load_dataset(path) -> MelodyDataset:
    """Parse a dataset file, enforcing token ranges and record counts."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines:
        raise DatasetParseError("line 1: empty dataset file")
    try:
        header = json.loads(lines[0])
    except json.JSONDecodeError as exc:
        raise DatasetParseError(f"line 1: bad header: {exc}") from exc
    if header.get("version") != DATASET_FORMAT_VERSION:
        raise DatasetParseError(f"line 1: unsupported version {header.get('version')!r}")
    vocab = PitchVocabulary(midi_low=header["vocab_low"], size=header["vocab_size"])
    n = header["n"]
    if len(lines) - 1 != n:
        raise DatasetParseError(f"line {len(lines)}: header declares {n} records, found {len(lines) - 1}")
    sequences = np.empty((n, N_STEPS), dtype=np.int64)
    components = np.empty((n, 3), dtype=np.float64)
    for i, line in enumerate(lines[1:], start=2):
        try:
            rec = json.loads(line)
            tokens = rec["tokens"]
            comps = rec["components"]
        except (json.JSONDecodeError, KeyError, TypeError) as exc:
            raise DatasetParseError(f"line {i}: malformed record: {exc}") from exc
        if len(tokens) != N_STEPS:
            raise DatasetParseError(f"line {i}: expected {N_STEPS} tokens, got {len(tokens)}")
        if len(comps) != 3:
            raise DatasetParseError(f"line {i}: expected 3 components, got {len(comps)}")
        if any(not isinstance(t, int) or not 0 <= t < vocab.size for t in tokens):
            raise DatasetParseError(f"line {i}: token out of range [0, {vocab.size})")
        if any(not np.isfinite(c) for c in comps):
            raise DatasetParseError(f"line {i}: non-finite component")
        sequences[i - 2] = tokens
        components[i - 2] = comps
    return MelodyDataset(
        sequences=sequences,
        components=components,
        vocab=vocab,
        seed=header["seed"],
        tau=header["tau"],
    )
