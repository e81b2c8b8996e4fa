"""Inference: sample latents, decode a candidate batch, keep the best fit.

Candidates are decoded autoregressively with temperature-scaled sampling
(temperature 0 = argmax, consuming no randomness), then ranked by the MSE
between their extracted contour components and the target's.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .contour import (
    ContourComponents,
    component_mse,
    components_to_curve,
    extract_components,
)
from .cvae import (
    ModelParams,
    _conductor_forward,
    decoder_segment_init,
    decoder_step,
    standardize,
)
from .rng import make_rng


@dataclass(frozen=True)
class GenerationRequest:
    target: ContourComponents
    n_candidates: int = 64
    temperature: float = 1.0
    seed: int = 0

    def __post_init__(self):
        if self.n_candidates < 1:
            raise ValueError(f"n_candidates must be >= 1, got {self.n_candidates}")
        if self.temperature < 0:
            raise ValueError(f"temperature must be >= 0, got {self.temperature}")


@dataclass(frozen=True)
class GenerationResult:
    best: np.ndarray  # token sequence of the winning candidate
    best_index: int
    fit_mse: float
    candidate_mses: np.ndarray
    curve: np.ndarray  # target contour rendered from its components
    seed: int = 0
    candidates: list = field(default_factory=list, repr=False)


def sample_latents(n: int, dim: int, rng) -> np.ndarray:
    if n < 1 or dim < 1:
        raise ValueError(f"need n, dim >= 1, got {n}, {dim}")
    return rng.standard_normal((n, dim))


def _sample_step(logits: np.ndarray, temperature: float, rng) -> np.ndarray:
    """Draw one token per row; temperature 0 is argmax and uses no RNG."""
    if temperature == 0.0:
        return np.argmax(logits, axis=-1)
    scaled = logits.astype(np.float64) / temperature
    scaled -= scaled.max(axis=-1, keepdims=True)
    p = np.exp(scaled)
    p /= p.sum(axis=-1, keepdims=True)
    cdf = np.cumsum(p, axis=-1)
    u = rng.random(logits.shape[0])
    idx = (u[:, None] > cdf).sum(axis=-1)
    return np.minimum(idx, logits.shape[-1] - 1)


def decode_candidates(params: ModelParams, cond, latents, temperature: float, rng):
    if temperature < 0:
        raise ValueError(f"temperature must be >= 0, got {temperature}")
    h = params.hyper
    t = params.tensors
    z = np.atleast_2d(np.asarray(latents, dtype=params.dtype))
    b = z.shape[0]
    cond_b = np.broadcast_to(np.asarray(cond, dtype=params.dtype).reshape(-1), (b, 3))
    segs, _ = _conductor_forward(params, z, cond_b)
    tokens = np.zeros((b, h.seq_len), dtype=np.int64)
    for s, seg in enumerate(segs):
        hd, cd, _ = decoder_segment_init(params, seg)
        for j in range(h.segment_len):
            step = s * h.segment_len + j
            if j == 0:
                prev = np.broadcast_to(t["start_embed"], (b, h.embed_dim))
            else:
                prev = t["embed"][tokens[:, step - 1]]
            hd, cd, logits, _ = decoder_step(params, hd, cd, prev, seg)
            tokens[:, step] = _sample_step(logits, temperature, rng)
    return [tokens[i] for i in range(b)]


def select_best(candidates, target: ContourComponents):
    """Rank candidates by component MSE; ties go to the lowest index.

    Components are mean-shift invariant, so tokens and MIDI pitches give
    identical MSEs and either may be passed.
    """
    if len(candidates) == 0:
        raise ValueError("need at least one candidate")
    mses = np.empty(len(candidates), dtype=np.float64)
    for i, cand in enumerate(candidates):
        comps = extract_components(np.asarray(cand, dtype=np.float64))
        mses[i] = component_mse(comps, target)
    index = int(np.argmin(mses))
    return index, float(mses[index]), mses


def generate(params: ModelParams, req: GenerationRequest) -> GenerationResult:
    cond = standardize(params.stats, req.target.as_array())
    rng = make_rng(req.seed)
    latents = sample_latents(req.n_candidates, params.hyper.latent_dim, rng)
    candidates = decode_candidates(params, cond, latents, req.temperature, rng)
    index, mse, mses = select_best(candidates, req.target)
    return GenerationResult(
        best=candidates[index],
        best_index=index,
        fit_mse=mse,
        candidate_mses=mses,
        curve=components_to_curve(req.target),
        seed=req.seed,
        candidates=candidates,
    )
