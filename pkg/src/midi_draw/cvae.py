"""Conditional VAE over 16-token melodies, trained from scratch in numpy.

Architecture: the three standardized contour components are lifted to an
extra prefix step in front of the embedded tokens and read by a two-
direction LSTM encoder whose final states project to the latent mean and
log-variance. Decoding is hierarchical: a conductor LSTM consumes the
latent concatenated with the conditioning and emits one embedding per
segment; each segment embedding seeds a short autoregressive decoder
that produces segment_len tokens.

Training runs in float32 with adaptive-moment SGD; gradients are exact
reverse-mode derivatives written out by hand (see layers.py), checkable
against finite differences in float64.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .dataset import ComponentStats, MelodyDataset, component_stats
from .layers import log_softmax, lstm_step, lstm_step_backward, softmax
from .rng import make_rng

MODEL_VERSION = 1

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class TrainingDivergedError(RuntimeError):
    """Loss became non-finite during training."""


@dataclass(frozen=True)
class Hyperparams:
    embed_dim: int = 32
    enc_hidden: int = 128  # per direction
    latent_dim: int = 32
    conductor_hidden: int = 64
    dec_hidden: int = 128
    segments: int = 4
    segment_len: int = 4
    batch: int = 64
    epochs: int = 30
    learning_rate: float = 1e-3
    beta_max: float = 0.2
    beta_warmup_steps: int = 1000
    seed: int = 0
    vocab_low: int = 48
    vocab_size: int = 36

    def __post_init__(self):
        dims = (
            self.embed_dim,
            self.enc_hidden,
            self.latent_dim,
            self.conductor_hidden,
            self.dec_hidden,
            self.segments,
            self.segment_len,
            self.batch,
            self.vocab_size,
        )
        if any(d <= 0 for d in dims):
            raise ValueError("all model dimensions must be positive")
        if self.epochs < 0 or self.learning_rate <= 0 or self.beta_max < 0:
            raise ValueError("bad training hyperparameters")

    @property
    def seq_len(self) -> int:
        return self.segments * self.segment_len


@dataclass
class ModelParams:
    hyper: Hyperparams
    stats: ComponentStats
    tensors: dict[str, np.ndarray] = field(default_factory=dict)
    version: int = MODEL_VERSION

    @property
    def dtype(self):
        return self.tensors["embed"].dtype


def param_specs(h: Hyperparams) -> list[tuple[str, tuple[int, ...]]]:
    """Names and shapes of every trainable tensor, in canonical order."""
    e, he, l, hc, hd, v = (
        h.embed_dim,
        h.enc_hidden,
        h.latent_dim,
        h.conductor_hidden,
        h.dec_hidden,
        h.vocab_size,
    )
    return [
        ("embed", (v, e)),
        ("start_embed", (e,)),
        ("cond_lift.w", (3, e)),
        ("cond_lift.b", (e,)),
        ("enc_fwd.wx", (e, 4 * he)),
        ("enc_fwd.wh", (he, 4 * he)),
        ("enc_fwd.b", (4 * he,)),
        ("enc_bwd.wx", (e, 4 * he)),
        ("enc_bwd.wh", (he, 4 * he)),
        ("enc_bwd.b", (4 * he,)),
        ("mu.w", (2 * he, l)),
        ("mu.b", (l,)),
        ("logvar.w", (2 * he, l)),
        ("logvar.b", (l,)),
        ("conductor.wx", (l + 3, 4 * hc)),
        ("conductor.wh", (hc, 4 * hc)),
        ("conductor.b", (4 * hc,)),
        ("dec_init.w", (hc, 2 * hd)),
        ("dec_init.b", (2 * hd,)),
        ("dec.wx", (e + hc, 4 * hd)),
        ("dec.wh", (hd, 4 * hd)),
        ("dec.b", (4 * hd,)),
        ("out.w", (hd, v)),
        ("out.b", (v,)),
    ]


def init_params(
    h: Hyperparams,
    stats: ComponentStats,
    rng: np.random.Generator,
    dtype=np.float32,
) -> ModelParams:
    """Uniform +/-1/sqrt(fan_in) weights, zero biases, forget-gate bias 1."""
    tensors = {}
    for name, shape in param_specs(h):
        if name.endswith(".b"):
            t = np.zeros(shape, dtype=np.float64)
        else:
            fan_in = h.embed_dim if name in ("embed", "start_embed") else shape[0]
            lim = 1.0 / np.sqrt(fan_in)
            t = rng.uniform(-lim, lim, shape)
        tensors[name] = t.astype(dtype)
    for cell in ("enc_fwd", "enc_bwd", "conductor", "dec"):
        b = tensors[f"{cell}.b"]
        n = b.shape[0] // 4
        b[n : 2 * n] = 1.0
    return ModelParams(hyper=h, stats=stats, tensors=tensors)


def zero_params_like(params: ModelParams) -> dict[str, np.ndarray]:
    return {k: np.zeros_like(v) for k, v in params.tensors.items()}


def standardize(stats: ComponentStats, components) -> np.ndarray:
    """Map raw component amplitudes onto the corpus unit scale."""
    c = np.asarray(components, dtype=np.float64)
    return (c - stats.mean) / stats.std


# ---------------------------------------------------------------------------
# forward passes
# ---------------------------------------------------------------------------


def _as_batch(arr, width=None):
    a = np.asarray(arr)
    if a.ndim == 1:
        a = a[None, :]
    if width is not None and a.shape[1] != width:
        raise ValueError(f"expected width {width}, got shape {a.shape}")
    return a


def _encode_forward(params: ModelParams, seqs: np.ndarray, cond: np.ndarray):
    t_ = params.tensors
    h = params.hyper
    dtype = params.dtype
    b = seqs.shape[0]
    he = h.enc_hidden

    prefix = cond @ t_["cond_lift.w"] + t_["cond_lift.b"]
    inputs = [prefix] + [t_["embed"][seqs[:, t]] for t in range(h.seq_len)]

    hf = np.zeros((b, he), dtype=dtype)
    cf = np.zeros((b, he), dtype=dtype)
    fwd_caches = []
    for x in inputs:
        hf, cf, cache = lstm_step(t_["enc_fwd.wx"], t_["enc_fwd.wh"], t_["enc_fwd.b"], x, hf, cf)
        fwd_caches.append(cache)

    hb = np.zeros((b, he), dtype=dtype)
    cb = np.zeros((b, he), dtype=dtype)
    bwd_caches = []
    for x in reversed(inputs):
        hb, cb, cache = lstm_step(t_["enc_bwd.wx"], t_["enc_bwd.wh"], t_["enc_bwd.b"], x, hb, cb)
        bwd_caches.append(cache)

    henc = np.concatenate([hf, hb], axis=1)
    mu = henc @ t_["mu.w"] + t_["mu.b"]
    logvar = henc @ t_["logvar.w"] + t_["logvar.b"]
    cache = {"fwd": fwd_caches, "bwd": bwd_caches, "henc": henc, "cond": cond}
    return mu, logvar, cache


def encode(params: ModelParams, seq, cond):
    """Posterior parameters (mu, logvar) for token sequence(s) and conditioning."""
    seqs = _as_batch(seq, params.hyper.seq_len).astype(np.int64)
    conds = _as_batch(cond, 3).astype(params.dtype)
    mu, logvar, _ = _encode_forward(params, seqs, conds)
    if np.asarray(seq).ndim == 1:
        return mu[0], logvar[0]
    return mu, logvar


def reparameterize(mu, logvar, eps):
    """z = mu + exp(logvar / 2) * eps."""
    mu, logvar, eps = np.asarray(mu), np.asarray(logvar), np.asarray(eps)
    if not (mu.shape == logvar.shape == eps.shape):
        raise ValueError("mu, logvar and eps must share a shape")
    return mu + np.exp(0.5 * logvar) * eps


def _conductor_forward(params: ModelParams, z: np.ndarray, cond: np.ndarray):
    t_ = params.tensors
    h = params.hyper
    dtype = params.dtype
    b = z.shape[0]
    zc = np.concatenate([z, cond], axis=1).astype(dtype)
    hc = np.zeros((b, h.conductor_hidden), dtype=dtype)
    cc = np.zeros((b, h.conductor_hidden), dtype=dtype)
    segs, caches = [], []
    for _ in range(h.segments):
        hc, cc, cache = lstm_step(t_["conductor.wx"], t_["conductor.wh"], t_["conductor.b"], zc, hc, cc)
        segs.append(hc)
        caches.append(cache)
    return segs, caches


def decoder_segment_init(params: ModelParams, seg: np.ndarray):
    """Map a segment embedding to the decoder's initial (h, c) state."""
    init = np.tanh(seg @ params.tensors["dec_init.w"] + params.tensors["dec_init.b"])
    hd = params.hyper.dec_hidden
    return init[:, :hd], init[:, hd:], init


def decoder_step(params: ModelParams, hd, cd, prev_emb, seg):
    """One autoregressive decoder step; returns (h, c, logits, cache)."""
    t_ = params.tensors
    x = np.concatenate([prev_emb, seg], axis=1)
    hd, cd, cache = lstm_step(t_["dec.wx"], t_["dec.wh"], t_["dec.b"], x, hd, cd)
    logits = hd @ t_["out.w"] + t_["out.b"]
    return hd, cd, logits, cache


def _decode_forward(params: ModelParams, z: np.ndarray, cond: np.ndarray, teacher: np.ndarray):
    t_ = params.tensors
    h = params.hyper
    b = z.shape[0]
    segs, cond_caches = _conductor_forward(params, z, cond)
    logits = np.empty((b, h.seq_len, h.vocab_size), dtype=params.dtype)
    seg_records = []
    for s, seg in enumerate(segs):
        hd, cd, init = decoder_segment_init(params, seg)
        steps = []
        for j in range(h.segment_len):
            t = s * h.segment_len + j
            if j == 0:
                prev_emb = np.broadcast_to(t_["start_embed"], (b, h.embed_dim))
            else:
                prev_emb = t_["embed"][teacher[:, t - 1]]
            hd, cd, step_logits, cache = decoder_step(params, hd, cd, prev_emb, seg)
            logits[:, t] = step_logits
            steps.append((cache, hd))
        seg_records.append({"init": init, "seg": seg, "steps": steps})
    cache = {"cond_caches": cond_caches, "segs": seg_records}
    return logits, cache


def decode(params: ModelParams, z, cond, teacher):
    """Teacher-forced logits, shape (batch, seq_len, vocab)."""
    single = np.asarray(z).ndim == 1
    zb = _as_batch(z, params.hyper.latent_dim).astype(params.dtype)
    condb = _as_batch(cond, 3).astype(params.dtype)
    teacherb = _as_batch(teacher, params.hyper.seq_len).astype(np.int64)
    logits, _ = _decode_forward(params, zb, condb, teacherb)
    return logits[0] if single else logits


def elbo_loss(logits, target, mu, logvar, beta: float):
    """(total, recon, kl): mean step cross-entropy plus beta-weighted prior pull."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    logits = np.asarray(logits, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    logvar = np.asarray(logvar, dtype=np.float64)
    target = np.asarray(target)
    if logits.ndim == 2:
        logits, target = logits[None], target[None]
        mu, logvar = mu[None], logvar[None]
    b, t, _ = logits.shape
    logp = log_softmax(logits, axis=-1)
    picked = np.take_along_axis(logp, target[..., None], axis=-1)[..., 0]
    recon = float(-picked.sum() / (b * t))
    kl_each = -0.5 * np.sum(1.0 + logvar - mu * mu - np.exp(logvar), axis=-1)
    kl = float(kl_each.mean())
    return recon + beta * kl, recon, kl


# ---------------------------------------------------------------------------
# backward
# ---------------------------------------------------------------------------


def backward(params: ModelParams, seqs, cond, eps, beta: float):
    """Exact gradients of the mean batch loss for every tensor.

    Returns ((total, recon, kl), grads). The latent noise eps is an input
    so callers can freeze it (gradient checks, beta-linearity tests).
    """
    t_ = params.tensors
    h = params.hyper
    dtype = params.dtype
    seqs = _as_batch(seqs, h.seq_len).astype(np.int64)
    cond = _as_batch(cond, 3).astype(dtype)
    eps = _as_batch(eps, h.latent_dim).astype(dtype)
    b = seqs.shape[0]
    tn = h.seq_len

    mu, logvar, enc_cache = _encode_forward(params, seqs, cond)
    z = reparameterize(mu, logvar, eps)
    logits, dec_cache = _decode_forward(params, z, cond, seqs)
    total, recon, kl = elbo_loss(logits, seqs, mu, logvar, beta)
    if not np.isfinite(total):
        raise TrainingDivergedError(f"non-finite loss: total={total} recon={recon} kl={kl}")

    g = zero_params_like(params)

    dlogits = softmax(logits)
    rows = np.repeat(np.arange(b), tn)
    cols = np.tile(np.arange(tn), b)
    dlogits[rows, cols, seqs.ravel()] -= 1.0
    dlogits /= b * tn

    # decoder segments, in reverse
    dseg = [np.zeros((b, h.conductor_hidden), dtype=dtype) for _ in range(h.segments)]
    for s in range(h.segments - 1, -1, -1):
        rec = dec_cache["segs"][s]
        dh = np.zeros((b, h.dec_hidden), dtype=dtype)
        dc = np.zeros((b, h.dec_hidden), dtype=dtype)
        for j in range(h.segment_len - 1, -1, -1):
            t = s * h.segment_len + j
            cache, hd = rec["steps"][j]
            dlog = dlogits[:, t]
            g["out.w"] += hd.T @ dlog
            g["out.b"] += dlog.sum(axis=0)
            dh = dh + dlog @ t_["out.w"].T
            dx, dh, dc = lstm_step_backward(
                t_["dec.wx"], t_["dec.wh"], cache, dh, dc, g["dec.wx"], g["dec.wh"], g["dec.b"]
            )
            dprev = dx[:, : h.embed_dim]
            dseg[s] += dx[:, h.embed_dim :]
            if j == 0:
                g["start_embed"] += dprev.sum(axis=0)
            else:
                np.add.at(g["embed"], seqs[:, t - 1], dprev)
        init = rec["init"]
        dpre = np.concatenate([dh, dc], axis=1) * (1.0 - init * init)
        g["dec_init.w"] += rec["seg"].T @ dpre
        g["dec_init.b"] += dpre.sum(axis=0)
        dseg[s] += dpre @ t_["dec_init.w"].T

    # conductor, in reverse
    dh = np.zeros((b, h.conductor_hidden), dtype=dtype)
    dc = np.zeros((b, h.conductor_hidden), dtype=dtype)
    dzc = np.zeros((b, h.latent_dim + 3), dtype=dtype)
    for s in range(h.segments - 1, -1, -1):
        dh = dh + dseg[s]
        dx, dh, dc = lstm_step_backward(
            t_["conductor.wx"],
            t_["conductor.wh"],
            dec_cache["cond_caches"][s],
            dh,
            dc,
            g["conductor.wx"],
            g["conductor.wh"],
            g["conductor.b"],
        )
        dzc += dx
    dz = dzc[:, : h.latent_dim]

    # reparameterization and KL
    sigma = np.exp(0.5 * logvar)
    dmu = dz + (beta / b) * mu
    dlogvar = dz * eps * 0.5 * sigma + (beta / b) * 0.5 * (np.exp(logvar) - 1.0)

    henc = enc_cache["henc"]
    g["mu.w"] += henc.T @ dmu
    g["mu.b"] += dmu.sum(axis=0)
    g["logvar.w"] += henc.T @ dlogvar
    g["logvar.b"] += dlogvar.sum(axis=0)
    dhenc = dmu @ t_["mu.w"].T + dlogvar @ t_["logvar.w"].T

    he = h.enc_hidden
    dinputs = [np.zeros((b, h.embed_dim), dtype=dtype) for _ in range(tn + 1)]

    dh = dhenc[:, :he]
    dc = np.zeros((b, he), dtype=dtype)
    for t in range(tn, -1, -1):
        dx, dh, dc = lstm_step_backward(
            t_["enc_fwd.wx"],
            t_["enc_fwd.wh"],
            enc_cache["fwd"][t],
            dh,
            dc,
            g["enc_fwd.wx"],
            g["enc_fwd.wh"],
            g["enc_fwd.b"],
        )
        dinputs[t] += dx

    dh = dhenc[:, he:]
    dc = np.zeros((b, he), dtype=dtype)
    for r in range(tn, -1, -1):
        dx, dh, dc = lstm_step_backward(
            t_["enc_bwd.wx"],
            t_["enc_bwd.wh"],
            enc_cache["bwd"][r],
            dh,
            dc,
            g["enc_bwd.wx"],
            g["enc_bwd.wh"],
            g["enc_bwd.b"],
        )
        dinputs[tn - r] += dx

    g["cond_lift.w"] += cond.T @ dinputs[0]
    g["cond_lift.b"] += dinputs[0].sum(axis=0)
    for t in range(1, tn + 1):
        np.add.at(g["embed"], seqs[:, t - 1], dinputs[t])

    return (total, recon, kl), g


# ---------------------------------------------------------------------------
# training
# ---------------------------------------------------------------------------


def beta_at_step(h: Hyperparams, step: int) -> float:
    """Linear warmup 0 -> beta_max over beta_warmup_steps optimizer steps."""
    if h.beta_warmup_steps <= 0:
        return h.beta_max
    return h.beta_max * min(1.0, step / h.beta_warmup_steps)


def train(dataset: MelodyDataset, h: Hyperparams):
    """Fit the model on a corpus; returns (params, per-epoch loss history)."""
    stats = component_stats(dataset)
    if dataset.sequences.shape[1] != h.seq_len:
        raise ValueError(
            f"model expects sequences of length {h.seq_len}, corpus has {dataset.sequences.shape[1]}"
        )
    if dataset.vocab.size != h.vocab_size or dataset.vocab.midi_low != h.vocab_low:
        raise ValueError("hyperparameter vocabulary disagrees with the corpus vocabulary")

    rng = make_rng(h.seed)
    params = init_params(h, stats, rng, dtype=np.float32)
    cond_all = standardize(stats, dataset.components).astype(np.float32)
    seq_all = dataset.sequences
    n = len(dataset)

    m = zero_params_like(params)
    v = zero_params_like(params)
    lr = h.learning_rate
    step = 0
    adam_t = 0
    history: list[tuple[float, float, float]] = []

    for _ in range(h.epochs):
        order = rng.permutation(n)
        sums = np.zeros(3)
        for lo in range(0, n, h.batch):
            idx = order[lo : lo + h.batch]
            eps = rng.standard_normal((len(idx), h.latent_dim)).astype(np.float32)
            beta = beta_at_step(h, step)
            losses, grads = backward(params, seq_all[idx], cond_all[idx], eps, beta)
            adam_t += 1
            bc1 = 1.0 - ADAM_BETA1**adam_t
            bc2 = 1.0 - ADAM_BETA2**adam_t
            for name, grad in grads.items():
                m[name] = ADAM_BETA1 * m[name] + (1.0 - ADAM_BETA1) * grad
                v[name] = ADAM_BETA2 * v[name] + (1.0 - ADAM_BETA2) * grad * grad
                params.tensors[name] -= lr * (m[name] / bc1) / (np.sqrt(v[name] / bc2) + ADAM_EPS)
            sums += len(idx) * np.array(losses)
            step += 1
        history.append(tuple(float(x) for x in sums / n))

    return params, history


def reconstruction_accuracy(params: ModelParams, seqs, components) -> float:
    """Teacher-forced argmax accuracy using the posterior mean (no noise)."""
    seqs = _as_batch(seqs, params.hyper.seq_len).astype(np.int64)
    cond = standardize(params.stats, components).astype(params.dtype)
    mu, logvar, _ = _encode_forward(params, seqs, cond)
    logits, _ = _decode_forward(params, mu, cond, seqs)
    return float(np.mean(np.argmax(logits, axis=-1) == seqs))
