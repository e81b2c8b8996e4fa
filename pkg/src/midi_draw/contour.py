"""Contour math: orthonormal DCT, low-frequency components, stroke resampling.

A melody or drawn curve is a length-16 pitch series. Its slow-moving trend
is captured by the three lowest non-constant cosine amplitudes (transform
indices 1..3); the constant component (index 0, the register) and anything
above index 3 are thrown away. All arithmetic is float64 so the tight
round-trip tolerances hold.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_STEPS = 16
N_COMPONENTS = 3


def _basis(n: int = N_STEPS) -> np.ndarray:
    """Orthonormal DCT-II matrix G with G[k, t] = s_k * cos(pi*(2t+1)*k/(2n))."""
    k = np.arange(n)[:, None]
    t = np.arange(n)[None, :]
    g = np.cos(np.pi * (2 * t + 1) * k / (2 * n))
    scale = np.full(n, np.sqrt(2.0 / n))
    scale[0] = np.sqrt(1.0 / n)
    return scale[:, None] * g


_G = _basis()


def _check_series(x, name: str = "series") -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.shape != (N_STEPS,):
        raise ValueError(f"{name} must have exactly {N_STEPS} values, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains non-finite values")
    return x


@dataclass(frozen=True)
class ContourComponents:
    """Amplitudes of transform indices 1..3, in semitone-scaled basis units."""

    c1: float
    c2: float
    c3: float

    def __post_init__(self):
        if not all(np.isfinite(v) for v in (self.c1, self.c2, self.c3)):
            raise ValueError("contour components must be finite")

    def as_array(self) -> np.ndarray:
        return np.array([self.c1, self.c2, self.c3], dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "ContourComponents":
        a = np.asarray(a, dtype=np.float64)
        if a.shape != (N_COMPONENTS,):
            raise ValueError(f"expected {N_COMPONENTS} components, got shape {a.shape}")
        return cls(float(a[0]), float(a[1]), float(a[2]))


@dataclass(frozen=True)
class DrawnStroke:
    """A freehand stroke in canvas coordinates (y grows downward)."""

    points: tuple  # ordered (x, y) pairs
    canvas_width: float
    canvas_height: float
    pitch_low: float = 48.0
    pitch_high: float = 83.0

    def __post_init__(self):
        object.__setattr__(self, "points", tuple((float(x), float(y)) for x, y in self.points))
        if len(self.points) < 2:
            raise ValueError("stroke needs at least 2 points")
        if self.canvas_width <= 0 or self.canvas_height <= 0:
            raise ValueError("canvas dimensions must be positive")
        if not self.pitch_low < self.pitch_high:
            raise ValueError("pitch_low must be below pitch_high")
        flat = [v for p in self.points for v in p]
        if not all(np.isfinite(v) for v in flat):
            raise ValueError("stroke contains non-finite coordinates")


def dct_forward(x) -> np.ndarray:
    """Forward orthonormal transform of a 16-sample pitch series."""
    x = _check_series(x)
    return _G @ x


def dct_inverse(amps) -> np.ndarray:
    """Inverse transform; exact inverse of :func:`dct_forward`."""
    amps = _check_series(amps, name="amplitudes")
    return _G.T @ amps


def extract_components(x) -> ContourComponents:
    """Keep only the slow-trend amplitudes (indices 1..3) of a series."""
    amps = dct_forward(x)
    return ContourComponents(float(amps[1]), float(amps[2]), float(amps[3]))


def components_to_curve(c: ContourComponents) -> np.ndarray:
    """Render components back to a 16-sample zero-mean trend curve."""
    amps = np.zeros(N_STEPS)
    amps[1:4] = c.as_array()
    return dct_inverse(amps)


def component_mse(a: ContourComponents, b: ContourComponents) -> float:
    """Mean squared distance between two component triples."""
    d = a.as_array() - b.as_array()
    return float(np.mean(d * d))


def resample_stroke(stroke: DrawnStroke) -> np.ndarray:
    """Reduce a stroke to 16 pitch samples.

    The stroke becomes a function of x by letting later-drawn segments
    overwrite earlier ones (so backtracking keeps what the user sees).
    Sampling happens at the centers of 16 equal-width bins spanning the
    canvas; x positions outside the stroke extend the nearest endpoint.
    Canvas y maps linearly to pitch with the top edge at pitch_high.
    """
    pts = np.asarray(stroke.points, dtype=np.float64)
    xs = pts[:, 0]
    x_min, x_max = xs.min(), xs.max()

    sample_x = (np.arange(N_STEPS) + 0.5) * (stroke.canvas_width / N_STEPS)
    sample_x = np.clip(sample_x, x_min, x_max)

    y = np.full(N_STEPS, pts[0, 1])
    for (xa, ya), (xb, yb) in zip(pts[:-1], pts[1:]):
        lo, hi = (xa, xb) if xa <= xb else (xb, xa)
        covered = (sample_x >= lo) & (sample_x <= hi)
        if not covered.any():
            continue
        if xb == xa:
            y[covered] = yb  # vertical segment: last-drawn y wins
        else:
            t = (sample_x[covered] - xa) / (xb - xa)
            y[covered] = ya + t * (yb - ya)

    frac = y / stroke.canvas_height
    return stroke.pitch_high - frac * (stroke.pitch_high - stroke.pitch_low)


def fit_vs_k(x, k_max: int) -> list[tuple[int, float]]:
    """Reconstruction error (RMSE) of a series from its first k trend components.

    The constant component is kept at the signal's true mean for every k,
    so the comparison happens at the sketch's own register.
    """
    if not isinstance(k_max, (int, np.integer)) or not 1 <= k_max <= N_STEPS - 1:
        raise ValueError(f"k_max must be an int in [1, {N_STEPS - 1}], got {k_max!r}")
    x = _check_series(x)
    amps = _G @ x
    out = []
    for k in range(1, k_max + 1):
        masked = np.zeros(N_STEPS)
        masked[0] = amps[0]
        masked[1 : k + 1] = amps[1 : k + 1]
        resid = _G.T @ masked - x
        out.append((k, float(np.sqrt(np.mean(resid * resid)))))
    return out
