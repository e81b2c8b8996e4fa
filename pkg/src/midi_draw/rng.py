"""Single place that fixes the random source for the whole repo.

Every stochastic operation (corpus sampling, weight init, epoch shuffles,
latent draws, per-step candidate sampling) takes an explicit generator
built here. The algorithm is pinned to PCG64 (O'Neill's permuted
congruential generator, 128-bit state / 64-bit output) so that a seed
identifies one stream everywhere; normal variates come from numpy's
ziggurat sampler on top of that stream.
"""

import numpy as np


def make_rng(seed: int) -> np.random.Generator:
    """Return the repo-standard generator (PCG64) for an explicit seed."""
    return np.random.Generator(np.random.PCG64(seed))
