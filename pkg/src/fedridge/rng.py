"""Deterministic random number generation.

All stochastic pieces of the package (synthetic data, privacy noise,
projection matrices, client sampling) draw from PCG64 generators built here,
so a seed fully determines every artifact on every platform.

Gaussian variates are produced by an explicit Box-Muller transform over the
generator's uniform stream instead of the generator's own ziggurat sampler.
The transform is a short, documented recipe, which keeps the stream easy to
reproduce independently (e.g. in another language) for auditing noise draws:

    u1, u2 ~ U[0, 1)         two blocks of ceil(n / 2) uniforms, u1 first
    r      = sqrt(-2 * log1p(-u1))
    theta  = 2 * pi * u2
    z      = concat(r * cos(theta), r * sin(theta))[:n]
"""

from __future__ import annotations

import math

import numpy as np


def generator(*seed_parts: int) -> np.random.Generator:
    """Build a PCG64 generator from one or more integer seed components.

    A single component seeds PCG64 directly; multiple components are combined
    through numpy's SeedSequence so (seed, round, client) style derivations
    are collision-resistant and order-sensitive.
    """
    if not seed_parts:
        raise ValueError("at least one seed component is required")
    entropy = seed_parts[0] if len(seed_parts) == 1 else list(seed_parts)
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


def standard_normals(rng: np.random.Generator, shape: int | tuple[int, ...]) -> np.ndarray:
    """Draw standard normal variates via Box-Muller on ``rng``'s uniforms.

    The draw order is fixed by the module recipe; callers relying on stream
    positions (noise audits, nested projection prefixes) must not reorder
    the uniform consumption.
    """
    if isinstance(shape, int):
        shape = (shape,)
    count = 1
    for extent in shape:
        if extent < 0:
            raise ValueError("shape extents must be nonnegative")
        count *= extent
    if count == 0:
        return np.zeros(shape, dtype=np.float64)
    half = (count + 1) // 2
    u1 = rng.random(half)
    u2 = rng.random(half)
    # log1p(-u1) maps [0, 1) to (-inf, 0] without ever taking log(0)
    radius = np.sqrt(-2.0 * np.log1p(-u1))
    theta = (2.0 * math.pi) * u2
    z = np.concatenate([radius * np.cos(theta), radius * np.sin(theta)])[:count]
    return z.reshape(shape)
