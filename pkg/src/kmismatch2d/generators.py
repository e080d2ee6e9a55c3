"""Random instance families for benchmarks and randomized tests.

Every generator takes a ``numpy.random.Generator`` and returns
``(pattern, text)`` as origin-anchored square grids.
"""
import numpy as np

from .gridstring import Grid2D

FAMILIES = ("uniform", "periodic", "occurrence")


def _grid(cells):
    return Grid2D((0, 0), np.ascontiguousarray(cells, dtype=np.int64))


def _perturb(cells, count, sigma, rng):
    """Overwrite ``count`` distinct random cells with a different symbol (when ``sigma > 1``)."""
    out = cells.copy()
    if sigma < 2 or count <= 0:
        return out
    flat = out.reshape(-1)
    where = rng.choice(flat.size, size=min(count, flat.size), replace=False)
    flat[where] = (flat[where] + rng.integers(1, sigma, size=len(where))) % sigma
    return out


def uniform(n, m, sigma, rng):
    return _grid(rng.integers(0, sigma, (m, m))), _grid(rng.integers(0, sigma, (n, n)))


def periodic(n, m, sigma, rng, k=0, max_period=4):
    """Text tiled by a small random block plus sparse noise; pattern cut from the clean tiling.

    Roughly ``k/2`` noise cells fall into every ``m x m`` area of the text and
    the pattern carries ``k/2`` changes of its own, so many offsets sit near
    the threshold.
    """
    px, py = (int(v) for v in rng.integers(1, max_period + 1, 2))
    block = rng.integers(0, sigma, (px, py))
    clean = np.tile(block, (n // px + 2, n // py + 2))
    text = clean[:n, :n]
    noise = (k * n * n) // max(2 * m * m, 1)
    text = _perturb(text, noise, sigma, rng)
    ox, oy = (int(v) for v in rng.integers(0, max(px, py) + 1, 2))
    pattern = _perturb(clean[ox:ox + m, oy:oy + m], k // 2, sigma, rng)
    return _grid(pattern), _grid(text)


def occurrence(n, m, sigma, rng, k=0):
    """Random text with the pattern planted at one offset with at most ``k`` changes.

    Returns the planted offset as a third value.
    """
    pattern = rng.integers(0, sigma, (m, m))
    text = rng.integers(0, sigma, (n, n))
    qx, qy = (int(v) for v in rng.integers(0, n - m + 1, 2))
    changes = int(rng.integers(0, k + 1)) if k else 0
    text[qx:qx + m, qy:qy + m] = _perturb(pattern, changes, sigma, rng)
    return _grid(pattern), _grid(text), (qx, qy)


def make(family, n, m, sigma, rng, k=0):
    """Dispatch by family name, always returning ``(pattern, text)``."""
    if family == "uniform":
        return uniform(n, m, sigma, rng)
    if family == "periodic":
        return periodic(n, m, sigma, rng, k)
    if family == "occurrence":
        return occurrence(n, m, sigma, rng, k)[:2]
    raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
