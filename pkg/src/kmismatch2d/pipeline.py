"""End-to-end k-mismatch matching: window cover, per-window branch choice and merging."""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import instrument
from .convolve import ApproxParams, approx_2d, hamming_per_char_2d
from .densecount import dense_distances
from .errors import BadShape, EmptyString, PreconditionViolated
from .gridstring import Grid2D, OffsetCounts, oracle_all_offsets
from .geom import Point
from .periods import get_periods
from .sparsecount import sparse_distances
from .textpart import ActiveText, text_decompose
from .tiling import Lattice, box_sig, tile_decompose
from .verify import baseline_kn2, verify_offsets

ALGOS = ("auto", "naive", "kangaroo", "full")


@dataclass
class PipelineConfig:
    algo: str = "auto"
    seed: int = 0
    eps: Fraction = Fraction(1)
    rounds: int | None = None
    branches: list = field(default_factory=list)

    def __post_init__(self):
        if self.algo not in ALGOS:
            raise ValueError(f"unknown algorithm {self.algo!r}; choose from {', '.join(ALGOS)}")


def window_side(n, m):
    side = 2 * ((3 * m) // 4)
    if side < m:
        side = 2 if m == 1 else m
    return min(side, n)


def cover_text(n, m):
    """Window side and window origins (per axis) covering every offset exactly once or more.

    Consecutive windows overlap by ``m - 1`` so each offset of the text is an
    offset of some window; the last window is pulled back to the text edge.
    """
    side = window_side(n, m)
    if side >= n:
        return n, [0]
    stride = side - m + 1
    origins = list(range(0, n - side, stride)) + [n - side]
    return side, origins


def partition_size(m, k):
    """``max(1, floor(m / k^(3/4)))``, computed exactly; ``m`` when ``k = 0``."""
    if k == 0:
        return m
    lo, hi = 1, m
    while lo < hi:
        mid = (lo + hi + 1) // 2
        if mid ** 4 * k ** 3 <= m ** 4:
            lo = mid
        else:
            hi = mid - 1
    return lo


def _dense_threshold_exceeded(size, m, k):
    # |Q| > 8m + m^2/k, with an infinite bound for k = 0
    return k > 0 and size * k > 8 * m * k + m * m


def periodic_distances(P, Tw, Q, k, strict=True):
    """Exact distances over ``Q`` when the candidates are dense enough to reveal periods."""
    m, n = P.width, Tw.width
    ell = n - m
    with instrument.phase("periods"):
        pp = get_periods([tuple(q) for q in Q], ell, strict=strict)
        lat = Lattice(pp.phi, pp.psi)
    instrument.note("lattice_det", lat.det)
    with instrument.phase("pattern_tiles"):
        pattern_pieces = tile_decompose(P.to_sparse(), box_sig(lat, 0, m - 1, 0, m - 1), lat, k)
    with instrument.phase("text_split"):
        at = ActiveText(Tw, Q, m)
        text_pieces, border = text_decompose(at, lat, partition_size(m, k), k)
    with instrument.phase("sparse"):
        total = sparse_distances(lat, pattern_pieces, text_pieces, Q, n, m)
    with instrument.phase("dense"):
        total = total + dense_distances(lat, P, border, at, Q, pattern_pieces, k)
    return total


def match_window(P, Tw, k, cfg, seed):
    """Capped distances ``min(k+1, Ham)`` for every offset of one window, plus the branch used."""
    m, n = P.width, Tw.width
    span = n - m + 1
    with instrument.phase("approx"):
        est = approx_2d(P, Tw, ApproxParams(cfg.eps, cfg.rounds, seed))
    qx, qy = np.nonzero(est.values <= 2 * k)
    Q = np.stack([qx, qy], axis=1)
    instrument.bump("candidates", len(Q))
    out = np.full((span, span), k + 1, dtype=np.int64)
    branch = "verify"
    if len(Q):
        can_split = n % 2 == 0 and n > m and len(Q) >= 2
        want_periodic = (cfg.algo == "full" or _dense_threshold_exceeded(len(Q), m, k)) and can_split
        dist = None
        if want_periodic:
            try:
                dist = periodic_distances(P, Tw, Q, k, strict=cfg.algo != "full")
                branch = "periodic"
            except PreconditionViolated:
                instrument.bump("periodic_fallbacks")
        if dist is None:
            with instrument.phase("verify"):
                dist = verify_offsets(P, Tw, Q, cap=k + 1)
        out[Q[:, 0], Q[:, 1]] = np.minimum(dist, k + 1)
    instrument.bump(f"windows_{branch}")
    return OffsetCounts(Point(0, 0), out), branch


def _check_inputs(P, T, k):
    if not (isinstance(P, Grid2D) and isinstance(T, Grid2D)):
        raise BadShape("pattern and text must be grids")
    if P.size == 0 or T.size == 0:
        raise EmptyString("empty pattern or text")
    if not (P.is_origin_square() and T.is_origin_square()):
        raise BadShape("pattern and text must be square")
    if P.width > T.width:
        raise BadShape("pattern is larger than the text")
    if k < 0:
        raise ValueError("k must be non-negative")


def _window_seed(seed, ox, oy):
    return int(np.random.SeedSequence([seed, ox, oy]).generate_state(1)[0])


def uses_baseline(m, k):
    return m < 16 or m * m <= 8 * m + m * m // max(k, 1)


def kmismatch(P, T, k, cfg=None):
    """``min(k+1, Ham(P+q, T))`` for every offset ``q`` in ``[n-m+1]^2``."""
    cfg = cfg or PipelineConfig()
    _check_inputs(P, T, k)
    m, n = P.width, T.width
    k = min(k, m * m)    # distances never exceed m^2, so larger k changes nothing
    if cfg.algo == "naive":
        cfg.branches.append("naive")
        return oracle_all_offsets(P, T, k)
    if P.has_wildcards() or T.has_wildcards():
        cfg.branches.append("convolution")
        res = hamming_per_char_2d(P, T)
        return OffsetCounts(res.origin, np.minimum(res.values, k + 1))
    if cfg.algo == "kangaroo" or (cfg.algo == "auto" and uses_baseline(m, k)):
        cfg.branches.append("baseline")
        with instrument.phase("baseline"):
            return baseline_kn2(P, T, k)
    side, origins = cover_text(n, m)
    span, wspan = n - m + 1, side - m + 1
    out = np.full((span, span), -1, dtype=np.int64)
    for ox in origins:
        for oy in origins:
            Tw = Grid2D((0, 0), T.cells[ox:ox + side, oy:oy + side])
            res, branch = match_window(P, Tw, k, cfg, _window_seed(cfg.seed, ox, oy))
            cfg.branches.append(branch)
            block = out[ox:ox + wspan, oy:oy + wspan]
            seen = block >= 0
            if (block[seen] != res.values[seen]).any():
                raise RuntimeError(f"windows disagree on overlapping offsets near {(ox, oy)}")
            block[...] = res.values
    return OffsetCounts(Point(0, 0), out)
