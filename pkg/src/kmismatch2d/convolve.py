"""Exact correlation counts and the per-character / randomised Hamming routines."""
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy import fft as sfft

from . import instrument
from .errors import BadShape, SizeError
from .gridstring import WILDCARD, Grid2D, as_grid, pad_embed

DIRECT_LIMIT = 1 << 15  # |a| * |b| below which plain np.correlate is used
ROUNDING_GAP = 0.25


def _valid_len(la, lb):
    if lb == 0 or la == 0:
        raise SizeError("cannot correlate empty sequences")
    if lb > la:
        raise SizeError(f"second argument longer than the first ({lb} > {la})")
    return la - lb + 1


def _round_exact(vals):
    out = np.rint(vals)
    gap = np.abs(vals - out).max(initial=0.0)
    if gap >= ROUNDING_GAP:
        raise ArithmeticError(f"floating-point correlation lost exactness (gap {gap:.3f})")
    return out.astype(np.int64)


def correlate_sum(pairs, la, lb):
    """``sum over (a, b) in pairs`` of ``correlate_counts(a, b)``, sharing one inverse transform.

    Every ``a`` has length ``la`` and every ``b`` has length ``lb``.
    """
    out_len = _valid_len(la, lb)
    pairs = list(pairs)
    if not pairs:
        return np.zeros(out_len, dtype=np.int64)
    if la * lb <= DIRECT_LIMIT:
        acc = np.zeros(out_len, dtype=np.int64)
        for a, b in pairs:
            acc += np.correlate(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64), "valid")
        instrument.bump("conv_cells", len(pairs) * (la + lb))
        return acc
    size = sfft.next_fast_len(la + lb - 1, real=True)
    spec = None
    for a, b in pairs:
        fa = sfft.rfft(np.asarray(a, dtype=np.float64), size)
        fb = sfft.rfft(np.asarray(b, dtype=np.float64)[::-1], size)
        spec = fa * fb if spec is None else spec + fa * fb
    full = sfft.irfft(spec, size)
    instrument.bump("conv_cells", (2 * len(pairs) + 1) * size)
    return _round_exact(full[lb - 1: lb - 1 + out_len])


def correlate_counts(a, b):
    """``result[j] = sum_i b[i] * a[i + j]`` for ``j`` in ``[|a| - |b| + 1]``, exactly."""
    a = np.asarray(a)
    b = np.asarray(b)
    return correlate_sum([(a, b)], len(a), len(b))


def hamming_per_char_1d(p, t):
    """Exact wildcard Hamming distance of ``p`` against every alignment in ``t``."""
    p = np.asarray(p)
    t = np.asarray(t)
    p_live = p != WILDCARD
    t_live = t != WILDCARD
    overlap = correlate_counts(t_live, p_live)
    shared = np.intersect1d(np.unique(p[p_live]), np.unique(t[t_live]))
    matches = correlate_sum(((t == c, p == c) for c in shared), len(t), len(p))
    return overlap - matches


@dataclass
class ApproxParams:
    eps: Fraction = Fraction(1)
    r: int | None = None
    seed: int = 0


def default_rounds(pattern_cells, eps=Fraction(1)):
    eps = Fraction(eps)
    if pattern_cells <= 1:
        return 1
    # ceil((log2(m) / eps)^2), computed in floats then nudged to be safe at integers
    val = (math.log2(pattern_cells) / float(eps)) ** 2
    return max(1, math.ceil(val - 1e-9))


def karloff_1d(p, t, eps=Fraction(1), r=None, seed=0):
    """Randomised over-estimate of the 1D wildcard Hamming distances.

    Each round maps every symbol to a random bit and counts binary mismatches,
    which never exceeds the true distance.  The estimate is ``(1+eps)`` times
    the largest round, so it is at most ``(1+eps) * Ham`` always and at least
    ``Ham`` unless every round separates fewer than a ``1/(1+eps)`` share of
    the mismatching pairs.
    """
    p = np.asarray(p)
    t = np.asarray(t)
    eps = Fraction(eps)
    if r is None:
        r = default_rounds(int((p != WILDCARD).sum()), eps)
    p_live = p != WILDCARD
    t_live = t != WILDCARD
    alphabet, inverse = np.unique(np.concatenate([p[p_live], t[t_live]]), return_inverse=True)
    if len(alphabet) <= 2:
        # the binary projection can be made lossless
        return hamming_per_char_1d(p, t)
    p_code = np.full(len(p), -1, dtype=np.int64)
    t_code = np.full(len(t), -1, dtype=np.int64)
    n_live_p = int(p_live.sum())
    p_code[p_live] = inverse[:n_live_p]
    t_code[t_live] = inverse[n_live_p:]
    rng = np.random.default_rng(seed)
    best = None
    for _ in range(r):
        bits = rng.integers(0, 2, size=len(alphabet))
        p1 = p_live & (bits[np.maximum(p_code, 0)] == 1)
        p0 = p_live & ~p1
        t1 = t_live & (bits[np.maximum(t_code, 0)] == 1)
        t0 = t_live & ~t1
        d = correlate_sum([(t1, p0), (t0, p1)], len(t), len(p))
        best = d if best is None else np.maximum(best, d)
    instrument.bump("karloff_rounds", r)
    # floor keeps the deterministic upper bound; Ham is an integer so the lower bound survives
    return (best * eps.numerator + best * eps.denominator) // eps.denominator


def hamming_per_char_2d(P, T):
    """Exact ``Ham(T, P+q)`` for every ``q`` keeping the pattern box inside the text box."""
    gp, gt = as_grid(P), as_grid(T)
    lp, lt, omap = pad_embed(gp, gt)
    return omap.gather(hamming_per_char_1d(lp, lt))


def alphabet_size(*grids):
    syms = [np.unique(g.cells[g.cells != WILDCARD]) for g in grids]
    return len(np.unique(np.concatenate(syms))) if syms else 0


def approx_2d(P, T, params=None):
    """Per-offset estimate ``d`` with ``d <= (1+eps) Ham`` and, with high probability, ``d >= Ham``.

    Small alphabets (no more symbols than rounds) are answered exactly.
    """
    params = params or ApproxParams()
    if not (isinstance(P, Grid2D) and isinstance(T, Grid2D)):
        raise BadShape("approx_2d expects grids")
    if not (P.is_origin_square() and T.is_origin_square()) or P.width > T.width:
        raise BadShape("pattern and text must be origin squares with m <= n")
    r = params.r if params.r is not None else default_rounds(P.size, params.eps)
    if alphabet_size(P, T) <= r:
        instrument.bump("approx_exact_shortcut")
        return hamming_per_char_2d(P, T)
    lp, lt, omap = pad_embed(P, T)
    return omap.gather(karloff_1d(lp, lt, params.eps, r, params.seed))
