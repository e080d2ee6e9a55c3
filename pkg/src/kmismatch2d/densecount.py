"""Distances between the pattern and the thin border left over by the text split.

Rare symbols are handled one point at a time by the subtile counter.  Common
symbols are handled per quarter of the window: after reflecting the quarter
into the upper-right corner, only the right and top bands of the pattern can
meet border cells, and each band is matched strip by strip against the part
of the pattern that can actually reach the strip.
"""
import numpy as np

from . import instrument
from .convolve import hamming_per_char_2d
from .errors import BadShape, NotPeripheral
from .gridstring import Grid2D, Sparse2D
from .sparsecount import SubtileTable, sparse_distances
from .textpart import ActiveText, peripheral_width


def split_quarters(F, n):
    """Four sub-strings of ``F`` around the window centre ``((n-1)/2, (n-1)/2)``.

    Order: upper-right, upper-left, lower-left, lower-right.  ``n`` must be
    even so that no integer point sits on a centre line.
    """
    if n % 2:
        raise BadShape("quarter split needs an even window side")
    half = n // 2
    right, upper = F.xs >= half, F.ys >= half
    return [F.subset(right & upper), F.subset(~right & upper),
            F.subset(~right & ~upper), F.subset(right & ~upper)]


# reflections bringing each quarter to the upper-right one: (flip x, flip y)
QUARTER_FLIPS = [(False, False), (True, False), (True, True), (False, True)]


def reflect_string(S, n, flip_x, flip_y):
    xs = n - 1 - S.xs if flip_x else S.xs
    ys = n - 1 - S.ys if flip_y else S.ys
    return Sparse2D(xs, ys, S.syms)


def reflect_grid(G, flip_x, flip_y):
    cells = G.cells
    if flip_x:
        cells = cells[::-1, :]
    if flip_y:
        cells = cells[:, ::-1]
    return Grid2D(G.origin, np.ascontiguousarray(cells))


def reflect_offsets(Q, n, m, flip_x, flip_y):
    Q = np.array(Q, dtype=np.int64).reshape(-1, 2)
    if flip_x:
        Q[:, 0] = n - m - Q[:, 0]
    if flip_y:
        Q[:, 1] = n - m - Q[:, 1]
    return Q


def strip_partition(F1, at, d, axis=0):
    """Cut ``F1`` into bands of width ``d`` along ``axis`` and bound how far each band reaches.

    For vertical bands (``axis=0``) the reach is the smallest ``h`` such that
    every cell ``h`` above a band point, in any of the band's columns, is
    inactive; horizontal bands use the same rule towards the right.
    Returns a list of ``(band, reach)``.
    """
    if len(F1) == 0:
        return []
    along = F1.xs if axis == 0 else F1.ys
    across = F1.ys if axis == 0 else F1.xs
    extreme = at.top if axis == 0 else at.right
    band = along // d
    out = []
    for b in np.unique(band):
        sel = band == b
        reach = int(extreme[np.unique(along[sel])].max() - across[sel].min() + 1)
        out.append((F1.subset(sel), max(reach, 1)))
    return out


def _band_hamming(block, block_origin, V, n, m, acc):
    """Add ``Ham(block + q, V)`` to ``acc[q]`` for every admissible offset ``q``."""
    bw, bh = block.shape
    if bw == 0 or bh == 0 or len(V) == 0:
        return
    x0, x1, y0, y1 = V.bbox()
    wx0, wx1 = max(0, x0 - bw + 1), min(n - 1, x1 + bw - 1)
    wy0, wy1 = max(0, y0 - bh + 1), min(n - 1, y1 + bh - 1)
    window = V.to_grid((wx0, wx1, wy0, wy1))
    if window.width < bw or window.height < bh:
        return
    res = hamming_per_char_2d(Grid2D(block_origin, block), window)
    span = n - m + 1
    qx0, qy0 = res.origin
    vals = res.values
    lx, ly = max(qx0, 0), max(qy0, 0)
    hx, hy = min(qx0 + vals.shape[0], span), min(qy0 + vals.shape[1], span)
    if lx < hx and ly < hy:
        acc[lx:hx, ly:hy] += vals[lx - qx0:hx - qx0, ly - qy0:hy - qy0]


def sigma_border(P, F1, at, Q, d):
    """``Ham(P+q, F1)`` over ``Q`` for a ``d``-peripheral string in the upper-right quarter."""
    n, m = at.n, P.width
    Q = np.asarray(Q, dtype=np.int64).reshape(-1, 2)
    if len(F1) == 0 or len(Q) == 0:
        return np.zeros(len(Q), dtype=np.int64)
    if peripheral_width(at, F1) > d:
        raise NotPeripheral(f"border string reaches deeper than {d}")
    if d == 0:
        return np.zeros(len(Q), dtype=np.int64)
    if 4 * d > m or 2 * d > 2 * m - n:
        instrument.bump("border_full_convolutions")
        full = F1.to_grid((0, n - 1, 0, n - 1))
        return hamming_per_char_2d(P, full).values[Q[:, 0], Q[:, 1]]
    span = n - m + 1
    acc = np.zeros((span, span), dtype=np.int64)
    cells = P.cells
    # right band: x in [m-d, m), y in [0, m-d), cut by vertical strips
    for V, reach in strip_partition(F1, at, d, axis=0):
        lo = max(0, m - reach)
        if lo < m - d:
            instrument.bump("border_strip_cells", d * (m - d - lo))
            _band_hamming(cells[m - d:, lo:m - d], (m - d, lo), V, n, m, acc)
    # top band: x in [0, m), y in [m-d, m), cut by horizontal strips
    for V, reach in strip_partition(F1, at, d, axis=1):
        lo = max(0, m - reach)
        instrument.bump("border_strip_cells", d * (m - lo))
        _band_hamming(cells[lo:, m - d:], (lo, m - d), V, n, m, acc)
    return acc[Q[:, 0], Q[:, 1]]


def frequent_symbols(pattern_pieces, k):
    counts = {}
    for v in pattern_pieces:
        counts[v.symbol] = counts.get(v.symbol, 0) + 1
    return {a for a, c in counts.items() if c * c >= k}


def dense_distances(lat, P, F, at, Q, pattern_pieces, k, d=None):
    """``Ham(P+q, F)`` over ``Q`` for the border string ``F`` of one window."""
    n, m = at.n, P.width
    Q = np.asarray(Q, dtype=np.int64).reshape(-1, 2)
    if len(F) == 0 or len(Q) == 0:
        return np.zeros(len(Q), dtype=np.int64)
    if d is None:
        d = peripheral_width(at, F)
    instrument.note("border_width", d)
    frequent = frequent_symbols(pattern_pieces, k)
    common = np.isin(F.syms, np.fromiter(frequent, dtype=np.int64, count=len(frequent)))
    rare = F.subset(~common)
    out = np.zeros(len(Q), dtype=np.int64)
    if len(rare):
        instrument.bump("border_rare_cells", len(rare))
        out += sparse_distances(lat, pattern_pieces, SubtileTable.from_points(lat, rare), Q, n, m)
    dense = F.subset(common)
    if len(dense) == 0:
        return out
    for part, (fx, fy) in zip(split_quarters(dense, n), QUARTER_FLIPS):
        if len(part) == 0:
            continue
        Pr = reflect_grid(P, fx, fy)
        Qr = reflect_offsets(Q, n, m, fx, fy)
        at_r = ActiveText(reflect_grid(at.text, fx, fy), reflect_offsets(at.Q, n, m, fx, fy), m)
        out += sigma_border(Pr, reflect_string(part, n, fx, fy), at_r, Qr, d)
    return out
