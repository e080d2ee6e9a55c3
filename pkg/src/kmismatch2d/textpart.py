"""The active part of a text window and its split into tile regions and a thin border."""
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import instrument
from .errors import OffsetOutOfRange
from .gridstring import Sparse2D
from .tiling import TruncSig, tile_decompose


def _prefix2d(mask):
    out = np.zeros((mask.shape[0] + 1, mask.shape[1] + 1), dtype=np.int64)
    out[1:, 1:] = np.cumsum(np.cumsum(mask, axis=0), axis=1)
    return out


def _rect_sum(pre, x0, x1, y0, y1):
    # inclusive bounds, already clipped to the array
    return pre[x1 + 1, y1 + 1] - pre[x0, y1 + 1] - pre[x1 + 1, y0] + pre[x0, y0]


class ActiveText:
    """The text restricted to the union of pattern placements over ``Q``.

    Keeps the membership mask with prefix sums, the extreme active cell of
    every row and column, and a prefix-summed offset mask for placement
    queries.  Arrays are indexed ``[x, y]``.
    """

    def __init__(self, T, Q, m):
        n = T.width
        self.n, self.m = n, m
        self.text = T
        span = n - m + 1
        Q = np.asarray(Q, dtype=np.int64).reshape(-1, 2)
        if len(Q) and (Q.min() < 0 or Q.max() >= span):
            raise OffsetOutOfRange("offset places the pattern outside the text")
        self.Q = Q
        qmask = np.zeros((span, span), dtype=np.int64)
        qmask[Q[:, 0], Q[:, 1]] = 1
        self.qmask = qmask
        self.qpre = _prefix2d(qmask)
        # cell (x, y) is active iff some q in [x-m+1, x] x [y-m+1, y]
        padded = np.zeros((n + m, n + m), dtype=np.int64)
        padded[m:m + span, m:m + span] = qmask
        pre = _prefix2d(padded)
        xs = np.arange(n)
        lo, hi = xs + 1, xs + m + 1          # padded rows x-m+1+m .. x+m
        cover = (pre[hi][:, hi] - pre[lo][:, hi] - pre[hi][:, lo] + pre[lo][:, lo])
        self.mask = cover > 0
        self.pre = _prefix2d(self.mask.astype(np.int64))
        any_col = self.mask.any(axis=1)
        any_row = self.mask.any(axis=0)
        self.top = np.where(any_col, n - 1 - np.argmax(self.mask[:, ::-1], axis=1), -1)
        self.bottom = np.where(any_col, np.argmax(self.mask, axis=1), -1)
        self.right = np.where(any_row, n - 1 - np.argmax(self.mask[::-1, :], axis=0), -1)
        self.left = np.where(any_row, np.argmax(self.mask, axis=0), -1)
        xs_a, ys_a = np.nonzero(self.mask)
        self.string = Sparse2D(xs_a, ys_a, T.cells[xs_a, ys_a], presorted=True)

    def contains(self, x, y):
        return 0 <= x < self.n and 0 <= y < self.n and bool(self.mask[x, y])

    def count(self, x0, x1, y0, y1):
        x0, y0 = max(x0, 0), max(y0, 0)
        x1, y1 = min(x1, self.n - 1), min(y1, self.n - 1)
        if x0 > x1 or y0 > y1:
            return 0
        return int(_rect_sum(self.pre, x0, x1, y0, y1))

    def placement_for(self, x0, x1, y0, y1):
        """Some ``q`` in ``Q`` with ``[x0, x1] x [y0, y1]`` inside ``[m]^2 + q``, else None."""
        span = self.n - self.m + 1
        if x0 > x1 or y0 > y1:
            return None
        qx0, qx1 = max(x1 - self.m + 1, 0), min(x0, span - 1)
        qy0, qy1 = max(y1 - self.m + 1, 0), min(y0, span - 1)
        if qx0 > qx1 or qy0 > qy1:
            return None
        if _rect_sum(self.qpre, qx0, qx1, qy0, qy1) == 0:
            return None
        block = self.qmask[qx0:qx1 + 1, qy0:qy1 + 1]
        dx, dy = np.argwhere(block)[0]
        return (int(qx0 + dx), int(qy0 + dy))


def build_active(T, Q, m):
    return ActiveText(T, Q, m)


def border_distance_sq(at, xs=None, ys=None):
    """Squared distance from active cells to the nearest inactive integer point.

    Points outside the text count as inactive.  Without coordinates the whole
    ``n x n`` field is returned (zero on inactive cells).
    """
    padded = np.zeros((at.n + 2, at.n + 2), dtype=bool)
    padded[1:-1, 1:-1] = at.mask
    _, idx = ndimage.distance_transform_edt(padded, return_indices=True)
    gx = np.arange(at.n + 2)[:, None]
    gy = np.arange(at.n + 2)[None, :]
    d2 = (gx - idx[0]) ** 2 + (gy - idx[1]) ** 2
    field = d2[1:-1, 1:-1].astype(np.int64)
    if xs is None:
        return field
    return field[np.asarray(xs), np.asarray(ys)]


def border_distance(at, u):
    return float(np.sqrt(border_distance_sq(at, [u[0]], [u[1]])[0]))


def peripheral_width(at, S):
    """Smallest integer ``d`` with every point of ``S`` within distance ``d`` of the border."""
    if len(S) == 0:
        return 0
    d2 = int(border_distance_sq(at, S.xs, S.ys).max())
    d = int(np.sqrt(d2))
    while d * d < d2:
        d += 1
    return d


def _levels(values, ell):
    """Scaled cut values: ``ell+1`` increasing numerators over a common denominator.

    None of them equals ``denominator * c`` for a value ``c`` in ``values``.
    """
    c = np.unique(values)
    den = 2 * ell * ell
    gap = int(np.diff(c).min()) if len(c) > 1 else 1
    shift = gap * ell                                   # gap / (2 ell), scaled
    first = int(c[0]) * den - shift
    last = int(c[-1]) * den + shift
    step = (last - first) // ell
    nums = np.array([first + i * step for i in range(ell)] + [last], dtype=np.int64)
    hits = (nums % den == 0)
    if hits.any():
        on = np.isin(nums[hits] // den, c)
        nums[np.flatnonzero(hits)[on]] += shift
    return nums, den


class PGrid:
    """An ``ell x ell`` grid of parallelograms cut by lines parallel to ``phi`` and ``psi``.

    Cell ``(i, j)`` holds ``u`` with ``A[i] < den*(phi x u) < A[i+1]`` and
    ``B[j] < den*(psi x u) < B[j+1]``.  The lines avoid every value taken on
    ``[n]^2``, so each point of the square lies in exactly one cell.
    """

    def __init__(self, n, lat, ell):
        self.n, self.lat, self.ell = n, lat, ell
        xs, ys = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        self.A, self.den = _levels(lat.phi_cross(xs, ys).ravel(), ell)
        self.B, _ = _levels(lat.psi_cross(xs, ys).ravel(), ell)
        # vertex (i, j) = (A[i] * psi - B[j] * phi) / (det * den)
        phi, psi = lat.phi, lat.psi
        self.vden = lat.det * self.den
        self.vx = self.A[:, None] * psi.x - self.B[None, :] * phi.x
        self.vy = self.A[:, None] * psi.y - self.B[None, :] * phi.y
        corners_x = np.stack([self.vx[:-1, :-1], self.vx[1:, :-1], self.vx[:-1, 1:], self.vx[1:, 1:]])
        corners_y = np.stack([self.vy[:-1, :-1], self.vy[1:, :-1], self.vy[:-1, 1:], self.vy[1:, 1:]])
        self.min_x, self.max_x = corners_x.min(axis=0), corners_x.max(axis=0)
        self.min_y, self.max_y = corners_y.min(axis=0), corners_y.max(axis=0)

    def cell_of(self, xs, ys):
        a = self.lat.phi_cross(xs, ys) * self.den
        b = self.lat.psi_cross(xs, ys) * self.den
        return np.searchsorted(self.A, a) - 1, np.searchsorted(self.B, b) - 1

    def span_x(self, i0, i1, j0, j1):
        return self.min_x[i0:i1, j0:j1].min(), self.max_x[i0:i1, j0:j1].max()

    def span_y(self, i0, i1, j0, j1):
        return self.min_y[i0:i1, j0:j1].min(), self.max_y[i0:i1, j0:j1].max()

    def integer_box(self, i0, i1, j0, j1):
        """Bounding box of the integer points of the union of cells ``[i0,i1) x [j0,j1)``."""
        lo_x, hi_x = self.span_x(i0, i1, j0, j1)
        lo_y, hi_y = self.span_y(i0, i1, j0, j1)
        d = self.vden
        return (-(-int(lo_x) // d), int(hi_x) // d, -(-int(lo_y) // d), int(hi_y) // d)

    def max_span_exceeds(self, limit_num, limit_den):
        """True when some cell's x- or y-extent is at least ``limit_num / limit_den``."""
        wx = (self.max_x - self.min_x) * limit_den
        wy = (self.max_y - self.min_y) * limit_den
        lim = limit_num * self.vden
        return bool((wx >= lim).any() or (wy >= lim).any())

    def run_sig(self, i0, i1, j):
        """Plain tile signature of the integer points in cells ``[i0, i1)`` of column ``j``."""
        d = self.den
        return TruncSig(phi0=int(self.A[i0]) // d + 1, phi1=-(-int(self.A[i1]) // d) - 1,
                        psi0=int(self.B[j]) // d + 1, psi1=-(-int(self.B[j + 1]) // d) - 1)


def build_pgrid(n, lat, ell):
    return PGrid(n, lat, ell)


def classify_cell(at, grid, i, j):
    """``('coverable', q)``, ``('peripheral', None)`` or ``('straddling', None)``.

    A cell in one quarter of the window is tested at the bounding-box corner
    that points towards the window's centre; cells crossing a centre line are
    reported as straddling.
    """
    twice_z = at.n - 1
    d = grid.vden
    crosses_x = grid.min_x[i, j] * 2 < twice_z * d < grid.max_x[i, j] * 2
    crosses_y = grid.min_y[i, j] * 2 < twice_z * d < grid.max_y[i, j] * 2
    if crosses_x or crosses_y:
        return ("straddling", None)
    x0, x1, y0, y1 = grid.integer_box(i, i + 1, j, j + 1)
    if x0 > x1 or y0 > y1:
        return ("coverable", None)
    right = grid.min_x[i, j] * 2 > twice_z * d
    upper = grid.min_y[i, j] * 2 > twice_z * d
    corner = (x1 if right else x0, y1 if upper else y0)
    if not at.contains(*corner):
        return ("peripheral", None)
    q = at.placement_for(x0, x1, y0, y1)
    return ("coverable", q) if q is not None else ("peripheral", None)


@dataclass
class TextSplit:
    pieces: list
    border: Sparse2D
    runs: list
    early_out: bool


def text_decompose(at, lat, ell, k=None):
    """Split the active text into monochromatic subtiles and a leftover border string.

    Along every column of the grid, maximal runs of consecutive cells whose
    integer points fit inside one pattern placement become tile strings and
    are cut into subtiles; all remaining active cells form the border.
    Returns ``(pieces, border)``.
    """
    split = text_split(at, lat, ell, k)
    return split.pieces, split.border


def text_split(at, lat, ell, k=None):
    grid = PGrid(at.n, lat, ell)
    S = at.string
    if grid.max_span_exceeds(at.m, 4):
        instrument.bump("text_early_out")
        return TextSplit([], S, [], True)
    ci, cj = grid.cell_of(S.xs, S.ys)
    run_of = np.full(len(S), -1, dtype=np.int64)
    runs = []

    def coverable(i0, i1, j):
        x0, x1, y0, y1 = grid.integer_box(i0, i1, j, j + 1)
        if x0 > x1 or y0 > y1:
            return True
        return at.placement_for(x0, x1, y0, y1) is not None

    order = np.lexsort((ci, cj))
    bounds = np.searchsorted(cj[order], np.arange(ell + 1))
    for j in range(ell):
        members = order[bounds[j]:bounds[j + 1]]
        i = 0
        while i < ell:
            if not coverable(i, i + 1, j):
                i += 1
                continue
            e = i + 1
            while e < ell and coverable(i, e + 1, j):
                e += 1
            sel = members[(ci[members] >= i) & (ci[members] < e)]
            if len(sel):
                run_of[sel] = len(runs)
                runs.append((i, e, j, np.sort(sel)))
            i = e
    pieces = []
    for i0, i1, j, sel in runs:
        pieces.extend(tile_decompose(S.subset(sel), grid.run_sig(i0, i1, j), lat, k))
    border = S.subset(run_of < 0)
    instrument.bump("text_runs", len(runs))
    instrument.bump("text_pieces", len(pieces))
    instrument.bump("border_cells", len(border))
    return TextSplit(pieces, border, [(a, b, c) for a, b, c, _ in runs], False)
