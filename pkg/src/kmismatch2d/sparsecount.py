"""Exact distances between the pattern and a family of monochromatic text subtiles.

For a text subtile ``S`` with symbol ``a`` and a pattern piece ``V``,
``|dom(S) ∩ dom(V+q)|`` is an alternating sum over the four corner anchors
``w`` of ``S`` of ``|(D - q) ∩ (V - w)|``, where ``D`` is the cone spanned by
``phi`` and ``psi``.  Summing over all pairs means counting, for each lattice
point, how many shifted pieces contain it and then taking cone sums, which is
a two-axis suffix sum in lattice coordinates.
"""
from dataclasses import dataclass

import numpy as np

from . import instrument
from .convolve import hamming_per_char_2d
from .errors import MissingSignature, MixedClasses, OverlapError, TruncatedInput
from .geom import Point
from .gridstring import Grid2D
from .tiling import gamma_set

BRUTE_FORCE_LIMIT = 1 << 16
UNBOUNDED = 1 << 40


def _ceil_div(a, b):
    return -((-a) // b)


def _corner_params(lat, gx, gy, phi0, phi1, psi0, psi1):
    det = lat.det
    pg = lat.phi_cross(gx, gy)
    qg = lat.psi_cross(gx, gy)
    t0 = _ceil_div(phi0 - pg, det)
    t1 = (phi1 - pg) // det + 1
    s0 = _ceil_div(qg - psi1, det)
    s1 = (qg - psi0) // det + 1
    return s0, s1, t0, t1


def corner_decompose(lat, sig):
    """Four ``(sign, anchor)`` pairs with ``1_S = sum sign * 1_(D + anchor)``."""
    if sig.truncated:
        raise TruncatedInput("corner decomposition needs an untruncated subtile")
    if sig.gamma is None or None in (sig.phi0, sig.phi1, sig.psi0, sig.psi1):
        raise MissingSignature("subtile signature needs a class and finite lattice ranges")
    gamma = sig.gamma
    s0, s1, t0, t1 = _corner_params(lat, gamma.x, gamma.y, sig.phi0, sig.phi1, sig.psi0, sig.psi1)
    if s0 >= s1 or t0 >= t1:
        return [(1, gamma), (-1, gamma), (-1, gamma), (1, gamma)]
    out = []
    for i, s in enumerate((s0, s1)):
        for j, t in enumerate((t0, t1)):
            sign = 1 if (i + j) % 2 == 0 else -1
            out.append((sign, Point(gamma.x + s * lat.phi.x + t * lat.psi.x,
                                    gamma.y + s * lat.phi.y + t * lat.psi.y)))
    return out


@dataclass
class SubtileTable:
    """Column arrays describing many (truncated) subtiles; unbounded sides use ``±UNBOUNDED``."""
    sym: np.ndarray
    gx: np.ndarray
    gy: np.ndarray
    phi0: np.ndarray
    phi1: np.ndarray
    psi0: np.ndarray
    psi1: np.ndarray
    x0: np.ndarray
    x1: np.ndarray
    y0: np.ndarray
    y1: np.ndarray
    bx0: np.ndarray      # bounding box of the actual points
    bx1: np.ndarray
    by0: np.ndarray
    by1: np.ndarray
    xs: np.ndarray       # all member points, for unions and overlap checks
    ys: np.ndarray

    def __len__(self):
        return len(self.sym)

    @classmethod
    def from_pieces(cls, pieces):
        def col(getter, default=0):
            return np.array([default if getter(p) is None else getter(p) for p in pieces], dtype=np.int64)
        if any(p.sig.gamma is None for p in pieces):
            raise MissingSignature("every subtile needs a class representative")
        return cls(
            sym=col(lambda p: p.symbol),
            gx=col(lambda p: p.sig.gamma.x), gy=col(lambda p: p.sig.gamma.y),
            phi0=col(lambda p: p.sig.phi0, -UNBOUNDED), phi1=col(lambda p: p.sig.phi1, UNBOUNDED),
            psi0=col(lambda p: p.sig.psi0, -UNBOUNDED), psi1=col(lambda p: p.sig.psi1, UNBOUNDED),
            x0=col(lambda p: p.sig.x0, -UNBOUNDED), x1=col(lambda p: p.sig.x1, UNBOUNDED),
            y0=col(lambda p: p.sig.y0, -UNBOUNDED), y1=col(lambda p: p.sig.y1, UNBOUNDED),
            bx0=col(lambda p: p.string.xs.min()), bx1=col(lambda p: p.string.xs.max()),
            by0=col(lambda p: p.string.ys.min()), by1=col(lambda p: p.string.ys.max()),
            xs=np.concatenate([p.string.xs for p in pieces]) if pieces else np.zeros(0, np.int64),
            ys=np.concatenate([p.string.ys for p in pieces]) if pieces else np.zeros(0, np.int64),
        )

    @classmethod
    def from_points(cls, lat, S):
        """One single-point subtile per point of the sparse string ``S``."""
        xs, ys = S.xs.copy(), S.ys.copy()
        pc, qc = lat.phi_cross(xs, ys), lat.psi_cross(xs, ys)
        inf = np.full(len(xs), UNBOUNDED, dtype=np.int64)
        return cls(S.syms.astype(np.int64), xs, ys, pc, pc.copy(), qc, qc.copy(),
                   -inf, inf, -inf.copy(), inf.copy(), xs, xs, ys, ys, xs, ys)

    @classmethod
    def concat(cls, tables):
        names = cls.__dataclass_fields__
        return cls(**{f: np.concatenate([getattr(t, f) for t in tables]) for f in names})


def _corner_anchors(lat, tab):
    """Vectorised corner decomposition: ``(owner, sign, wx, wy)`` with four rows per subtile."""
    if ((tab.x0 != -UNBOUNDED) | (tab.x1 != UNBOUNDED) | (tab.y0 != -UNBOUNDED)
            | (tab.y1 != UNBOUNDED)).any():
        raise TruncatedInput("corner decomposition needs untruncated subtiles")
    s0, s1, t0, t1 = _corner_params(lat, tab.gx, tab.gy, tab.phi0, tab.phi1, tab.psi0, tab.psi1)
    empty = (s0 >= s1) | (t0 >= t1)
    owner = np.repeat(np.arange(len(tab)), 4)
    s = np.stack([s0, s0, s1, s1], axis=1).ravel()
    t = np.stack([t0, t1, t0, t1], axis=1).ravel()
    sign = np.tile(np.array([1, -1, -1, 1], dtype=np.int64), len(tab))
    dead = np.repeat(empty, 4)
    s[dead] = 0
    t[dead] = 0
    wx = tab.gx[owner] + s * lat.phi.x + t * lat.psi.x
    wy = tab.gy[owner] + s * lat.phi.y + t * lat.psi.y
    return owner, sign, wx, wy


class ClassTable:
    """Maps points to the index of their lattice class."""

    def __init__(self, lat):
        self.lat = lat
        reps = gamma_set(lat)
        keys = lat.class_key(np.array([p.x for p in reps]), np.array([p.y for p in reps]))
        order = np.argsort(keys)
        self.keys = keys[order]
        self.reps_x = np.array([reps[i].x for i in order], dtype=np.int64)
        self.reps_y = np.array([reps[i].y for i in order], dtype=np.int64)

    def index(self, xs, ys):
        return np.searchsorted(self.keys, self.lat.class_key(xs, ys))


class LatticeField:
    """Integer values on all lattice points ``rep_c + s*phi + t*psi`` of a lattice-aligned window."""

    def __init__(self, lat, bounds, table=None):
        self.lat = lat
        self.table = table or ClassTable(lat)
        x0, x1, y0, y1 = bounds
        cx = np.array([x0, x0, x1, x1])
        cy = np.array([y0, y1, y0, y1])
        # one extra lattice step on each side absorbs the class representative offset
        s_all = lat.s_num(cx, cy) // lat.det
        t_all = lat.t_num(cx, cy) // lat.det
        self.s_lo, self.s_hi = int(s_all.min()) - 1, int(s_all.max()) + 1
        self.t_lo, self.t_hi = int(t_all.min()) - 1, int(t_all.max()) + 1
        shape = (len(self.table.keys), self.s_hi - self.s_lo + 1, self.t_hi - self.t_lo + 1)
        self.values = np.zeros(shape, dtype=np.int64)

    def locate(self, xs, ys):
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        c = self.table.index(xs, ys)
        rx, ry = self.table.reps_x[c], self.table.reps_y[c]
        s = self.lat.s_num(xs - rx, ys - ry) // self.lat.det
        t = self.lat.t_num(xs - rx, ys - ry) // self.lat.det
        return c, s - self.s_lo, t - self.t_lo

    def at(self, xs, ys):
        c, s, t = self.locate(xs, ys)
        return self.values[c, s, t]


def _rasterize(field, box, weights):
    """Add ``weight`` on every lattice point of every box, one scanline per lattice row.

    ``box`` is a mapping of column arrays with keys ``gx gy phi0 phi1 psi0
    psi1 x0 x1 y0 y1``.
    """
    if len(weights) == 0:
        return
    lat = field.lat
    det, phi, psi = lat.det, lat.phi, lat.psi
    c = field.table.index(box["gx"], box["gy"])
    rx, ry = field.table.reps_x[c], field.table.reps_y[c]
    pg = lat.phi_cross(rx, ry)
    qg = lat.psi_cross(rx, ry)
    t_min = np.maximum(_ceil_div(box["phi0"] - pg, det), field.t_lo)
    t_max = np.minimum((box["phi1"] - pg) // det, field.t_hi)
    s_min = np.maximum(_ceil_div(qg - box["psi1"], det), field.s_lo)
    s_max = np.minimum((qg - box["psi0"]) // det, field.s_hi)
    rows = np.maximum(s_max - s_min + 1, 0)
    rows[t_min > t_max] = 0
    total = int(rows.sum())
    instrument.bump("box_rows", total)
    if total == 0:
        return
    owner = np.repeat(np.arange(len(rows)), rows)
    first = np.cumsum(rows) - rows
    s = s_min[owner] + (np.arange(total) - first[owner])
    bx = rx[owner] + s * phi.x
    by = ry[owner] + s * phi.y
    lo, hi = t_min[owner], t_max[owner]
    for coef, base, low, high in ((psi.x, bx, box["x0"][owner], box["x1"][owner]),
                                  (psi.y, by, box["y0"][owner], box["y1"][owner])):
        lo, hi = _clip_line(coef, base, low, high, lo, hi)
    keep = lo <= hi
    cc, ss = c[owner][keep], s[keep] - field.s_lo
    w = np.asarray(weights, dtype=np.int64)[owner][keep]
    nt = field.values.shape[2]
    diff = np.zeros(field.values.shape[:2] + (nt + 1,), dtype=np.int64)
    np.add.at(diff, (cc, ss, lo[keep] - field.t_lo), w)
    np.add.at(diff, (cc, ss, hi[keep] + 1 - field.t_lo), -w)
    field.values += np.cumsum(diff, axis=2)[:, :, :nt]


def _clip_line(coef, base, low, high, lo, hi):
    """Restrict ``t`` in ``[lo, hi]`` to ``low <= base + coef*t <= high``."""
    if coef > 0:
        return (np.maximum(lo, _ceil_div(low - base, coef)),
                np.minimum(hi, (high - base) // coef))
    if coef < 0:
        return (np.maximum(lo, _ceil_div(base - high, -coef)),
                np.minimum(hi, (base - low) // -coef))
    inside = (base >= low) & (base <= high)
    return lo, np.where(inside, hi, lo - 1)


def _sig_columns(sigs):
    def col(name, default):
        return np.array([default if getattr(s, name) is None else getattr(s, name) for s in sigs],
                        dtype=np.int64)
    return {"gx": col_gamma(sigs, 0), "gy": col_gamma(sigs, 1),
            "phi0": col("phi0", -UNBOUNDED), "phi1": col("phi1", UNBOUNDED),
            "psi0": col("psi0", -UNBOUNDED), "psi1": col("psi1", UNBOUNDED),
            "x0": col("x0", -UNBOUNDED), "x1": col("x1", UNBOUNDED),
            "y0": col("y0", -UNBOUNDED), "y1": col("y1", UNBOUNDED)}


def col_gamma(sigs, axis):
    return np.array([s.gamma[axis] for s in sigs], dtype=np.int64)


def count_boxes_containing(lat, boxes, xs, ys):
    """For each point, how many boxes (truncated subtiles of one class) contain it."""
    xs = np.asarray(xs, dtype=np.int64)
    ys = np.asarray(ys, dtype=np.int64)
    if not boxes or len(xs) == 0:
        return np.zeros(len(xs), dtype=np.int64)
    if any(b.gamma is None for b in boxes):
        raise MissingSignature("boxes need a class representative")
    keys = {int(lat.class_key(b.gamma.x, b.gamma.y)) for b in boxes}
    if len(keys) != 1:
        raise MixedClasses("boxes must share one lattice class")
    if (lat.class_key(xs, ys) != keys.pop()).any():
        raise MixedClasses("points must lie in the boxes' class")
    if len(boxes) * len(xs) <= BRUTE_FORCE_LIMIT:
        instrument.bump("box_brute_checks", len(boxes) * len(xs))
        out = np.zeros(len(xs), dtype=np.int64)
        for b in boxes:
            out += b.contains(lat, xs, ys)
        return out
    field = LatticeField(lat, (int(xs.min()), int(xs.max()), int(ys.min()), int(ys.max())))
    _rasterize(field, _sig_columns(boxes), np.ones(len(boxes), dtype=np.int64))
    return field.at(xs, ys)


def angle_prefix_dp(field):
    """Cone sums ``S(w) = score(w) + S(w+phi) + S(w+psi) - S(w+phi+psi)`` over the window.

    In lattice coordinates this recurrence is a suffix sum along both axes.
    """
    out = LatticeField.__new__(LatticeField)
    out.__dict__.update(field.__dict__)
    vals = np.flip(np.cumsum(np.flip(field.values, axis=1), axis=1), axis=1)
    out.values = np.flip(np.cumsum(np.flip(vals, axis=2), axis=2), axis=2)
    instrument.bump("dp_cells", field.values.size)
    return out


def _as_table(items):
    if isinstance(items, SubtileTable):
        return items
    return SubtileTable.from_pieces(list(items))


def _check_disjoint(tab):
    keys = tab.xs * (1 << 32) + tab.ys
    if len(np.unique(keys)) != len(keys):
        raise OverlapError("text subtiles overlap")


def union_counts(tab, Q, n, m):
    """``|dom(P+q) ∩ U|`` for ``U`` the union of the subtile domains, via a 0/1 correlation."""
    mask = np.zeros((n, n), dtype=np.int64)
    mask[tab.xs, tab.ys] = 1
    counts = hamming_per_char_2d(Grid2D((0, 0), np.zeros((m, m), dtype=np.int64)), Grid2D((0, 0), mask))
    return counts.values[Q[:, 0], Q[:, 1]]


def overlap_sums(lat, pattern_pieces, subtiles, Q):
    """``sum over S, V with equal symbols of |dom(S) ∩ dom(V+q)|`` for each ``q`` in ``Q``."""
    Q = np.asarray(Q, dtype=np.int64).reshape(-1, 2)
    vt, st = _as_table(pattern_pieces), _as_table(subtiles)
    if len(vt) == 0 or len(st) == 0 or len(Q) == 0:
        return np.zeros(len(Q), dtype=np.int64)
    owner, sign, wx, wy = _corner_anchors(lat, st)
    anchor_sym = st.sym[owner]
    # pair every anchor with every pattern piece of the same symbol
    v_order = np.argsort(vt.sym, kind="stable")
    v_sorted = vt.sym[v_order]
    first = np.searchsorted(v_sorted, anchor_sym, side="left")
    count = np.searchsorted(v_sorted, anchor_sym, side="right") - first
    total = int(count.sum())
    instrument.bump("boxes", total)
    if total == 0:
        return np.zeros(len(Q), dtype=np.int64)
    a_idx = np.repeat(np.arange(len(owner)), count)
    start = np.cumsum(count) - count
    v_idx = v_order[first[a_idx] + (np.arange(total) - start[a_idx])]
    ax, ay = wx[a_idx], wy[a_idx]
    pw, qw = lat.phi_cross(ax, ay), lat.psi_cross(ax, ay)

    def shift(arr, delta):
        vals = arr[v_idx]
        bounded = np.abs(vals) != UNBOUNDED
        return np.where(bounded, vals - delta, vals)
    box = {"gx": vt.gx[v_idx] - ax, "gy": vt.gy[v_idx] - ay,
           "phi0": shift(vt.phi0, pw), "phi1": shift(vt.phi1, pw),
           "psi0": shift(vt.psi0, qw), "psi1": shift(vt.psi1, qw),
           "x0": shift(vt.x0, ax), "x1": shift(vt.x1, ax),
           "y0": shift(vt.y0, ay), "y1": shift(vt.y1, ay)}
    bounds = (int(min((vt.bx0[v_idx] - ax).min(), -Q[:, 0].max())),
              int(max((vt.bx1[v_idx] - ax).max(), -Q[:, 0].min())),
              int(min((vt.by0[v_idx] - ay).min(), -Q[:, 1].max())),
              int(max((vt.by1[v_idx] - ay).max(), -Q[:, 1].min())))
    field = LatticeField(lat, bounds)
    _rasterize(field, box, sign[a_idx])
    cone = angle_prefix_dp(field)
    return cone.at(-Q[:, 0], -Q[:, 1])


def sparse_distances(lat, pattern_pieces, subtiles, Q, n, m):
    """``sum over S of Ham(P+q, S)`` for each ``q`` in ``Q``, exactly."""
    Q = np.asarray(Q, dtype=np.int64).reshape(-1, 2)
    st = _as_table(subtiles)
    if len(st) == 0 or len(Q) == 0:
        return np.zeros(len(Q), dtype=np.int64)
    _check_disjoint(st)
    return union_counts(st, Q, n, m) - overlap_sums(lat, pattern_pieces, st, Q)
