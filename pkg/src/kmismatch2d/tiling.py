"""Lattices spanned by two period vectors, subtile signatures and the cut-based decomposition."""
from collections import deque
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from . import instrument
from .errors import CollinearBasis
from .geom import Point, cross
from .gridstring import Sparse2D

_BIG = 1 << 40


class Lattice:
    """The lattice ``{s*phi + t*psi}`` with ``det = cross(phi, psi) > 0``.

    Each integer point ``u`` has lattice coordinates ``s = (u x psi) / det``
    and ``t = (phi x u) / det``; points agreeing in both fractional parts share
    a class, named by its representative inside the half-open fundamental cell.
    """

    def __init__(self, phi, psi):
        self.phi, self.psi = Point(*phi), Point(*psi)
        self.det = cross(self.phi, self.psi)
        if self.det == 0:
            raise CollinearBasis(f"{self.phi} and {self.psi} are collinear")
        if self.det < 0:
            raise CollinearBasis("basis must be counter-clockwise: cross(phi, psi) > 0")

    def __repr__(self):
        return f"Lattice(phi={tuple(self.phi)}, psi={tuple(self.psi)})"

    def s_num(self, xs, ys):
        """``u x psi``, which equals ``s * det``."""
        return xs * self.psi.y - ys * self.psi.x

    def t_num(self, xs, ys):
        """``phi x u``, which equals ``t * det``."""
        return self.phi.x * ys - self.phi.y * xs

    def phi_cross(self, xs, ys):
        return self.t_num(xs, ys)

    def psi_cross(self, xs, ys):
        return -self.s_num(xs, ys)

    def class_key(self, xs, ys):
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        return (self.s_num(xs, ys) % self.det) * self.det + (self.t_num(xs, ys) % self.det)

    def reduce(self, u):
        """Representative of ``u``'s class in the fundamental cell."""
        s, t = self.s_num(u[0], u[1]), self.t_num(u[0], u[1])
        fs, ft = s // self.det, t // self.det
        return Point(u[0] - fs * self.phi.x - ft * self.psi.x, u[1] - fs * self.phi.y - ft * self.psi.y)

    def reduce_many(self, xs, ys):
        fs = self.s_num(xs, ys) // self.det
        ft = self.t_num(xs, ys) // self.det
        return xs - fs * self.phi.x - ft * self.psi.x, ys - fs * self.phi.y - ft * self.psi.y

    def coords(self, xs, ys):
        """Integer lattice coordinates of ``u`` relative to its class representative."""
        return self.s_num(xs, ys) // self.det, self.t_num(xs, ys) // self.det

    def same_class(self, u, v):
        return self.reduce(u) == self.reduce(v)


def gamma_set(lat):
    """Integer points ``s*phi + t*psi`` with ``s, t`` in ``[0, 1)``; there are exactly ``det``."""
    phi, psi = lat.phi, lat.psi
    xs_lo, xs_hi = min(0, phi.x, psi.x, phi.x + psi.x), max(0, phi.x, psi.x, phi.x + psi.x)
    ys_lo, ys_hi = min(0, phi.y, psi.y, phi.y + psi.y), max(0, phi.y, psi.y, phi.y + psi.y)
    xs, ys = np.meshgrid(np.arange(xs_lo, xs_hi + 1), np.arange(ys_lo, ys_hi + 1), indexing="ij")
    xs, ys = xs.ravel(), ys.ravel()
    s, t = lat.s_num(xs, ys), lat.t_num(xs, ys)
    keep = (s >= 0) & (s < lat.det) & (t >= 0) & (t < lat.det)
    return [Point(int(x), int(y)) for x, y in zip(xs[keep], ys[keep])]


def decompose_basis(lat, u):
    """``(s, t, gamma)`` with ``u = s*phi + t*psi`` and ``gamma`` the class representative."""
    s = Fraction(lat.s_num(u[0], u[1]), lat.det)
    t = Fraction(lat.t_num(u[0], u[1]), lat.det)
    return s, t, lat.reduce(u)


@dataclass(frozen=True)
class TruncSig:
    """Point set ``{u : x0<=x<=x1, y0<=y<=y1, phi0<=phi x u<=phi1, psi0<=psi x u<=psi1}``.

    ``None`` stands for an unbounded side.  ``gamma`` restricts to one lattice
    class; ``None`` means all classes.
    """
    x0: int | None = None
    x1: int | None = None
    y0: int | None = None
    y1: int | None = None
    phi0: int | None = None
    phi1: int | None = None
    psi0: int | None = None
    psi1: int | None = None
    gamma: Point | None = None

    @property
    def truncated(self):
        return any(v is not None for v in (self.x0, self.x1, self.y0, self.y1))

    def contains(self, lat, xs, ys):
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        ok = np.ones(xs.shape, dtype=bool)
        pc, qc = lat.phi_cross(xs, ys), lat.psi_cross(xs, ys)
        for val, lo, hi in ((xs, self.x0, self.x1), (ys, self.y0, self.y1),
                            (pc, self.phi0, self.phi1), (qc, self.psi0, self.psi1)):
            if lo is not None:
                ok &= val >= lo
            if hi is not None:
                ok &= val <= hi
        if self.gamma is not None:
            ok &= lat.class_key(xs, ys) == lat.class_key(self.gamma.x, self.gamma.y)
        return ok

    def shifted(self, lat, w):
        """Signature of the point set translated by ``w``."""
        def add(v, d):
            return None if v is None else v + d
        pw, qw = lat.phi_cross(w[0], w[1]), lat.psi_cross(w[0], w[1])
        gamma = None if self.gamma is None else lat.reduce(self.gamma + w)
        return TruncSig(add(self.x0, w[0]), add(self.x1, w[0]), add(self.y0, w[1]), add(self.y1, w[1]),
                        add(self.phi0, pw), add(self.phi1, pw), add(self.psi0, qw), add(self.psi1, qw), gamma)

    def is_valid_truncated_tile(self, lat):
        if None in (self.x0, self.x1, self.y0, self.y1):
            return True
        return (self.x1 - self.x0 + 1 >= abs(lat.phi.x) + abs(lat.psi.x)
                and self.y1 - self.y0 + 1 >= abs(lat.phi.y) + abs(lat.psi.y))

    def enumerate(self, lat, window=None):
        """All points of the set inside ``window = (x0, x1, y0, y1)`` (default: its own box)."""
        x0, x1, y0, y1 = window if window is not None else (self.x0, self.x1, self.y0, self.y1)
        xs, ys = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1), indexing="ij")
        xs, ys = xs.ravel(), ys.ravel()
        keep = self.contains(lat, xs, ys)
        return xs[keep], ys[keep]


def box_sig(lat, x0, x1, y0, y1):
    """Signature of a full rectangle, with the lattice ranges read off its corners."""
    cx = np.array([x0, x0, x1, x1])
    cy = np.array([y0, y1, y0, y1])
    pc, qc = lat.phi_cross(cx, cy), lat.psi_cross(cx, cy)
    return TruncSig(x0, x1, y0, y1, int(pc.min()), int(pc.max()), int(qc.min()), int(qc.max()))


@dataclass
class Piece:
    """A string together with the signature describing its domain."""
    sig: TruncSig
    string: Sparse2D

    @property
    def symbol(self):
        return int(self.string.syms[0])

    def __len__(self):
        return len(self.string)


def is_monochromatic(S):
    syms = S.string.syms if isinstance(S, Piece) else S.syms
    return len(syms) == 0 or bool((syms == syms[0]).all())


class _Neighbours:
    """Index lookup for ``u + v`` inside a sparse domain."""

    def __init__(self, xs, ys):
        self.x0, self.y0 = int(xs.min()), int(ys.min())
        w, h = int(xs.max()) - self.x0 + 1, int(ys.max()) - self.y0 + 1
        self.grid = np.full((w, h), -1, dtype=np.int64)
        self.grid[xs - self.x0, ys - self.y0] = np.arange(len(xs))
        self.xs, self.ys = xs, ys

    def shift_index(self, v):
        nx, ny = self.xs + v[0] - self.x0, self.ys + v[1] - self.y0
        w, h = self.grid.shape
        ok = (nx >= 0) & (nx < w) & (ny >= 0) & (ny < h)
        out = np.full(len(self.xs), -1, dtype=np.int64)
        out[ok] = self.grid[nx[ok], ny[ok]]
        return out


def _mismatch_keys(nb, syms, v):
    j = nb.shift_index(v)
    has = j >= 0
    mis = np.zeros(len(syms), dtype=bool)
    mis[has] = syms[has] != syms[j[has]]
    return mis


def _cut_index(group, values, breaks_group, breaks_values, side):
    """Number of breakpoints of the same group lying left of each value."""
    bk = np.unique(breaks_group * _BIG + breaks_values)
    if len(bk) == 0:
        return np.zeros(len(group), dtype=np.int64), bk
    pk = group * _BIG + values
    below = np.searchsorted(bk, group * _BIG - _BIG // 2, side="left")
    return np.searchsorted(bk, pk, side=side) - below, bk


def _break_bounds(bk, group, idx):
    """Breakpoints on either side of piece ``idx`` of ``group`` (None for infinite)."""
    lo_pos = np.searchsorted(bk, group * _BIG - _BIG // 2, side="left")
    hi_pos = np.searchsorted(bk, group * _BIG + _BIG // 2, side="left")
    left = None if idx == 0 else int(bk[lo_pos + idx - 1] - group * _BIG)
    right = None if lo_pos + idx >= hi_pos else int(bk[lo_pos + idx] - group * _BIG)
    return left, right


def _clip(lo, hi, new_lo, new_hi):
    if new_lo is not None:
        lo = new_lo if lo is None else max(lo, new_lo)
    if new_hi is not None:
        hi = new_hi if hi is None else min(hi, new_hi)
    return lo, hi


def tile_decompose(R, sig, lat, k=None):
    """Split a (truncated) tile string into monochromatic truncated subtiles.

    Pieces come from splitting by lattice class, then cutting at every
    ``phi``-mismatch along the ``psi x u`` axis, then at every ``psi``-mismatch
    along the ``phi x u`` axis.  The number of pieces is at most
    ``4 * (Ham(R+phi, R) + Ham(R+psi, R) + det)``.
    """
    if len(R) == 0:
        return []
    xs, ys, syms = R.xs, R.ys, R.syms
    cls = lat.class_key(xs, ys)
    _, group = np.unique(cls, return_inverse=True)
    pc, qc = lat.phi_cross(xs, ys), lat.psi_cross(xs, ys)
    nb = _Neighbours(xs, ys)

    # stage 1: pieces [a_i, a_{i+1}) of psi x u between phi-mismatches
    mis_phi = _mismatch_keys(nb, syms, lat.phi)
    instrument.bump("tile_phi_mismatches", int(mis_phi.sum()))
    idx1, bk1 = _cut_index(group, qc, group[mis_phi], qc[mis_phi], "right")
    _, stage1 = np.unique(group * _BIG + idx1, return_inverse=True)

    # stage 2: pieces (b_j, b_{j+1}] of phi x u between psi-mismatches
    mis_psi = _mismatch_keys(nb, syms, lat.psi)
    instrument.bump("tile_psi_mismatches", int(mis_psi.sum()))
    idx2, bk2 = _cut_index(stage1, pc, stage1[mis_psi], pc[mis_psi], "left")

    final_key = stage1 * _BIG + idx2
    order = np.argsort(final_key, kind="stable")
    sorted_keys = final_key[order]
    starts = np.flatnonzero(np.r_[True, sorted_keys[1:] != sorted_keys[:-1]])
    ends = np.r_[starts[1:], len(order)]
    pieces = []
    for a, b in zip(starts, ends):
        members = order[a:b]
        first = members[0]
        g, i1, s1, i2 = int(group[first]), int(idx1[first]), int(stage1[first]), int(idx2[first])
        lo1, hi1 = _break_bounds(bk1, g, i1)
        lo2, hi2 = _break_bounds(bk2, s1, i2)
        psi0, psi1 = _clip(sig.psi0, sig.psi1, lo1, None if hi1 is None else hi1 - 1)
        phi0, phi1 = _clip(sig.phi0, sig.phi1, None if lo2 is None else lo2 + 1, hi2)
        gamma = lat.reduce((int(xs[first]), int(ys[first])))
        piece_sig = replace(sig, phi0=phi0, phi1=phi1, psi0=psi0, psi1=psi1, gamma=gamma)
        members = np.sort(members)
        piece = Piece(piece_sig, R.subset(members))
        if is_monochromatic(piece):
            pieces.append(piece)
        else:
            # only reachable when the lattice graph of the piece is disconnected
            instrument.bump("tile_singleton_fallback")
            pieces.extend(singleton_pieces(piece.string, lat, sig))
    instrument.bump("tile_pieces", len(pieces))
    return pieces


def singleton_pieces(S, lat, base=None):
    """One single-point subtile per point of ``S``."""
    base = base or TruncSig()
    pc, qc = lat.phi_cross(S.xs, S.ys), lat.psi_cross(S.xs, S.ys)
    out = []
    for i in range(len(S)):
        u = Point(int(S.xs[i]), int(S.ys[i]))
        sig = replace(base, phi0=int(pc[i]), phi1=int(pc[i]), psi0=int(qc[i]), psi1=int(qc[i]),
                      gamma=lat.reduce(u))
        out.append(Piece(sig, S.subset(np.array([i]))))
    return out


def cut_phi(S, lat):
    """Cut a single-class piece at the ``psi x u`` values of its ``phi``-mismatches."""
    return _single_cut(S, lat, stage=1)


def cut_psi(S, lat):
    """Cut a single-class piece at the ``phi x u`` values of its ``psi``-mismatches."""
    return _single_cut(S, lat, stage=2)


def _single_cut(S, lat, stage):
    string, sig = S.string, S.sig
    if len(string) == 0:
        return []
    xs, ys, syms = string.xs, string.ys, string.syms
    nb = _Neighbours(xs, ys)
    if stage == 1:
        mis = _mismatch_keys(nb, syms, lat.phi)
        vals = lat.psi_cross(xs, ys)
        breaks = np.unique(vals[mis])
        idx = np.searchsorted(breaks, vals, side="right")
    else:
        mis = _mismatch_keys(nb, syms, lat.psi)
        vals = lat.phi_cross(xs, ys)
        breaks = np.unique(vals[mis])
        idx = np.searchsorted(breaks, vals, side="left")
    out = []
    for i in np.unique(idx):
        left = None if i == 0 else int(breaks[i - 1])
        right = None if i == len(breaks) else int(breaks[i])
        if stage == 1:
            lo, hi = _clip(sig.psi0, sig.psi1, left, None if right is None else right - 1)
            new = replace(sig, psi0=lo, psi1=hi)
        else:
            lo, hi = _clip(sig.phi0, sig.phi1, None if left is None else left + 1, right)
            new = replace(sig, phi0=lo, phi1=hi)
        out.append(Piece(new, string.subset(idx == i)))
    return out


def split_classes(R, sig, lat):
    out = []
    cls = lat.class_key(R.xs, R.ys)
    for c in np.unique(cls):
        sub = R.subset(cls == c)
        gamma = lat.reduce((int(sub.xs[0]), int(sub.ys[0])))
        out.append(Piece(replace(sig, gamma=gamma), sub))
    return out


def lattice_connected(piece, lat):
    """BFS over edges ``+-phi`` and ``+-psi`` inside the piece's domain."""
    pts = set(zip(piece.string.xs.tolist(), piece.string.ys.tolist()))
    if not pts:
        return True
    start = next(iter(pts))
    seen = {start}
    todo = deque([start])
    steps = [lat.phi, lat.psi, -lat.phi, -lat.psi]
    while todo:
        x, y = todo.popleft()
        for d in steps:
            v = (x + d.x, y + d.y)
            if v in pts and v not in seen:
                seen.add(v)
                todo.append(v)
    return len(seen) == len(pts)
