"""Longest-common-extension index and kangaroo verification of candidate offsets."""
import numpy as np

from . import instrument
from .errors import BadShape, OffsetOutOfRange, RangeError, WildcardPresent
from .gridstring import WILDCARD, Grid2D, OffsetCounts
from .geom import Point


def _dense_ranks(values):
    _, inv = np.unique(values, return_inverse=True)
    return inv.astype(np.int64)


class LceIndex:
    """Suffix array, LCP array and a sparse table for O(1) LCE queries.

    The suffix array comes from prefix doubling; the rank array of every
    doubling round is kept so adjacent-suffix LCPs can be read off by lifting.
    """

    def __init__(self, seq):
        seq = np.asarray(seq, dtype=np.int64)
        self.seq = seq
        self.n = n = len(seq)
        if n == 0:
            self.sa = self.rank = self.lcp = np.zeros(0, dtype=np.int64)
            self.table = []
            return
        rank = _dense_ranks(seq)
        levels = [rank]
        step = 1
        while step < n and rank.max() + 1 < n:
            nxt = np.full(n, -1, dtype=np.int64)
            nxt[:n - step] = rank[step:]
            order = np.lexsort((nxt, rank))
            r, s = rank[order], nxt[order]
            fresh = np.empty(n, dtype=np.int64)
            fresh[0] = 0
            fresh[1:] = np.cumsum((r[1:] != r[:-1]) | (s[1:] != s[:-1]))
            rank = np.empty(n, dtype=np.int64)
            rank[order] = fresh
            levels.append(rank)
            step *= 2
        self.sa = np.argsort(rank, kind="stable")
        self.rank = rank
        self.lcp = self._lcp_by_lifting(levels)
        self._build_table()

    def _lcp_by_lifting(self, levels):
        n = self.n
        lcp = np.zeros(n, dtype=np.int64)
        if n < 2:
            return lcp
        a, b = self.sa[:-1].copy(), self.sa[1:].copy()
        got = np.zeros(n - 1, dtype=np.int64)
        for lvl in range(len(levels) - 1, -1, -1):
            width = 1 << lvl
            ia, ib = a + got, b + got
            ok = (ia < n) & (ib < n)
            ok[ok] &= levels[lvl][ia[ok]] == levels[lvl][ib[ok]]
            # a rank match at this level means a full window, not a truncated one
            ok[ok] &= (ia[ok] + width <= n) & (ib[ok] + width <= n)
            got[ok] += width
        lcp[1:] = got
        return lcp

    def _build_table(self):
        self.table = [self.lcp.copy()]
        span = 1
        while 2 * span <= self.n:
            prev = self.table[-1]
            self.table.append(np.minimum(prev[:-span], prev[span:]))
            span *= 2

    def _range_min(self, lo, hi):
        # min of lcp[lo..hi] inclusive, lo <= hi
        length = hi - lo + 1
        lvl = np.floor(np.log2(length)).astype(np.int64)
        out = np.empty(len(lo), dtype=np.int64)
        for lv in np.unique(lvl):
            sel = lvl == lv
            tab = self.table[lv]
            out[sel] = np.minimum(tab[lo[sel]], tab[hi[sel] - (1 << lv) + 1])
        return out

    def lce_many(self, i, j):
        i = np.asarray(i, dtype=np.int64)
        j = np.asarray(j, dtype=np.int64)
        if len(i) and (min(i.min(), j.min()) < 0 or max(i.max(), j.max()) > self.n):
            raise RangeError("LCE query outside the indexed sequence")
        out = np.zeros(len(i), dtype=np.int64)
        inside = (i < self.n) & (j < self.n)
        same = inside & (i == j)
        out[same] = self.n - i[same]
        diff = inside & (i != j)
        if diff.any():
            ri, rj = self.rank[i[diff]], self.rank[j[diff]]
            lo, hi = np.minimum(ri, rj), np.maximum(ri, rj)
            out[diff] = self._range_min(lo + 1, hi)
        instrument.bump("lce_queries", len(i))
        return out

    def lce(self, i, j):
        return int(self.lce_many([i], [j])[0])


def build_lce(seq):
    seq = np.asarray(seq)
    if (seq == WILDCARD).any():
        raise WildcardPresent("LCE queries are undefined with wildcards")
    return LceIndex(seq)


def kangaroo_mismatches(idx, i, j, length, cap):
    """``min(cap, Ham(seq[i:i+length], seq[j:j+length]))`` by repeated LCE jumps."""
    if i < 0 or j < 0 or i + length > idx.n or j + length > idx.n:
        raise RangeError("kangaroo window leaves the sequence")
    return int(kangaroo_many(idx, np.array([i]), np.array([j]), length, np.array([cap]))[0])


def kangaroo_many(idx, starts_a, starts_b, length, caps):
    """Vectorised kangaroo: one capped mismatch count per ``(a, b)`` pair."""
    a = np.asarray(starts_a, dtype=np.int64)
    b = np.asarray(starts_b, dtype=np.int64)
    caps = np.broadcast_to(np.asarray(caps, dtype=np.int64), a.shape)
    count = np.zeros(len(a), dtype=np.int64)
    pos = np.zeros(len(a), dtype=np.int64)
    live = np.flatnonzero((caps > 0) & (length > 0))
    while len(live):
        step = idx.lce_many(a[live] + pos[live], b[live] + pos[live])
        instrument.bump("jumps", len(live))
        pos[live] += step
        hit = pos[live] < length
        live = live[hit]
        count[live] += 1
        pos[live] += 1
        live = live[(count[live] < caps[live]) & (pos[live] < length)]
    return count


class RowIds:
    """Column strings of pattern and text, named so equal names mean equal strings.

    Column ``i`` of the pattern is ``P(i, 0..m-1)``; text window ``(i, j)`` is
    ``T(i, j..j+m-1)``.  The top-level sequence lists window names with ``j``
    outer and ``i`` inner so the ``m`` windows needed by one offset are
    consecutive.
    """

    def __init__(self, P, T):
        self.m, self.n = m, n = P.width, T.width
        flat_t, flat_p = T.cells.ravel(), P.cells.ravel()
        codes = _dense_ranks(np.concatenate([flat_t, flat_p]))
        sep = codes.max(initial=-1) + 1
        self.low_seq = np.concatenate([codes[:n * n], [sep], codes[n * n:]])
        self.low = LceIndex(self.low_seq)
        self.p_base = n * n + 1
        # group suffixes sharing at least m symbols
        group_of_rank = np.cumsum(self.low.lcp < m)
        gid = np.empty(len(self.low_seq), dtype=np.int64)
        gid[self.low.sa] = group_of_rank
        span = n - m + 1
        ii, jj = np.meshgrid(np.arange(n), np.arange(span), indexing="xy")
        t_ids = gid[ii * n + jj].ravel()       # j outer, i inner
        p_ids = gid[self.p_base + np.arange(m) * m]
        top_sep = max(t_ids.max(initial=0), p_ids.max(initial=0)) + 1
        self.top_seq = np.concatenate([t_ids, [top_sep], p_ids])
        self.top = LceIndex(self.top_seq)
        self.top_p_base = len(t_ids) + 1

    def distances(self, qx, qy, caps):
        m, n = self.m, self.n
        qx = np.asarray(qx, dtype=np.int64)
        qy = np.asarray(qy, dtype=np.int64)
        caps = np.broadcast_to(np.asarray(caps, dtype=np.int64), qx.shape).copy()
        total = np.zeros(len(qx), dtype=np.int64)
        col = np.zeros(len(qx), dtype=np.int64)
        live = np.flatnonzero(caps > 0)
        while len(live):
            step = self.top.lce_many(qy[live] * n + qx[live] + col[live], self.top_p_base + col[live])
            instrument.bump("jumps", len(live))
            col[live] += step
            live = live[col[live] < m]
            if not len(live):
                break
            c = col[live]
            starts_t = (qx[live] + c) * n + qy[live]
            starts_p = self.p_base + c * m
            total[live] += kangaroo_many(self.low, starts_t, starts_p, m, caps[live] - total[live])
            col[live] += 1
            live = live[(total[live] < caps[live]) & (col[live] < m)]
        return total


def _check_inputs(P, T):
    if not (isinstance(P, Grid2D) and isinstance(T, Grid2D)):
        raise BadShape("verification expects grids")
    if not (P.is_origin_square() and T.is_origin_square()) or P.width > T.width:
        raise BadShape("pattern and text must be origin squares with m <= n")
    if P.has_wildcards() or T.has_wildcards():
        raise WildcardPresent("kangaroo verification needs wildcard-free inputs")


def verify_offsets(P, T, Q, cap=None):
    """Exact distances (or ``min(cap, Ham)``) for the offsets listed in ``Q``."""
    _check_inputs(P, T)
    m, n = P.width, T.width
    Q = np.asarray(Q, dtype=np.int64).reshape(-1, 2)
    if len(Q) and (Q.min() < 0 or Q.max() > n - m):
        raise OffsetOutOfRange("offset places the pattern outside the text")
    if len(Q) == 0:
        return np.zeros(0, dtype=np.int64)
    cap = m * m + 1 if cap is None else cap
    return RowIds(P, T).distances(Q[:, 0], Q[:, 1], cap)


def baseline_kn2(P, T, k):
    """Kangaroo verification of every offset with cap ``k+1``."""
    _check_inputs(P, T)
    span = T.width - P.width + 1
    qx, qy = np.meshgrid(np.arange(span), np.arange(span), indexing="ij")
    vals = RowIds(P, T).distances(qx.ravel(), qy.ravel(), k + 1)
    return OffsetCounts(Point(0, 0), vals.reshape(span, span))
