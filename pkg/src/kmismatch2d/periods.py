"""Two short, well-separated period vectors from a dense set of candidate offsets."""
from bisect import bisect_left
from dataclasses import dataclass
from functools import cmp_to_key

from . import instrument
from .errors import PreconditionViolated, TooFew
from .geom import Point, cross, norm2, precedes, quadrant, rotate90, sqrt3_cmp
from .gridstring import WILDCARD

BRUTE_FORCE_BELOW = 64


def _pair_key(a, b):
    s, t = (a, b) if a <= b else (b, a)
    return (norm2(t - s), s, t)


def _closest_brute(pts):
    best = None
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            key = _pair_key(pts[i], pts[j])
            if best is None or key < best:
                best = key
    return best


def _closest_rec(pts):
    # pts sorted by (x, y); returns (best key, pts sorted by (y, x))
    if len(pts) < BRUTE_FORCE_BELOW:
        return _closest_brute(pts), sorted(pts, key=lambda p: (p.y, p.x))
    mid = len(pts) // 2
    mid_x = pts[mid].x
    left_best, left = _closest_rec(pts[:mid])
    right_best, right = _closest_rec(pts[mid:])
    best = min(left_best, right_best)
    merged = sorted(left + right, key=lambda p: (p.y, p.x))
    d2 = best[0]
    strip = [p for p in merged if (p.x - mid_x) ** 2 <= d2]
    for i, p in enumerate(strip):
        for q in strip[i + 1:]:
            if (q.y - p.y) ** 2 > best[0]:
                break
            key = _pair_key(p, q)
            if key < best:
                best = key
    return best, merged


def closest_pair(U):
    """Closest pair ``(s, t)`` with ``s < t``; ties go to the lexicographically smallest pair."""
    pts = sorted(set(Point(*map(int, u)) for u in U))
    if len(pts) < 2:
        raise TooFew("closest pair needs at least two points")
    best, _ = _closest_rec(pts)
    return best[1], best[2]


def _cmp_first_key(u, v):
    # order by sqrt(3)*y + x
    if u == v:
        return 0
    return sqrt3_cmp(u.y - v.y, v.x - u.x)


def _cmp_second_key(u, v):
    # order by sqrt(3)*x + y
    if u == v:
        return 0
    return sqrt3_cmp(u.x - v.x, v.y - u.y)


def longest_chain_q2(U):
    """A longest sequence whose consecutive differences all point into the 120-150 degree wedge.

    Along such a chain ``sqrt(3)*y + x`` strictly increases and
    ``sqrt(3)*x + y`` strictly decreases; both keys are injective on integer
    points, so the search is a sort followed by a longest decreasing run.
    """
    pts = sorted(set(Point(*map(int, u)) for u in U), key=cmp_to_key(_cmp_first_key))
    by_second = sorted(pts, key=cmp_to_key(_cmp_second_key))
    rank = {p: i for i, p in enumerate(by_second)}
    tails, tail_idx = [], []
    parent = [-1] * len(pts)
    for i, p in enumerate(pts):
        key = -rank[p]
        j = bisect_left(tails, key)
        if j == len(tails):
            tails.append(key)
            tail_idx.append(i)
        else:
            tails[j] = key
            tail_idx[j] = i
        parent[i] = tail_idx[j - 1] if j > 0 else -1
    chain = []
    i = tail_idx[-1] if tail_idx else -1
    while i >= 0:
        chain.append(pts[i])
        i = parent[i]
    return chain[::-1]


@dataclass
class PeriodPair:
    psi: Point
    phi: Point
    psi_witness: tuple      # (u, v) with psi = u - v
    phi_witness: tuple
    quadrant: int
    w: Point
    w_prime: Point
    chain_len: int

    def area_bound_holds(self, ell, size):
        return norm2(self.psi) * norm2(self.phi) * size * size <= 65536 * ell ** 4

    def angle_holds(self):
        return 4 * cross(self.psi, self.phi) ** 2 >= norm2(self.psi) * norm2(self.phi)


def get_periods(U, ell, strict=True):
    """Return ``psi`` in the first quadrant and ``phi`` in the fourth, at least 30 degrees apart.

    With ``strict`` the input must lie in ``[ell+1]^2`` and hold more than
    ``16*ell`` points, which guarantees the area bound.  Relaxed mode only
    needs enough structure to find both vectors.
    """
    pts = sorted(set(Point(*map(int, u)) for u in U))
    if any(p.x < 0 or p.y < 0 or p.x > ell or p.y > ell for p in pts):
        raise PreconditionViolated(f"points must lie in [0, {ell}]^2")
    if strict and len(pts) <= 16 * ell:
        raise PreconditionViolated(f"need more than {16 * ell} points, got {len(pts)}")
    if len(pts) < 2:
        raise PreconditionViolated("need at least two points")
    s, t = closest_pair(pts)
    w = t - s
    quad = quadrant(w)
    turn = (1 - quad) % 4          # rotation bringing w into the first quadrant
    rotated = [rotate90(p, turn) for p in pts]
    chain = longest_chain_q2(rotated)
    instrument.note("period_chain_len", len(chain))
    if len(chain) < 2:
        raise PreconditionViolated("no two points differ by a vector in the 120-150 degree wedge")
    a, b = closest_pair(chain)
    if not precedes(a, b, 2):
        a, b = b, a
    back = (quad - 1) % 4
    s2, t2 = rotate90(a, back), rotate90(b, back)
    w2 = t2 - s2
    if quad == 1:
        psi, phi, pw, fw = w, -w2, (t, s), (s2, t2)
    elif quad == 2:
        psi, phi, pw, fw = -w2, -w, (s2, t2), (s, t)
    elif quad == 3:
        psi, phi, pw, fw = -w, w2, (s, t), (t2, s2)
    else:
        psi, phi, pw, fw = w2, w, (t2, s2), (t, s)
    return PeriodPair(psi, phi, pw, fw, quad, w, w2, len(chain))


def self_hamming(P, delta):
    """``Ham(P + delta, P)`` over the overlap of a grid with its own shift."""
    cells = P.cells
    dx, dy = int(delta[0]), int(delta[1])
    w, h = cells.shape
    if abs(dx) >= w or abs(dy) >= h:
        return 0
    a = cells[max(0, -dx):w - max(0, dx), max(0, -dy):h - max(0, dy)]
    b = cells[max(0, dx):w - max(0, -dx), max(0, dy):h - max(0, -dy)]
    live = (a != WILDCARD) & (b != WILDCARD)
    return int(((a != b) & live).sum())


def candidate_period_check(P, delta, bound):
    return self_hamming(P, delta) <= bound
