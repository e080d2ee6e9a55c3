"""Test-side utilities that need the package's types (random bases, decomposition checks)."""
import numpy as np

import oracles
from kmismatch2d.errors import PreconditionViolated
from kmismatch2d.generators import periodic
from kmismatch2d.periods import get_periods
from kmismatch2d.pipeline import partition_size, window_side
from kmismatch2d.gridstring import Grid2D
from kmismatch2d.textpart import ActiveText, border_distance_sq, text_split
from kmismatch2d.tiling import Lattice, box_sig, is_monochromatic, tile_decompose


def random_lattice(rng, reach=4):
    """A counter-clockwise basis with ``phi`` in the fourth and ``psi`` in the first quadrant."""
    while True:
        phi = (int(rng.integers(0, reach)), -int(rng.integers(1, reach)))
        psi = (int(rng.integers(1, reach)), int(rng.integers(0, reach)))
        if phi[0] * psi[1] - phi[1] * psi[0] > 0:
            return Lattice(phi, psi)


def check_decomposition(R, pieces, lat, window):
    """Partition, monochromacy, signature agreement and lattice connectivity."""
    seen = {}
    for p in pieces:
        assert is_monochromatic(p)
        pts = set(zip(p.string.xs.tolist(), p.string.ys.tolist()))
        assert not (pts & seen.keys())
        seen.update(p.string.as_dict())
        xs, ys = p.sig.enumerate(lat, window)
        from_sig = set(zip(xs.tolist(), ys.tolist())) & set(R.as_dict())
        assert from_sig == pts
        assert oracles.bfs_connected(pts, [lat.phi, lat.psi])
    assert seen == R.as_dict()


def border_instance(rng, m_range=(12, 33), sigma_choices=(2, 3, 4)):
    """A periodic window with its candidate set, lattice and text split, or ``None``.

    Candidates are the offsets whose true distance is at most ``2k``, which is
    a superset of what the estimator keeps, so the split sees a realistic
    active text.
    """
    m = int(rng.integers(*m_range))
    n = window_side(10 * m, m)
    k = int(rng.integers(1, 9))
    sigma = int(rng.choice(sigma_choices))
    P, T = periodic(n, m, sigma, rng, k)
    exact = oracles.all_offsets(P.cells, T.cells)
    Q = np.array(sorted(q for q, d in exact.items() if d <= 2 * k), dtype=np.int64).reshape(-1, 2)
    if len(Q) < 2:
        return None
    try:
        pp = get_periods([tuple(q) for q in Q.tolist()], n - m, strict=False)
    except PreconditionViolated:
        return None
    lat = Lattice(pp.phi, pp.psi)
    at = ActiveText(T, Q, m)
    pattern_pieces = tile_decompose(P.to_sparse(), box_sig(lat, 0, m - 1, 0, m - 1), lat, k)
    split = text_split(at, lat, partition_size(m, k), k)
    return dict(P=P, T=T, Q=Q, k=k, n=n, m=m, lat=lat, at=at,
                pattern_pieces=pattern_pieces, split=split)


def border_oracle(P, F, Q):
    """``Ham(P + q, F)`` for each offset, by dictionary lookup."""
    cells = F.as_dict()
    m = P.width
    out = []
    for qx, qy in np.asarray(Q).tolist():
        moved = {(x + qx, y + qy): int(P.cells[x, y]) for x in range(m) for y in range(m)}
        out.append(oracles.dict_hamming(moved, cells))
    return out


def peripheral_instance(rng, m_range=(8, 33)):
    """Random candidates, a ``d``-peripheral border string and a random lattice.

    The candidate set is a union of a few offset rectangles; the border holds
    every active cell within distance ``d`` of an inactive point.
    """
    m = int(rng.integers(*m_range))
    n = window_side(10 * m, m)
    span = n - m + 1
    qmask = np.zeros((span, span), dtype=bool)
    for _ in range(int(rng.integers(1, 4))):
        x0, y0 = (int(v) for v in rng.integers(0, span, 2))
        x1, y1 = (int(v) for v in rng.integers(0, span, 2))
        qmask[min(x0, x1):max(x0, x1) + 1, min(y0, y1):max(y0, y1) + 1] = True
    Q = np.argwhere(qmask)
    sigma = int(rng.integers(1, 5))
    P = Grid2D((0, 0), rng.integers(0, sigma, (m, m)))
    T = Grid2D((0, 0), rng.integers(0, sigma, (n, n)))
    at = ActiveText(T, Q, m)
    d = int(rng.integers(1, max(2, m // 4 + 1)))
    S = at.string
    F = S.subset(border_distance_sq(at, S.xs, S.ys) <= d * d)
    lat = random_lattice(rng, 4)
    k = int(rng.integers(1, 2 * m))
    pattern_pieces = tile_decompose(P.to_sparse(), box_sig(lat, 0, m - 1, 0, m - 1), lat, k)
    return dict(P=P, T=T, Q=Q, k=k, n=n, m=m, d=d, F=F, at=at, lat=lat, pattern_pieces=pattern_pieces)


def random_period_basis(rng, reach=6):
    """A basis of the shape the period finder returns: at least 30 degrees between the vectors."""
    while True:
        lat = random_lattice(rng, reach)
        (px, py), (qx, qy) = lat.phi, lat.psi
        if 4 * lat.det ** 2 >= (px * px + py * py) * (qx * qx + qy * qy):
            return lat
