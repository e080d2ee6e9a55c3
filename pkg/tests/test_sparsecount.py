import numpy as np
import pytest

import oracles
from helpers import border_instance, random_lattice
from kmismatch2d import instrument
from kmismatch2d.errors import MissingSignature, MixedClasses, OverlapError, TruncatedInput
from kmismatch2d.geom import Point
from kmismatch2d.gridstring import Grid2D, Sparse2D
from kmismatch2d.sparsecount import (BRUTE_FORCE_LIMIT, LatticeField, SubtileTable, angle_prefix_dp,
                                     _corner_anchors, corner_decompose, count_boxes_containing,
                                     sparse_distances)
from kmismatch2d.textpart import ActiveText, text_decompose
from kmismatch2d.tiling import Lattice, Piece, TruncSig, box_sig, tile_decompose


def alternating_count(lat, anchors, X):
    return sum(sign * sum(oracles.in_cone(lat.phi, lat.psi, w, u) for u in X) for sign, w in anchors)


def test_corner_examples():
    lat = Lattice((1, -1), (1, 1))
    g = Point(1, 0)
    pc, qc = lat.phi_cross(*g), lat.psi_cross(*g)
    single = TruncSig(phi0=pc, phi1=pc, psi0=qc, psi1=qc, gamma=g)
    anchors = corner_decompose(lat, single)
    assert [s for s, _ in anchors] == [1, -1, -1, 1]
    assert alternating_count(lat, anchors, [g]) == 1
    assert all(lat.same_class(w, g) for _, w in anchors)
    empty = TruncSig(phi0=5, phi1=4, psi0=0, psi1=3, gamma=g)
    anchors = corner_decompose(lat, empty)
    assert all(w == g for _, w in anchors)
    assert alternating_count(lat, anchors, [(x, y) for x in range(-3, 4) for y in range(-3, 4)]) == 0


def test_corner_errors():
    lat = Lattice((0, -1), (1, 0))
    with pytest.raises(TruncatedInput):
        corner_decompose(lat, TruncSig(x0=0, phi0=0, phi1=1, psi0=0, psi1=1, gamma=Point(0, 0)))
    with pytest.raises(MissingSignature):
        corner_decompose(lat, TruncSig(phi0=0, phi1=1, psi0=0, psi1=1))


def test_corner_identity_random(rng):
    for _ in range(150):
        lat = random_lattice(rng, 4)
        g = lat.reduce(tuple(rng.integers(-5, 5, 2).tolist()))
        p0, q0 = (int(v) for v in rng.integers(-20, 20, 2))
        sig = TruncSig(phi0=p0, phi1=p0 + int(rng.integers(-3, 25)), psi0=q0,
                       psi1=q0 + int(rng.integers(-3, 25)), gamma=g)
        X = {tuple(u) for u in rng.integers(-12, 12, (60, 2)).tolist()}
        direct = sum(bool(sig.contains(lat, [u[0]], [u[1]])[0]) for u in X)
        assert alternating_count(lat, corner_decompose(lat, sig), X) == direct


def _class_points(lat, gamma, count, rng, spread=15):
    pts = []
    while len(pts) < count:
        u = tuple(rng.integers(-spread, spread, 2).tolist())
        if lat.same_class(u, gamma):
            pts.append(u)
    return np.array(pts).reshape(-1, 2)


def _random_box(lat, gamma, rng, truncated=True):
    def lo_hi(spread):
        a = int(rng.integers(-spread, spread))
        return a, a + int(rng.integers(0, spread))
    x0, x1 = lo_hi(15) if truncated else (None, None)
    y0, y1 = lo_hi(15) if truncated else (None, None)
    p0, p1 = lo_hi(60)
    q0, q1 = lo_hi(60)
    return TruncSig(x0, x1, y0, y1, p0, p1, q0, q1, gamma)


def test_count_boxes_examples(rng):
    lat = Lattice((0, -1), (1, 0))
    g = Point(0, 0)
    everything = TruncSig(gamma=g)
    assert count_boxes_containing(lat, [everything], [3, -7], [2, 9]).tolist() == [1, 1]
    left, right = TruncSig(x0=0, x1=2, gamma=g), TruncSig(x0=3, x1=5, gamma=g)
    assert count_boxes_containing(lat, [left, right], [1, 4, 9], [0, 0, 0]).tolist() == [1, 1, 0]


def test_count_boxes_mixed_classes():
    lat = Lattice((1, -1), (1, 1))
    with pytest.raises(MixedClasses):
        count_boxes_containing(lat, [TruncSig(gamma=Point(0, 0)), TruncSig(gamma=Point(1, 0))], [0], [0])
    with pytest.raises(MixedClasses):
        count_boxes_containing(lat, [TruncSig(gamma=Point(0, 0))], [1], [0])


@pytest.mark.parametrize("boxes, points", [(20, 50), (300, 400)])
def test_count_boxes_against_brute_force(rng, boxes, points):
    for _ in range(5):
        lat = random_lattice(rng, 3)
        g = lat.reduce((0, 0))
        bs = [_random_box(lat, g, rng) for _ in range(boxes)]
        pts = _class_points(lat, g, points, rng)
        with instrument.recording() as rec:
            got = count_boxes_containing(lat, bs, pts[:, 0], pts[:, 1])
        expected = sum(np.asarray(b.contains(lat, pts[:, 0], pts[:, 1]), dtype=np.int64) for b in bs)
        assert got.tolist() == expected.tolist()
        assert ("box_rows" in rec.counters) == (boxes * points > BRUTE_FORCE_LIMIT)


def _all_points(field):
    c, s, t = np.meshgrid(*(np.arange(v) for v in field.values.shape), indexing="ij")
    c, s, t = c.ravel(), s.ravel() + field.s_lo, t.ravel() + field.t_lo
    lat = field.lat
    xs = field.table.reps_x[c] + s * lat.phi.x + t * lat.psi.x
    ys = field.table.reps_y[c] + s * lat.phi.y + t * lat.psi.y
    return xs, ys


def test_angle_dp_zero_and_single_point(rng):
    lat = Lattice((1, -2), (2, 1))
    field = LatticeField(lat, (-5, 5, -5, 5))
    assert not angle_prefix_dp(field).values.any()
    xs, ys = _all_points(field)
    p = (int(xs[len(xs) // 2]), int(ys[len(ys) // 2]))
    c, s, t = field.locate([p[0]], [p[1]])
    field.values[c, s, t] = 1
    cone = angle_prefix_dp(field)
    for x, y in zip(xs.tolist(), ys.tolist()):
        assert cone.at([x], [y])[0] == oracles.in_cone(lat.phi, lat.psi, (x, y), p)


def test_angle_dp_against_enumeration(rng):
    for _ in range(10):
        lat = random_lattice(rng, 3)
        field = LatticeField(lat, (-4, 4, -4, 4))
        field.values[...] = rng.integers(-3, 4, field.values.shape)
        xs, ys = _all_points(field)
        vals = field.at(xs, ys)
        cone = angle_prefix_dp(field)
        for x, y in list(zip(xs.tolist(), ys.tolist()))[::7]:
            direct = sum(int(v) for u, v in zip(zip(xs.tolist(), ys.tolist()), vals)
                         if oracles.in_cone(lat.phi, lat.psi, (x, y), u))
            assert cone.at([x], [y])[0] == direct


def _oracle_sparse(P, subtiles, Q):
    text = {}
    for S in subtiles:
        text.update(S.string.as_dict())
    m = P.shape[0]
    out = []
    for qx, qy in Q:
        moved = {(x + qx, y + qy): int(P[x, y]) for x in range(m) for y in range(m)}
        out.append(oracles.dict_hamming(moved, text))
    return out


def test_sparse_distances_trivial_cases(rng):
    lat = Lattice((0, -1), (1, 0))
    P = Grid2D((0, 0), np.zeros((3, 3)))
    V = tile_decompose(P.to_sparse(), box_sig(lat, 0, 2, 0, 2), lat)
    Q = np.array([(0, 0), (1, 1)])
    assert sparse_distances(lat, V, [], Q, 5, 3).tolist() == [0, 0]
    T = Grid2D((0, 0), np.zeros((5, 5)))
    S = SubtileTable.from_points(lat, T.to_sparse())
    assert sparse_distances(lat, V, S, Q, 5, 3).tolist() == [0, 0]
    S = SubtileTable.from_points(lat, Grid2D((0, 0), np.ones((5, 5))).to_sparse())
    assert sparse_distances(lat, V, S, Q, 5, 3).tolist() == [9, 9]


def test_sparse_distances_overlap_error():
    lat = Lattice((0, -1), (1, 0))
    P = Grid2D((0, 0), np.zeros((2, 2)))
    V = tile_decompose(P.to_sparse(), box_sig(lat, 0, 1, 0, 1), lat)
    dup = Sparse2D([0], [0], [1])
    table = SubtileTable.from_points(lat, dup)
    with pytest.raises(OverlapError):
        sparse_distances(lat, V, SubtileTable.concat([table, table]), [(0, 0)], 3, 2)


def test_sparse_distances_against_oracle_on_text_split(rng):
    done = 0
    while done < 40:
        m = int(rng.integers(4, 9))
        n = m + int(rng.integers(0, m // 2 + 1))
        lat = random_lattice(rng, m // 2 + 1)
        sigma = int(rng.integers(1, 4))
        P, T = rng.integers(0, sigma, (m, m)), rng.integers(0, sigma, (n, n))
        V = tile_decompose(Grid2D((0, 0), P).to_sparse(), box_sig(lat, 0, m - 1, 0, m - 1), lat)
        Q = [(x, y) for x in range(n - m + 1) for y in range(n - m + 1)]
        at = ActiveText(Grid2D((0, 0), T), Q, m)
        pieces, _ = text_decompose(at, lat, int(rng.integers(1, 5)))
        got = sparse_distances(lat, V, pieces, np.array(Q), n, m)
        assert got.tolist() == _oracle_sparse(P, pieces, Q)
        done += 1


def test_sparse_distances_singletons(rng):
    for _ in range(60):
        m = int(rng.integers(3, 9))
        n = m + int(rng.integers(0, 5))
        lat = random_lattice(rng, 4)
        P, T = rng.integers(0, 3, (m, m)), rng.integers(0, 3, (n, n))
        V = tile_decompose(Grid2D((0, 0), P).to_sparse(), box_sig(lat, 0, m - 1, 0, m - 1), lat)
        keep = rng.random((n, n)) < 0.5
        xs, ys = np.nonzero(keep)
        pts = Sparse2D(xs, ys, T[xs, ys])
        Q = [(x, y) for x in range(n - m + 1) for y in range(n - m + 1)]
        got = sparse_distances(lat, V, SubtileTable.from_points(lat, pts), np.array(Q), n, m)
        single = [Piece(TruncSig(), pts.subset(np.arange(len(pts)) == i)) for i in range(len(pts))]
        assert got.tolist() == _oracle_sparse(P, single, Q)


def test_corner_anchors_stay_near_the_window(rng):
    """Anchors of text subtiles lie within 4m of the origin."""
    checked = 0
    for _ in range(25):
        inst = border_instance(rng, m_range=(24, 41))
        if inst is None or not inst["split"].pieces:
            continue
        table = SubtileTable.from_pieces(inst["split"].pieces)
        _, _, wx, wy = _corner_anchors(inst["lat"], table)
        assert (wx * wx + wy * wy).max() <= 16 * inst["m"] ** 2
        checked += 1
    assert checked >= 4
