import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from kmismatch2d.errors import BadShape, EmptyString, GridFormatError
from kmismatch2d.geom import Point
from kmismatch2d.gridstring import (WILDCARD, Grid2D, OffsetCounts, Sparse2D, SymbolTable, concat_sparse,
                                    format_grid, hamming_oracle, linearize, oracle_all_offsets, pad_embed,
                                    parse_grid, read_grid, shift)

A, B, C, D = 0, 1, 2, 3


def grid(rows, origin=(0, 0)):
    return Grid2D.from_rows(rows, origin)


def test_from_rows_puts_rows_on_y():
    g = grid([[A, B], [C, D]])
    assert g.get((1, 0)) == B and g.get((0, 1)) == C
    assert g.get((2, 0)) is None


def test_shift_examples(rng):
    one = grid([[A]])
    assert shift(one, (2, 3)).to_sparse().as_dict() == {Point(2, 3): A}
    S = Grid2D((0, 0), rng.integers(0, 3, (4, 5))).to_sparse()
    assert shift(S, (0, 0)).as_dict() == S.as_dict()
    u = (int(rng.integers(-9, 9)), int(rng.integers(-9, 9)))
    assert shift(shift(S, u), (-u[0], -u[1])).as_dict() == S.as_dict()


def test_hamming_oracle_examples():
    g = grid([[A, B], [B, A]])
    assert hamming_oracle(g, g) == (0, set())
    a, b = grid([[A]]), grid([[B]])
    assert hamming_oracle(a, b) == (1, {Point(0, 0)})
    text = grid([[A, B], [C, C]])
    assert hamming_oracle(shift(a, (0, 0)), text)[0] == 0
    assert hamming_oracle(shift(a, (1, 0)), text)[0] == 1


def test_hamming_oracle_wildcards_match_everything():
    w = grid([[int(WILDCARD), B]])
    assert hamming_oracle(w, grid([[A, B]]))[0] == 0


def test_shift_symmetry(rng):
    for _ in range(30):
        S = Grid2D((0, 0), rng.integers(0, 3, (6, 6))).to_sparse()
        delta = (int(rng.integers(-4, 5)), int(rng.integers(-4, 5)))
        neg = (-delta[0], -delta[1])
        assert hamming_oracle(shift(S, delta), S)[0] == hamming_oracle(S, shift(S, neg))[0]


def test_oracle_examples():
    P = grid([[A, B], [C, D]])
    assert oracle_all_offsets(P, P, 0).as_dict() == {Point(0, 0): 0}
    flat_a = Grid2D((0, 0), np.zeros((2, 2)))
    flat_b = Grid2D((0, 0), np.ones((3, 3)))
    assert set(oracle_all_offsets(flat_a, flat_b, 1).as_dict().values()) == {2}


def test_oracle_against_independent_loop(rng):
    for _ in range(20):
        P, T = rng.integers(0, 3, (4, 4)), rng.integers(0, 3, (8, 8))
        got = oracle_all_offsets(Grid2D((0, 0), P), Grid2D((0, 0), T), 3).as_dict()
        assert got == oracles.all_offsets(P, T, cap=4)


def test_oracle_rejects_bad_shapes():
    with pytest.raises(BadShape):
        oracle_all_offsets(Grid2D((0, 0), np.zeros((2, 3))), Grid2D((0, 0), np.zeros((4, 4))), 0)
    with pytest.raises(BadShape):
        oracle_all_offsets(Grid2D((1, 0), np.zeros((2, 2))), Grid2D((0, 0), np.zeros((4, 4))), 0)
    with pytest.raises(BadShape):
        oracle_all_offsets(Grid2D((0, 0), np.zeros((5, 5))), Grid2D((0, 0), np.zeros((4, 4))), 0)


def test_offset_counts_row_major_order():
    oc = OffsetCounts(Point(0, 0), np.arange(6).reshape(3, 2))
    assert [tuple(q) for q, _ in oc.items()] == [(0, 0), (1, 0), (2, 0), (0, 1), (1, 1), (2, 1)]
    assert oc[(2, 1)] == 5


def test_linearize_examples():
    g = grid([[A, C], [B, D]])            # columns (a, b) and (c, d)
    assert linearize(g).symbols.tolist() == [A, B, C, D]
    holey = Sparse2D.from_dict({(0, 0): A, (1, 1): D})
    assert linearize(holey).symbols.tolist() == [A, int(WILDCARD), int(WILDCARD), D]
    with pytest.raises(EmptyString):
        linearize(Sparse2D.empty())


@settings(max_examples=40)
@given(st.integers(1, 6), st.integers(1, 6))
def test_linearize_length(w, h):
    lin = linearize(Grid2D((0, 0), np.zeros((w, h))))
    assert len(lin.symbols) == w * h and lin.height == h


def _mapped_distances(P, T):
    lp, lt, omap = pad_embed(P, T)
    one_d = oracles.hamming_1d(lp.tolist(), lt.tolist())
    out = {}
    for qx in range(omap.span_x):
        for qy in range(omap.span_y):
            q = (omap.base.x + qx, omap.base.y + qy)
            out[q] = one_d[omap.to_1d(q)]
    return out


def test_pad_embed_examples():
    G = grid([[A, B], [B, A]])
    assert _mapped_distances(G, G) == {(0, 0): 0}
    assert _mapped_distances(grid([[A]]), grid([[A, B]])) == {(0, 0): 0, (1, 0): 1}


def test_pad_embed_against_oracle(rng):
    for _ in range(200):
        pw, ph = (int(v) for v in rng.integers(1, 5, 2))
        tw, th = pw + int(rng.integers(0, 4)), ph + int(rng.integers(0, 4))
        P = Grid2D((0, 0), rng.integers(0, 3, (pw, ph)))
        T = Grid2D((0, 0), rng.integers(0, 3, (tw, th)))
        got = _mapped_distances(P, T)
        for (qx, qy), d in got.items():
            assert d == oracles.mismatches_at(P.cells, T.cells, qx, qy)
        assert len(got) == (tw - pw + 1) * (th - ph + 1)


def test_sparse_partition_law(rng):
    S = Grid2D((0, 0), rng.integers(0, 4, (7, 7))).to_sparse()
    labels = rng.integers(0, 3, len(S))
    parts = [S.subset(labels == i) for i in range(3)]
    assert concat_sparse(parts).as_dict() == S.as_dict()


def test_sparse_rejects_duplicates():
    with pytest.raises(BadShape):
        Sparse2D([0, 0], [1, 1], [A, B])


def test_grid_file_round_trip(rng, tmp_path):
    table = SymbolTable()
    text = "3 2\nx ?\ny x\nfoo bar\n"
    g = parse_grid(text, table)
    assert g.width == 2 and g.height == 3
    assert g.get((1, 0)) == WILDCARD
    assert format_grid(g, table) == text
    for _ in range(20):
        h, w = (int(v) for v in rng.integers(1, 6, 2))
        rows = [[str(int(v)) for v in rng.integers(0, 5, w)] for _ in range(h)]
        body = f"{h} {w}\n" + "".join(" ".join(r) + "\n" for r in rows)
        tab = SymbolTable()
        assert format_grid(parse_grid(body, tab), tab) == body
    path = tmp_path / "g.txt"
    path.write_text(text)
    assert read_grid(path).height == 3


@pytest.mark.parametrize("bad", ["", "2\na b\n", "2 2\na b\n", "1 2\na\n", "0 0\n", "x y\n"])
def test_grid_file_errors(bad):
    with pytest.raises(GridFormatError):
        parse_grid(bad)


def test_missing_file_is_a_format_error(tmp_path):
    with pytest.raises(GridFormatError):
        read_grid(tmp_path / "nope.txt")
