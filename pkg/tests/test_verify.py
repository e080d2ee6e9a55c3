import numpy as np
import pytest

import oracles
from kmismatch2d import instrument
from kmismatch2d.errors import BadShape, OffsetOutOfRange, RangeError, WildcardPresent
from kmismatch2d.gridstring import WILDCARD, Grid2D, oracle_all_offsets
from kmismatch2d.verify import LceIndex, RowIds, baseline_kn2, build_lce, kangaroo_mismatches, verify_offsets


def test_lce_examples():
    assert build_lce([0, 0, 0, 0]).lce(0, 1) == 3
    a, b, sep = 0, 1, 9
    assert build_lce([a, b, sep, a, b]).lce(0, 3) == 2
    with pytest.raises(WildcardPresent):
        build_lce([0, int(WILDCARD)])


def test_suffix_array_is_sorted(rng):
    for _ in range(30):
        seq = rng.integers(0, int(rng.integers(1, 5)), int(rng.integers(1, 80)))
        idx = LceIndex(seq)
        s = seq.tolist()
        assert idx.sa.tolist() == sorted(range(len(s)), key=lambda i: s[i:])


def test_lce_random_probes(rng):
    seq = rng.integers(0, 3, 512)
    idx = build_lce(seq)
    i, j = rng.integers(0, 512, 1000), rng.integers(0, 512, 1000)
    got = idx.lce_many(i, j)
    s = seq.tolist()
    assert got.tolist() == [oracles.lce(s, a, b) for a, b in zip(i.tolist(), j.tolist())]


def test_kangaroo_examples():
    a, b, c, x = 0, 1, 2, 3
    idx = build_lce([a, b, c, a, x, c])
    assert kangaroo_mismatches(idx, 0, 0, 3, 10) == 0
    assert kangaroo_mismatches(idx, 0, 3, 3, 10) == 1
    with pytest.raises(RangeError):
        kangaroo_mismatches(idx, 4, 0, 3, 1)


def test_kangaroo_cap_is_a_prefix_of_the_naive_count(rng):
    seq = rng.integers(0, 2, 400)
    idx = build_lce(seq)
    for _ in range(200):
        length = int(rng.integers(1, 100))
        i, j = (int(v) for v in rng.integers(0, 400 - length, 2))
        naive = sum(seq[i + t] != seq[j + t] for t in range(length))
        assert kangaroo_mismatches(idx, i, j, length, 5) == min(5, naive)


def test_row_ids_match_equal_windows(rng):
    P = Grid2D((0, 0), rng.integers(0, 2, (3, 3)))
    T = Grid2D((0, 0), rng.integers(0, 2, (7, 7)))
    ids = RowIds(P, T)
    n, m = 7, 3
    span = n - m + 1
    t_ids = ids.top_seq[:n * span]
    for j in range(span):
        for i in range(n):
            for i2 in range(n):
                same = np.array_equal(T.cells[i, j:j + m], T.cells[i2, j:j + m])
                assert (t_ids[j * n + i] == t_ids[j * n + i2]) == same


def test_verify_examples():
    P = Grid2D((0, 0), np.zeros((2, 2)))
    assert verify_offsets(P, P, [(0, 0)]).tolist() == [0]
    T = np.zeros((3, 3))
    T[1, 1] = 1
    Q = [(0, 0), (1, 0), (0, 1), (1, 1)]
    assert verify_offsets(P, Grid2D((0, 0), T), Q).tolist() == [1, 1, 1, 1]


def test_verify_errors():
    P = Grid2D((0, 0), np.zeros((2, 2)))
    T = Grid2D((0, 0), np.zeros((3, 3)))
    with pytest.raises(OffsetOutOfRange):
        verify_offsets(P, T, [(2, 0)])
    with pytest.raises(BadShape):
        verify_offsets(T, P, [(0, 0)])
    with pytest.raises(WildcardPresent):
        verify_offsets(P, Grid2D((0, 0), np.full((3, 3), WILDCARD)), [(0, 0)])


def test_verify_equals_uncapped_oracle(rng):
    for _ in range(100):
        m = int(rng.integers(1, 10))
        n = m + int(rng.integers(0, 12))
        sigma = int(rng.choice([1, 2, 4]))
        P, T = rng.integers(0, sigma, (m, m)), rng.integers(0, sigma, (n, n))
        truth = oracles.all_offsets(P, T)
        Q = list(truth)
        got = verify_offsets(Grid2D((0, 0), P), Grid2D((0, 0), T), Q)
        assert got.tolist() == [truth[q] for q in Q]


def test_baseline_examples_and_oracle(rng):
    P = Grid2D((0, 0), rng.integers(0, 2, (4, 4)))
    assert baseline_kn2(P, P, 0).as_dict() == {(0, 0): 0}
    for _ in range(40):
        m = int(rng.integers(1, 8))
        n = m + int(rng.integers(0, 10))
        P = Grid2D((0, 0), rng.integers(0, 3, (m, m)))
        T = Grid2D((0, 0), rng.integers(0, 3, (n, n)))
        for k in (0, 2, m * m):
            assert baseline_kn2(P, T, k) == oracle_all_offsets(P, T, k)


def test_jump_counter_is_linear_in_total_distance(rng):
    m, n, k = 6, 20, 4
    P = Grid2D((0, 0), rng.integers(0, 2, (m, m)))
    T = Grid2D((0, 0), rng.integers(0, 2, (n, n)))
    span = n - m + 1
    with instrument.recording() as rec:
        res = baseline_kn2(P, T, k)
    total = int(res.values.sum())
    # one top-level jump per mismatching column plus one lower-level jump per mismatch, with slack
    assert rec.counters["jumps"] <= 4 * (span * span + total)
