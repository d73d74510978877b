"""Interval-set algebra used for the point classification."""

import math

from shuntline.sets import RealSet


def iv(a, b, ca=False, cb=False):
    return RealSet.from_intervals([(a, b, ca, cb)])


def test_normalization_merges_touching_intervals():
    r = RealSet.from_intervals([(0, 1, True, True), (1, 2, False, True)])
    assert r.intervals == ((0.0, 2.0, True, True),)
    # open endpoints that merely touch stay separate
    r2 = RealSet.from_intervals([(0, 1, True, False), (1, 2, False, True)])
    assert len(r2.intervals) == 2


def test_contains_respects_closedness():
    r = iv(0, 1, True, False)
    assert r.contains(0.0)
    assert r.contains(0.5)
    assert not r.contains(1.0)
    assert not r.contains(-1e-12)


def test_union_intersect_difference():
    a = iv(0, 2, True, True)
    b = iv(1, 3, False, False)
    assert a.union(b).intervals == ((0.0, 3.0, True, False),)
    assert a.intersect(b).intervals == ((1.0, 2.0, False, True),)
    assert a.difference(b).intervals == ((0.0, 1.0, True, True),)


def test_complement_involution():
    r = RealSet.from_intervals([(-math.inf, 0, False, True),
                                (1, 2, True, False)])
    assert r.complement().complement().intervals == r.intervals
    assert RealSet.line().complement().is_empty
    assert RealSet.empty().complement().intervals == RealSet.line().intervals


def test_point_sets():
    p = RealSet.point(3.0)
    assert p.contains(3.0) and not p.contains(3.0000001)
    c = p.complement()
    assert not c.contains(3.0) and c.contains(2.0) and c.contains(4.0)


def test_de_morgan_on_random_families():
    import random
    rng = random.Random(11)
    for _ in range(25):
        def rand_set():
            pieces = []
            for _ in range(rng.randint(1, 3)):
                a = rng.uniform(-5, 5)
                b = a + rng.uniform(0, 3)
                pieces.append((a, b, rng.random() < 0.5, rng.random() < 0.5))
            return RealSet.from_intervals(pieces)
        A, B = rand_set(), rand_set()
        lhs = A.union(B).complement()
        rhs = A.complement().intersect(B.complement())
        assert lhs.intervals == rhs.intervals
        # spot-check membership on an independent grid
        for x in [rng.uniform(-6, 6) for _ in range(20)]:
            assert A.difference(B).contains(x) == (
                A.contains(x) and not B.contains(x))
