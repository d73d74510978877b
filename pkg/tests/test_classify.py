"""Point classification into regular, one-way, and absorbing label sets."""

import math

from shuntline import get_example, lambda_sets, parse_spec
from shuntline.classify import classify_point, regular_decomposition
from shuntline.sets import RealSet

from conftest import random_spec_doc


def intervals(rs):
    return rs.intervals


def test_whole_line_diffusion_is_all_regular():
    ls = lambda_sets(get_example('bm'))
    assert intervals(ls.lambda2) == ((-math.inf, math.inf, False, False),)
    assert ls.lambda_pl.is_empty and ls.lambda_pr.is_empty
    assert ls.lambda_t.is_empty


def test_one_way_segment_labels():
    ls = lambda_sets(get_example('drift'))
    assert intervals(ls.lambda_pr) == ((-math.inf, math.inf, False, False),)
    assert ls.lambda2.is_empty and ls.lambda_t.is_empty
    assert intervals(ls.lambda_r) == intervals(ls.lambda_pr)


def test_point_classes_and_derived_unions():
    spec = get_example('exa2')
    ls = lambda_sets(spec)
    assert intervals(ls.lambda_t) == ((-math.inf, 0.0, False, True),)
    assert intervals(ls.lambda2) == ((0.0, math.inf, False, False),)
    # absorbing points belong to both one-sided unions
    assert intervals(ls.lambda_l) == intervals(ls.lambda_t)
    assert intervals(ls.lambda_r) == intervals(ls.lambda_t)


def test_classify_point_matches_sets():
    spec = get_example('absorb-reflect')
    assert classify_point(spec, -1.0) == "trap"
    assert classify_point(spec, 0.0) == "trap"
    assert classify_point(spec, 0.5) == "regular"
    assert classify_point(spec, 1.0) == "left_shunt"
    assert classify_point(spec, 2.0) == "trap"


def test_partition_covers_line_without_overlap():
    for seed in range(20):
        spec = parse_spec(random_spec_doc(seed))
        ls = lambda_sets(spec)
        union = ls.lambda2.union(ls.lambda_pl).union(ls.lambda_pr).union(
            ls.lambda_t)
        assert intervals(union) == ((-math.inf, math.inf, False, False),)
        for a, b in ((ls.lambda2, ls.lambda_pl), (ls.lambda2, ls.lambda_pr),
                     (ls.lambda2, ls.lambda_t), (ls.lambda_pl, ls.lambda_pr),
                     (ls.lambda_pl, ls.lambda_t), (ls.lambda_pr, ls.lambda_t)):
            assert a.intersect(b).is_empty
        # complements: regular set is everything not one-sided
        assert intervals(ls.lambda2) == intervals(
            ls.lambda_l.union(ls.lambda_r).complement())


def test_regular_decomposition_lists_open_intervals():
    spec = get_example('absorb-reflect')
    dec = regular_decomposition(spec)
    assert len(dec) == 1
    lo, hi = dec[0][:2] if isinstance(dec[0], tuple) else (dec[0].a, dec[0].b)
    assert (lo, hi) == (0.0, 1.0)


def test_as_dict_round_trips_to_real_sets():
    d = lambda_sets(get_example('exa1')).as_dict()
    assert set(d) == {"lambda2", "lambda_pl", "lambda_pr", "lambda_t",
                      "lambda_l", "lambda_r"}
    assert isinstance(d["lambda2"], RealSet)
    assert intervals(d["lambda_pr"]) == ((0.0, 0.0, True, True),)
