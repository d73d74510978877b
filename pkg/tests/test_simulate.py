"""Embedded-chain simulator: geometry, statuses, estimators, determinism."""

import collections
import math

import numpy as np
import pytest

from shuntline import ChainBuildError, get_example, parse_spec
from shuntline.simulate import (STATUS_NAMES, analytic_hitting,
                                build_chain, estimate_hitting,
                                estimate_symmetry_defect, run, simulate_path)

from conftest import spec_from


def status_counter(out):
    return collections.Counter(STATUS_NAMES[s] for s in out["status"])


def test_unit_scale_chain_geometry():
    ch = build_chain(get_example('bm'), (0.0, 1.0), 0.05)
    walk = ch.kind == 0
    assert np.allclose(np.diff(np.sort(ch.x[walk])), 0.05, atol=1e-12)
    # natural scale, flat density: the classical h^2 clock and fair coin
    assert np.allclose(ch.tau[walk], 0.05 ** 2, rtol=1e-12)
    assert np.allclose(ch.p_right[walk], 0.5, rtol=1e-12)


def test_cubic_scale_reproduces_scale_ratio():
    spec = parse_spec({"name": "cubic", "pieces": [
        {"kind": "regular_interval", "a": "-inf", "b": "inf",
         "scale": "x^3", "speed": {"density": "2"}}]})
    assert analytic_hitting(spec, 0.5, 0.0, 1.0) == pytest.approx(0.125,
                                                                  rel=1e-12)
    ch = build_chain(spec, (0.0, 1.0), 0.01)
    est = estimate_hitting(ch, 0.5, 1.0, 50.0, 4000, seed=21)
    assert est["ci_low"] <= 0.125 <= est["ci_high"]
    assert abs(est["estimate"] - 0.125) < 0.02


def test_exit_time_mean_matches_closed_form():
    # expected exit time of the unit diffusion from (0, 1) started at x
    # is x(1 - x)
    ch = build_chain(get_example('bm'), (0.0, 1.0), 0.02)
    out = run(ch, x0=0.3, t_max=50.0, n_rep=3000, seed=5,
              mode="part_on_window")
    assert status_counter(out)["alive"] == 0
    times = out["final_time"]
    se = times.std() / math.sqrt(len(times))
    assert abs(times.mean() - 0.21) <= 4.0 * se + 1e-3
    # exponential holding changes the clock law, not its mean
    out2 = run(ch, x0=0.3, t_max=50.0, n_rep=3000, seed=6,
               mode="part_on_window", exponential_holding=True)
    se2 = out2["final_time"].std() / math.sqrt(3000)
    assert abs(out2["final_time"].mean() - 0.21) <= 4.0 * se2 + 1e-3


def test_one_way_segment_moves_at_unit_speed():
    ch = build_chain(get_example('drift'), (-1.0, 1.0), 0.01)
    path = simulate_path(ch, 0.0, 0.7, seed=3)
    xs = list(path.positions)
    assert all(b >= a - 1e-12 for a, b in zip(xs, xs[1:]))
    assert path.status == "alive"
    assert xs[-1] == pytest.approx(0.7, abs=0.02)
    # longer horizon: the path crosses the window edge and is killed
    path2 = simulate_path(ch, 0.0, 2.0, seed=3)
    assert path2.status == "killed_at_window"
    assert path2.times[-1] == pytest.approx(1.0, abs=0.02)


def test_trap_statuses_full_versus_killed():
    ch = build_chain(get_example('exa2'), (-1.0, 2.0), 0.05)
    full = run(ch, x0=0.5, t_max=1.0, n_rep=400, seed=9, mode="full")
    killed = run(ch, x0=0.5, t_max=1.0, n_rep=400, seed=9,
                 mode="killed_at_traps")
    # same randomness, same classification of every path
    assert np.array_equal(full["status"], killed["status"])
    ab = full["status"] == 3
    assert ab.sum() > 100
    # freezing reports the horizon, killing reports the absorption time
    assert np.all(full["final_time"][ab] == 1.0)
    assert np.all(killed["final_time"][ab] < 1.0)
    assert np.allclose(ch.x[full["final_node"][ab]], 0.0)


def test_absorption_probability_tracks_scale_ratio():
    # from x in (0, 2) the chance of absorbing at 0 before exiting at 2
    # is 1 - x/2 for natural scale
    ch = build_chain(get_example('exa2'), (-1.0, 2.0), 0.05)
    out = run(ch, x0=0.5, t_max=200.0, n_rep=2000, seed=14,
              mode="killed_at_traps")
    c = status_counter(out)
    assert c["alive"] == 0
    p = c["absorbed_at_trap"] / 2000.0
    assert p == pytest.approx(0.75, abs=0.03)


def test_window_edge_kills_even_at_reflecting_endpoint():
    """Windows are open intervals: their edges kill the part process,
    even where the full model would reflect.  A window that strictly
    contains the reflecting endpoint keeps the reflection."""
    ar = get_example('absorb-reflect')
    edge = build_chain(ar, (-0.5, 1.0), 0.05)
    o1 = run(edge, x0=0.9, t_max=4.0, n_rep=300, seed=13,
             mode="killed_at_traps")
    assert status_counter(o1)["killed_at_window"] > 150

    wide = build_chain(ar, (-0.5, 1.5), 0.05)
    o2 = run(wide, x0=0.9, t_max=4.0, n_rep=300, seed=13,
             mode="killed_at_traps")
    c2 = status_counter(o2)
    assert c2["killed_at_window"] == 0
    assert c2["absorbed_at_trap"] > 250
    # reflection caps every path at the included endpoint
    top = max(max(simulate_path(wide, 0.9, 4.0, seed=13, rep=r).positions)
              for r in range(30))
    assert top <= 1.0 + 1e-12


def test_chain_build_refusals():
    drift = get_example('drift')
    with pytest.raises(ChainBuildError):
        build_chain(drift, (-math.inf, math.inf), 0.05)
    with pytest.raises(ChainBuildError):
        build_chain(get_example('split-bm'), (-math.inf, math.inf), 0.05)
    part = spec_from([
        {"kind": "shunt_segment", "a": "-inf", "b": "0",
         "direction": "right", "reach": "partial:-1"},
        {"kind": "singular_point", "x": "0", "class": "right_shunt"},
        {"kind": "regular_interval", "a": "0", "b": "inf",
         "scale": "x/2", "speed": {"density": "2"}}])
    with pytest.raises(ChainBuildError):
        build_chain(part, (-2.0, 1.0), 0.05)


def test_infinite_edge_allowed_when_reachable_in_finite_time():
    spec = spec_from([
        {"kind": "trap_segment", "a": "-inf", "b": "0"},
        {"kind": "singular_point", "x": "0", "class": "trap"},
        {"kind": "regular_interval", "a": "0", "b": "inf",
         "scale": "-1/x", "speed": {"density": "1/x^4"}}])
    ch = build_chain(spec, (0.5, math.inf), 0.02)
    out = run(ch, x0=1.0, t_max=20.0, n_rep=200, seed=4,
              mode="killed_at_traps")
    c = status_counter(out)
    assert c["dead_at_infinite_endpoint"] > 50
    assert c["dead_at_infinite_endpoint"] + c["killed_at_window"] == 200


def test_parallel_runs_are_byte_identical():
    ch = build_chain(get_example('bm'), (0.0, 1.0), 0.02)
    a = run(ch, x0=0.4, t_max=0.5, n_rep=4000, seed=77, n_jobs=1)
    b = run(ch, x0=0.4, t_max=0.5, n_rep=4000, seed=77, n_jobs=8)
    for key in ("final_node", "final_time", "status", "hit"):
        assert np.array_equal(a[key], b[key]), key


def test_scalar_path_engine_matches_vector_engine():
    ch = build_chain(get_example('bm'), (0.0, 1.0), 0.05)
    out = run(ch, x0=0.3, t_max=0.4, n_rep=16, seed=31)
    for rep in range(16):
        path = simulate_path(ch, 0.3, 0.4, seed=31, rep=rep)
        assert ch.x[out["final_node"][rep]] == pytest.approx(
            path.positions[-1], abs=1e-12)
        assert out["final_time"][rep] == pytest.approx(path.times[-1],
                                                       abs=1e-12)
        assert STATUS_NAMES[out["status"][rep]] == path.status


def test_hitting_estimator_reports_wilson_interval():
    ch = build_chain(get_example('bm'), (0.0, 1.0), 0.02)
    est = estimate_hitting(ch, 0.3, 1.0, 50.0, 2000, seed=8)
    assert 0.0 <= est["ci_low"] <= est["estimate"] <= est["ci_high"] <= 1.0
    assert est["hits"] == round(est["estimate"] * 2000)
    assert est["ci_low"] <= 0.3 <= est["ci_high"]


def test_defect_estimator_weighting_options():
    ch = build_chain(get_example('bm'), (0.0, 1.0), 0.05)

    def f(x):
        return 1.0 if 0.2 <= x <= 0.4 else 0.0

    def g(x):
        return 1.0 if 0.6 <= x <= 0.8 else 0.0

    for weights in (None, "lebesgue"):
        d = estimate_symmetry_defect(ch, f, g, 0.3, 400, seed=19,
                                     weights=weights)
        assert d["ci_low"] <= 0.0 <= d["ci_high"]
        assert d["total_weight"] > 0
    custom = np.ones(len(ch.x))
    d2 = estimate_symmetry_defect(ch, f, g, 0.3, 400, seed=19,
                                  weights=custom)
    assert d2["ci_low"] <= 0.0 <= d2["ci_high"]


def test_warnings_list_is_quiet_on_smooth_data():
    ch = build_chain(get_example('bm'), (0.0, 1.0), 0.05)
    assert ch.warnings == ()
