"""Shell quadrature: verdicts and values on integrals with known answers."""

import math

import numpy as np
import pytest

from shuntline.quadrature import (FINITE, INFINITE, UNDETERMINED, cell_quad,
                                  gauss_cells, improper_integral)


def test_cell_quad_sine():
    assert cell_quad(np.sin, 0.0, math.pi) == pytest.approx(2.0, rel=1e-12)


def test_gauss_cells_exact_for_cubics():
    edges = np.array([0.0, 0.25, 0.6, 1.0])
    vals = gauss_cells(lambda xs: 4.0 * xs ** 3 - xs, edges, order=4)
    exact = np.diff(edges ** 4 - edges ** 2 / 2.0)
    assert np.allclose(vals, exact, rtol=1e-14, atol=1e-16)
    assert vals.sum() == pytest.approx(0.5, abs=1e-14)


def test_convergent_tail_at_infinity():
    res = improper_integral(lambda xs: xs ** -2.0, 1.0, math.inf)
    assert res.verdict == FINITE
    assert res.value == pytest.approx(1.0, abs=1e-5)


def test_divergent_log_tail_at_infinity():
    # 1/x contributes ln 2 per dyadic shell forever: the stall rule fires
    res = improper_integral(lambda xs: 1.0 / xs, 1.0, math.inf)
    assert res.verdict == INFINITE


def test_integrable_singularity_at_finite_endpoint():
    res = improper_integral(lambda xs: xs ** -0.5, 1.0, 0.0)
    assert res.verdict == FINITE
    assert res.value == pytest.approx(2.0, abs=1e-5)


def test_nonintegrable_singularity_at_finite_endpoint():
    res = improper_integral(lambda xs: 1.0 / xs, 1.0, 0.0)
    assert res.verdict == INFINITE


def test_growth_rule_catches_power_divergence():
    res = improper_integral(lambda xs: xs, 1.0, math.inf)
    assert res.verdict == INFINITE


def test_sign_flip_after_decay_is_undetermined():
    """A late sign flip means the integrand lost the endpoint resolution.

    Callers only pass single-signed integrands; a significant
    opposite-sign shell appearing after the contributions have decayed
    indicates the evaluations themselves went bad (for example a
    truncated limit constant swamping the true term), so no verdict is
    safe.
    """
    def f(xs):
        # behaves like x^-1.5 at first, then a corrupted negative tail
        out = xs ** -1.5
        out = np.where(xs > 4000.0, -1.0 / xs, out)
        return out

    res = improper_integral(f, 1.0, math.inf)
    assert res.verdict == UNDETERMINED
    assert "resolution" in res.note


def test_value_only_reported_meaningfully_when_finite():
    res = improper_integral(lambda xs: np.ones_like(xs), 1.0, math.inf)
    assert res.verdict == INFINITE
