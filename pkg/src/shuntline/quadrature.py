"""Improper integrals with an explicit divergence policy.

Integrals that may blow up at an interval end are summed over dyadic
shells approaching that end.  The policy below decides between a finite
value, a declared divergence and an honest "undetermined":

* converged: the last two shell contributions are below ``rel_tol``
  relative to the running sum;
* infinite: the running sum passes ``cap`` (1e12), or grows by a factor
  of at least ``growth_factor`` (1.05) for ``growth_runs`` (8)
  consecutive shells after passing ``growth_floor`` (1e6), or the shell
  contributions themselves stop decaying (ratio >= ``stall_ratio``
  for ``growth_runs`` consecutive shells), which catches logarithmic
  divergence the first two rules never see;
* undetermined: shells are exhausted without any rule firing, or a
  significant shell flips sign after the contributions had decayed.
  All intended integrands are single-signed, so a late sign flip means
  the integrand was evaluated below its numerical resolution (typically
  cancellation against a truncated limit constant) and any further
  arithmetic would launder noise into a verdict.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import integrate

__all__ = ["IntegralResult", "improper_integral", "cell_quad", "gauss_cells"]

FINITE = "finite"
INFINITE = "infinite"
UNDETERMINED = "undetermined"

CAP = 1e12
GROWTH_FACTOR = 1.05
GROWTH_RUNS = 8
GROWTH_FLOOR = 1e6
STALL_RATIO = 0.9999
MAX_SHELLS = 160


@dataclass(frozen=True)
class IntegralResult:
    verdict: str  # finite / infinite / undetermined
    value: float
    shells: int
    note: str = ""

    @property
    def finite(self):
        return self.verdict == FINITE


def cell_quad(fn, a, b, rel_tol=1e-8):
    """Adaptive quadrature on a proper cell."""
    val, _ = integrate.quad(fn, a, b, epsrel=rel_tol, epsabs=1e-300, limit=200)
    return val


def _shell_edges(anchor, endpoint, k):
    """Edges of dyadic shell k, counted from the anchor toward the endpoint."""
    if math.isinf(endpoint):
        sign = 1.0 if endpoint > 0 else -1.0
        lo = anchor + sign * (2.0 ** k - 1.0)
        hi = anchor + sign * (2.0 ** (k + 1) - 1.0)
        return (lo, hi) if sign > 0 else (hi, lo)
    width = endpoint - anchor
    near = endpoint - width * 2.0 ** (-k - 1)
    far = endpoint - width * 2.0 ** (-k)
    return (far, near) if width > 0 else (near, far)


def improper_integral(fn, anchor, endpoint, rel_tol=1e-6,
                      max_shells=MAX_SHELLS) -> IntegralResult:
    """Integrate fn between anchor and endpoint, improper at the endpoint.

    fn must be integrable on every compact subinterval excluding the
    endpoint and must not change sign; a genuinely oscillating integrand
    will be reported undetermined once its shell contributions flip.
    """
    total = 0.0
    prev_contrib = None
    small_run = 0
    growth_run = 0
    stall_run = 0
    prev_total = None
    lead_sign = 0.0
    peak = 0.0
    decayed = False
    for k in range(max_shells):
        lo, hi = _shell_edges(anchor, endpoint, k)
        if not (lo < hi) or lo == hi:
            # shell width fell below float resolution
            if prev_contrib is not None and abs(prev_contrib) <= rel_tol * max(abs(total), 1e-300):
                return IntegralResult(FINITE, total, k, "width underflow, tail negligible")
            return IntegralResult(UNDETERMINED, total, k, "shell width underflow")
        try:
            contrib = cell_quad(fn, lo, hi, rel_tol=min(rel_tol, 1e-8))
        except Exception as exc:  # quad failure counts as undetermined
            return IntegralResult(UNDETERMINED, total, k, f"quadrature failure: {exc}")
        if not math.isfinite(contrib):
            return IntegralResult(INFINITE, math.inf, k, "non-finite shell")
        total += contrib
        if abs(total) > CAP:
            return IntegralResult(INFINITE, math.inf, k, "cap exceeded")
        if lead_sign == 0.0 and contrib != 0.0:
            lead_sign = math.copysign(1.0, contrib)
        peak = max(peak, abs(contrib))
        if not decayed and peak > 0.0 and abs(contrib) <= peak / 10.0:
            decayed = True
        if decayed and contrib * lead_sign < 0.0 \
                and abs(contrib) > rel_tol * max(abs(total), 1e-300):
            return IntegralResult(UNDETERMINED, total, k,
                                  "endpoint resolution exhausted")
        if prev_total is not None and abs(prev_total) > GROWTH_FLOOR \
                and abs(total) >= GROWTH_FACTOR * abs(prev_total):
            growth_run += 1
            if growth_run >= GROWTH_RUNS:
                return IntegralResult(INFINITE, math.inf, k, "sustained growth")
        else:
            growth_run = 0
        if prev_contrib is not None and abs(prev_contrib) > 0 \
                and abs(contrib) >= STALL_RATIO * abs(prev_contrib):
            stall_run += 1
            if stall_run >= GROWTH_RUNS and abs(contrib) > rel_tol * max(abs(total), 1e-300):
                return IntegralResult(INFINITE, math.inf, k, "non-decaying shells")
        else:
            stall_run = 0
        if abs(contrib) <= rel_tol * max(abs(total), 1e-300):
            small_run += 1
            if small_run >= 2:
                return IntegralResult(FINITE, total, k + 1)
        else:
            small_run = 0
        prev_contrib = contrib
        prev_total = total
    # shells exhausted: try a geometric tail estimate
    if prev_contrib is not None and abs(prev_contrib) > 0:
        try:
            lo, hi = _shell_edges(anchor, endpoint, max_shells)
            tail_ratio = abs(cell_quad(fn, lo, hi)) / abs(prev_contrib)
        except Exception:
            tail_ratio = 1.0
        if tail_ratio < 0.99:
            tail = abs(prev_contrib) * tail_ratio / (1.0 - tail_ratio)
            if tail <= 0.1 * max(abs(total), 1e-300):
                return IntegralResult(FINITE, total + math.copysign(tail, prev_contrib),
                                      max_shells, "geometric tail estimate")
    return IntegralResult(UNDETERMINED, total, max_shells, "shells exhausted")


@lru_cache(maxsize=8)
def _gl_nodes(order):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return nodes, weights


def gauss_cells(fvec, edges, order=16):
    """Fixed-order Gauss-Legendre integral of fvec on each cell.

    fvec maps a flat numpy array of positions to values; edges is an
    increasing array of cell boundaries.  Returns one integral per cell.
    """
    edges = np.asarray(edges, dtype=float)
    nodes, weights = _gl_nodes(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    pts = mid[:, None] + half[:, None] * nodes[None, :]
    vals = fvec(pts.ravel()).reshape(pts.shape)
    return half * (vals @ weights)
