"""Endpoint analysis of regular pieces.

For each endpoint of a regular interval this module decides

* the scale limit (finite value or declared +-inf),
* whether the endpoint is approachable from inside in finite time,
* the endpoint's dynamic role.

Approachability uses the integral of the speed mass between a moving
point and a fixed interior anchor, integrated against the scale.  By
Fubini this equals the single integral of (s(y) - s(endpoint-limit))
against the speed measure, which is what gets evaluated, shell by
shell, toward the endpoint.  An infinite scale limit forces "no"
outright: the integrand has an everywhere-infinite minorant as soon as
any interior mass is present.  A "finite" endpoint mass hint together
with a finite scale limit forces "yes" (the integrand is bounded by the
scale gap times the hinted-finite mass).

The verdict must not depend on the anchor; it is audited at two anchors
and degrades to undetermined if they disagree.  A numerically
undetermined verdict falls back on an "infinite" endpoint mass hint and
resolves to "no"; borderline shell sums track the mass integral, so the
declaration settles them.  (When the boundary integral genuinely
converges against infinite end mass the probe succeeds on its own and
the hint is never consulted.)

Roles at an endpoint (left endpoint wording; right is the mirror):

* adjacent point is a right shunt (points into the piece):
  approachable -> ``included_shunt``, else -> ``entrance_unreachable``;
* adjacent point is a left shunt (exits into the neighbor):
  approachable -> ``glue_to_neighbor``, else -> ``natural``;
* adjacent point is a trap, or the endpoint is infinite:
  approachable -> ``exit``, else -> ``natural``.

A finite exit endpoint therefore always sits next to a trap; that
consistency is asserted and raised as a hard error if numerics ever
disagree with it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import EvalError, UndeterminedVerdict
from .expr import evaluate
from .model import (LEFT_SHUNT, REGULAR, RIGHT_SHUNT, TRAP, DiffusionSpec,
                    Piece)
from .quadrature import FINITE, INFINITE, UNDETERMINED, improper_integral

__all__ = [
    "YES", "NO", "UNDET", "EXIT", "INCLUDED_SHUNT", "ENTRANCE_UNREACHABLE",
    "NATURAL", "GLUE_TO_NEIGHBOR", "EndpointAnalysis", "scale_limit",
    "approachable", "endpoint_role", "boundary_profile",
]

YES = "yes"
NO = "no"
UNDET = "undetermined"

EXIT = "exit"
INCLUDED_SHUNT = "included_shunt"
ENTRANCE_UNREACHABLE = "entrance_unreachable"
NATURAL = "natural"
GLUE_TO_NEIGHBOR = "glue_to_neighbor"

_LIMIT_CAP = 1e12


def scale_limit(piece: Piece, side: str) -> float:
    """Limit of the scale at endpoint 'a' or 'b' of a regular piece.

    Probes a geometric sequence toward the endpoint.  Declared +-inf
    when values pass 1e12 while still strictly monotone, or when the
    increments of the (monotone) sequence stop shrinking, which covers
    logarithmic growth that never reaches the cap.
    """
    if piece.kind != REGULAR:
        raise EvalError("scale limits are defined for regular pieces")
    e = piece.endpoint(side)
    a, b = piece.a, piece.b
    if math.isfinite(e):
        width = min(1.0, (b - a) / 2 if math.isfinite(b - a) else 1.0)
        anchor = e + width if side == "a" else e - width
        xs = (anchor + (e - anchor) * (1.0 - 2.0 ** (-k)) for k in range(1, 420))
    else:
        anchor = a + 1.0 if side == "b" and math.isfinite(a) else \
            b - 1.0 if side == "a" and math.isfinite(b) else 0.0
        sign = 1.0 if side == "b" else -1.0
        xs = (anchor + sign * (2.0 ** k - 1.0) for k in range(1, 420))
    sign_to_end = 1.0 if side == "b" else -1.0
    vals = []
    prev_step = None
    stall = 0
    for x in xs:
        v = evaluate(piece.scale, float(x))
        if math.isinf(v):
            return math.copysign(math.inf, sign_to_end)
        vals.append(v)
        if len(vals) < 2:
            continue
        step = vals[-1] - vals[-2]
        if step * sign_to_end < 0:
            raise EvalError(f"scale oscillates toward endpoint {side} = {e}")
        if abs(v) > _LIMIT_CAP:
            return math.copysign(math.inf, sign_to_end)
        if abs(step) <= 1e-9 * max(1.0, abs(v)):
            return v
        if prev_step is not None and abs(step) >= 0.999 * abs(prev_step):
            stall += 1
            if stall >= 12:
                return math.copysign(math.inf, sign_to_end)
        else:
            stall = 0
        prev_step = step
    raise EvalError(f"scale limit did not settle at endpoint {side} = {e}")


def _default_anchors(piece: Piece):
    a, b = piece.a, piece.b
    if math.isfinite(a) and math.isfinite(b):
        return a + (b - a) / 2, a + (b - a) / 4
    if math.isfinite(a):
        return a + 1.0, a + 2.0
    if math.isfinite(b):
        return b - 1.0, b - 2.0
    return 0.0, 1.0


def approachable(piece: Piece, side: str, anchor: float = None,
                 rel_tol: float = 1e-6):
    """Tri-state approachability of an endpoint from inside the piece.

    Returns (verdict, value) where value is the boundary integral when
    finite.  The verdict is audited at a second anchor.
    """
    if piece.kind != REGULAR:
        raise EvalError("approachability is defined for regular pieces")
    s_lim = scale_limit(piece, side)
    if math.isinf(s_lim):
        return NO, math.inf
    if piece.speed.hint(side) == "finite":
        return YES, _boundary_integral(piece, side, s_lim,
                                       _default_anchors(piece)[0], rel_tol).value
    c1, c2 = _default_anchors(piece)
    if anchor is not None:
        c1 = anchor
    r1 = _boundary_integral(piece, side, s_lim, c1, rel_tol)
    r2 = _boundary_integral(piece, side, s_lim, c2, rel_tol)
    v1 = YES if r1.verdict == FINITE else NO if r1.verdict == INFINITE else UNDET
    v2 = YES if r2.verdict == FINITE else NO if r2.verdict == INFINITE else UNDET
    verdict = v1 if v1 == v2 else UNDET
    if verdict == UNDET and piece.speed.hint(side) == "infinite":
        return NO, math.inf
    if verdict == UNDET:
        return UNDET, r1.value
    return verdict, r1.value if verdict == YES else math.inf


def _boundary_integral(piece, side, s_lim, anchor, rel_tol):
    """Shell integral of (s(y) - s_lim) (signed toward the endpoint)
    against the speed measure between anchor and the endpoint."""
    dens = piece.speed.density
    scale = piece.scale
    e = piece.endpoint(side)
    sign = 1.0 if side == "a" else -1.0

    def f(y):
        return sign * (evaluate(scale, float(y)) - s_lim) * evaluate(dens, float(y))

    res = improper_integral(f, anchor, e, rel_tol=rel_tol)
    if res.verdict != FINITE:
        return res
    lo, hi = (e, anchor) if side == "a" else (anchor, e)
    atom_part = sum(w * sign * (evaluate(scale, at) - s_lim)
                    for at, w in piece.speed.atoms if lo < at < hi)
    return type(res)(res.verdict, res.value + atom_part, res.shells, res.note)


@dataclass(frozen=True)
class EndpointAnalysis:
    piece_index: int
    side: str                 # 'a' or 'b'
    endpoint: float
    scale_limit: float
    approachable: str         # yes / no / undetermined
    role: str
    boundary_integral: float
    adjacent_class: str = ""  # class of the adjacent singular point, if any

    def as_dict(self) -> dict:
        return {
            "piece_index": self.piece_index,
            "side": self.side,
            "endpoint": self.endpoint if math.isfinite(self.endpoint)
            else ("+inf" if self.endpoint > 0 else "-inf"),
            "scale_limit": self.scale_limit if math.isfinite(self.scale_limit)
            else ("+inf" if self.scale_limit > 0 else "-inf"),
            "approachable": self.approachable,
            "role": self.role,
            "boundary_integral": self.boundary_integral
            if math.isfinite(self.boundary_integral) else "inf",
            "adjacent_class": self.adjacent_class,
        }


def _role(spec, index, side, app):
    piece = spec.pieces[index]
    e = piece.endpoint(side)
    if math.isinf(e):
        return EXIT if app == YES else NATURAL, ""
    adj = spec.neighbor(index, side)
    cls = adj.point_class
    into = RIGHT_SHUNT if side == "a" else LEFT_SHUNT  # shunt pointing into the piece
    away = LEFT_SHUNT if side == "a" else RIGHT_SHUNT
    if cls == into:
        return (INCLUDED_SHUNT if app == YES else ENTRANCE_UNREACHABLE), cls
    if cls == away:
        return (GLUE_TO_NEIGHBOR if app == YES else NATURAL), cls
    return (EXIT if app == YES else NATURAL), cls


def endpoint_role(spec: DiffusionSpec, piece_index: int, side: str,
                  rel_tol: float = 1e-6) -> EndpointAnalysis:
    """Full endpoint analysis for one endpoint of a regular piece.

    Raises UndeterminedVerdict if approachability cannot be decided;
    the message names the endpoint and suggests an endpoint mass hint.
    """
    piece = spec.pieces[piece_index]
    if piece.kind != REGULAR:
        raise EvalError("endpoint roles are defined for regular pieces")
    s_lim = scale_limit(piece, side)
    app, value = approachable(piece, side, rel_tol=rel_tol)
    if app == UNDET:
        e = piece.endpoint(side)
        raise UndeterminedVerdict(
            f"approachability undetermined at endpoint {side} = {e} of piece "
            f"{piece_index}; declare speed.hints.{side} (finite or infinite) "
            f"to settle it")
    role, cls = _role(spec, piece_index, side, app)
    if role == EXIT and math.isfinite(piece.endpoint(side)) and cls != TRAP:
        raise UndeterminedVerdict(
            f"inconsistent analysis: finite exit endpoint {piece.endpoint(side)} "
            f"of piece {piece_index} is not adjacent to a trap")
    return EndpointAnalysis(piece_index, side, piece.endpoint(side), s_lim,
                            app, role, value, cls)


@lru_cache(maxsize=128)
def boundary_profile(spec: DiffusionSpec, rel_tol: float = 1e-6):
    """EndpointAnalysis for both ends of every regular piece, keyed
    (piece_index, side)."""
    out = {}
    for i in spec.regular_indices():
        for side in ("a", "b"):
            out[(i, side)] = endpoint_role(spec, i, side, rel_tol=rel_tol)
    return out
