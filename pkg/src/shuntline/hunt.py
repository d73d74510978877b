"""Fine-regularity verdict for one-way points.

The process is well behaved (excessive functions are finely continuous
along paths) exactly when every shunt point lying strictly inside a
communication class is a reflecting, included endpoint of a regular
interval: paths pushed through it re-enter the flanking interval and
come straight back.  Two ways this can fail:

* ``r1``: shunt material glued to more shunt or trap material, so a
  whole stretch of one-way points sits inside the class;
* ``r2``: an isolated shunt point whose flanking regular interval never
  returns to it in finite time.

``singleton_status`` grades individual points: ``polar`` singletons are
never hit from anywhere else, ``thin_not_polar`` ones are hit but left
instantly and for good, and everything else is ``not_thin``.  Failure
witnesses coincide with the thin-but-not-polar shunt points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .boundary import YES, boundary_profile
from .graph import build_graph, communication_classes
from .model import (LEFT_SHUNT, REGULAR, RIGHT_SHUNT, SHUNT_SEGMENT, TRAP,
                    DiffusionSpec)

__all__ = ["Witness", "HuntReport", "check_hunt", "singleton_status",
           "POLAR", "THIN_NOT_POLAR", "NOT_THIN"]

POLAR = "polar"
THIN_NOT_POLAR = "thin_not_polar"
NOT_THIN = "not_thin"


def _ext(v: float):
    return v if math.isfinite(v) else ("+inf" if v > 0 else "-inf")


@dataclass(frozen=True)
class Witness:
    kind: str    # r1 or r2
    lo: float
    hi: float    # lo == hi for a point witness
    note: str

    def as_dict(self) -> dict:
        return {"kind": self.kind, "lo": _ext(self.lo), "hi": _ext(self.hi),
                "note": self.note}


@dataclass(frozen=True)
class HuntReport:
    holds: bool
    witnesses: tuple
    h_xi: str     # equivalent_to_h / not_decided
    classes: object = None

    def as_dict(self) -> dict:
        return {"holds": self.holds,
                "witnesses": [w.as_dict() for w in self.witnesses],
                "h_xi": self.h_xi}


def _open_side_neighbor(spec: DiffusionSpec, index: int):
    """(neighbor index, neighbor piece, side of the neighbor facing back)."""
    p = spec.pieces[index]
    if p.point_class == RIGHT_SHUNT:
        j = index + 1
        return j, spec.pieces[j], "a"
    j = index - 1
    return j, spec.pieces[j], "b"


def check_hunt(spec: DiffusionSpec, rel_tol: float = 1e-6) -> HuntReport:
    """Decide the fine-regularity property and collect failure witnesses."""
    graph = build_graph(spec)
    classes = communication_classes(graph)
    profile = boundary_profile(spec, rel_tol)
    witnesses = []
    for i, p in enumerate(spec.pieces):
        if p.kind == SHUNT_SEGMENT:
            witnesses.append(Witness(
                "r1", p.a, p.b,
                "segment of one-way points inside its communication class"))
            continue
        if not p.is_point or p.point_class not in (LEFT_SHUNT, RIGHT_SHUNT):
            continue
        if not classes.ring_contains(p.x):
            continue
        j, nb, back_side = _open_side_neighbor(spec, i)
        if nb.kind == REGULAR:
            if profile[(j, back_side)].approachable == YES:
                continue  # reflecting included endpoint, harmless
            witnesses.append(Witness(
                "r2", p.x, p.x,
                f"shunt point at {p.x}: flanking regular interval never "
                f"returns to it"))
        else:
            witnesses.append(Witness(
                "r1", p.x, p.x,
                f"shunt point at {p.x} feeds straight into segment material"))
    witnesses.sort(key=lambda w: (w.lo, w.hi))
    from .symmetry import lambda_ap  # local import, symmetry imports us
    h_xi = "equivalent_to_h" if not lambda_ap(spec) else "not_decided"
    return HuntReport(not witnesses, tuple(witnesses), h_xi, classes)


def singleton_status(spec: DiffusionSpec, x: float, rel_tol: float = 1e-6) -> str:
    """Grade the singleton {x}: polar, thin_not_polar or not_thin.

    Only shunt points can be thin.  A shunt point is thin when its open
    side offers no way back: either segment material, or a regular
    interval that cannot approach the point.  A thin point is polar
    exactly when nothing else reaches it.
    """
    i, p = spec.piece_at(x)
    if not p.is_point or p.point_class == TRAP:
        return NOT_THIN
    j, nb, back_side = _open_side_neighbor(spec, i)
    if nb.kind == REGULAR:
        if boundary_profile(spec, rel_tol)[(j, back_side)].approachable == YES:
            return NOT_THIN
    graph = build_graph(spec)
    me = graph.locate(x)
    hit_from_elsewhere = any(t == me for (_, t) in graph.edges)
    return THIN_NOT_POLAR if hit_from_elsewhere else POLAR
