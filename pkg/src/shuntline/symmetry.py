"""Symmetrizing measures for the generalized diffusion.

Verdict ladder:

* the process killed at its traps admits a symmetrizing measure exactly
  when the fine-regularity property holds and no shunt point can be
  approached from both of its sides (``lambda_ap`` empty);
* the unkilled process is symmetrizable when additionally no trap point
  is reached from elsewhere (``lambda_at`` empty).

When the killed verdict is positive, the state space splits into
components: each regular interval together with the shunt endpoints
pointing into it.  An endpoint joins the component outright when the
interval actually approaches it (reflecting behaviour); otherwise it is
kept only in the topological closure.  The canonical measure puts each
interval's own speed measure on its component and plain Lebesgue
measure on the leftover trap material; scaling each component by any
positive constant gives the full family of symmetrizing measures.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .boundary import EXIT, YES, boundary_profile
from .classify import lambda_sets
from .errors import DomainError, NotSymmetrizableError
from .expr import evaluate, parse_expr
from .graph import build_graph, reaches
from .hunt import check_hunt
from .model import (LEFT_SHUNT, REGULAR, RIGHT_SHUNT, TRAP, TRAP_SEGMENT,
                    DiffusionSpec)
from .quadrature import FINITE, INFINITE, UNDETERMINED, improper_integral
from .sets import RealSet

__all__ = ["lambda_ap", "lambda_at", "Component", "MeasureEntry", "Measure",
           "SymmetryReport", "check_symmetrizable", "canonical_measure",
           "measure_family"]


def _ext(v: float):
    return v if math.isfinite(v) else ("+inf" if v > 0 else "-inf")


def _interior_probe(piece) -> float:
    if math.isfinite(piece.a) and math.isfinite(piece.b):
        return 0.5 * (piece.a + piece.b)
    if math.isfinite(piece.a):
        return piece.a + 1.0
    if math.isfinite(piece.b):
        return piece.b - 1.0
    return 0.0


def lambda_ap(spec: DiffusionSpec, literal: bool = False,
              rel_tol: float = 1e-6) -> tuple:
    """Shunt points flanked by regular intervals on both sides and
    approachable from both.

    The default reading asks both flanking intervals to approach the
    point; ``literal=True`` instead runs reachability queries from
    interior probe points on each side.  On a line the two agree: any
    path into the point funnels through a flanking interval.
    """
    out = []
    graph = build_graph(spec) if literal else None
    profile = None if literal else boundary_profile(spec, rel_tol)
    for i, p in enumerate(spec.pieces):
        if not p.is_point or p.point_class not in (LEFT_SHUNT, RIGHT_SHUNT):
            continue
        left = spec.pieces[i - 1]
        right = spec.pieces[i + 1]
        if left.kind != REGULAR or right.kind != REGULAR:
            continue
        if literal:
            ok = (reaches(graph, _interior_probe(left), p.x)
                  and reaches(graph, _interior_probe(right), p.x))
        else:
            ok = (profile[(i - 1, "b")].approachable == YES
                  and profile[(i + 1, "a")].approachable == YES)
        if ok:
            out.append(p.x)
    return tuple(out)


def lambda_at(spec: DiffusionSpec) -> tuple:
    """Trap points that some other point reaches."""
    graph = build_graph(spec)
    targets = {t for (_, t) in graph.edges}
    out = [a.lo for i, a in enumerate(graph.atoms)
           if a.kind == "point" and a.point_class == TRAP and i in targets]
    return tuple(sorted(out))


# ---------------------------------------------------------------------------
# components and measures


@dataclass(frozen=True)
class Component:
    index: int
    piece_index: int
    lo: float
    hi: float
    lo_closed: bool        # endpoint genuinely belongs (reflecting shunt)
    hi_closed: bool
    tilde_lo_closed: bool  # closure version, approachable or not
    tilde_hi_closed: bool
    exit_sides: tuple      # sides where paths leave for good

    def as_dict(self) -> dict:
        return {"index": self.index, "piece_index": self.piece_index,
                "lo": _ext(self.lo), "hi": _ext(self.hi),
                "lo_closed": self.lo_closed, "hi_closed": self.hi_closed,
                "closure_lo_closed": self.tilde_lo_closed,
                "closure_hi_closed": self.tilde_hi_closed,
                "exit_sides": list(self.exit_sides)}


@dataclass(frozen=True)
class MeasureEntry:
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool
    density_src: str
    density: object
    atoms: tuple
    weight: float
    component: int      # -1 for trap material
    piece_index: int
    hint_lo: str
    hint_hi: str

    def as_dict(self) -> dict:
        return {"lo": _ext(self.lo), "hi": _ext(self.hi),
                "lo_closed": self.lo_closed, "hi_closed": self.hi_closed,
                "density": self.density_src,
                "atoms": [[p, w] for p, w in self.atoms],
                "weight": self.weight, "component": self.component,
                "piece_index": self.piece_index,
                "hints": {"lo": self.hint_lo, "hi": self.hint_hi}}

    def contains(self, x: float) -> bool:
        if self.lo < x < self.hi:
            return True
        return (x == self.lo and self.lo_closed) or (x == self.hi and self.hi_closed)


@dataclass(frozen=True)
class Measure:
    entries: tuple
    description: str = ""

    def as_dict(self) -> dict:
        return {"description": self.description,
                "entries": [e.as_dict() for e in self.entries]}

    def interval_mass(self, a: float, b: float, rel_tol: float = 1e-8):
        """(verdict, value) for the mass of [a, b].

        Declared endpoint-mass hints short-circuit: touching an endpoint
        whose nearby mass is declared infinite makes the answer
        infinite without any quadrature.
        """
        if b < a:
            raise DomainError("interval_mass needs a <= b")
        total = 0.0
        for e in self.entries:
            lo, hi = max(a, e.lo), min(b, e.hi)
            if hi < lo:
                continue
            for pos, w in e.atoms:
                if a <= pos <= b and e.contains(pos):
                    total += e.weight * w
            if hi <= lo:
                continue
            if lo == e.lo and math.isfinite(e.lo) and e.hint_lo == "infinite":
                return INFINITE, math.inf
            if hi == e.hi and math.isfinite(e.hi) and e.hint_hi == "infinite":
                return INFINITE, math.inf
            fn = (lambda y, ee=e: ee.weight * float(evaluate(ee.density, y)))
            mid = 0.5 * (lo + hi)
            for anchor, endpoint in ((mid, lo), (mid, hi)):
                res = improper_integral(fn, anchor, endpoint, rel_tol=rel_tol)
                if res.verdict == INFINITE:
                    return INFINITE, math.inf
                if res.verdict == UNDETERMINED:
                    return UNDETERMINED, math.nan
                total += abs(res.value)
        return FINITE, total


@dataclass(frozen=True)
class SymmetryReport:
    hunt_holds: bool
    killed: bool
    full: bool
    lambda_ap: tuple
    lambda_at: tuple
    components: tuple
    reason: str
    measure: object = None
    hunt: object = None

    def as_dict(self) -> dict:
        return {"hunt_holds": self.hunt_holds,
                "killed_symmetrizable": self.killed,
                "full_symmetrizable": self.full,
                "lambda_ap": [_ext(x) for x in self.lambda_ap],
                "lambda_at": [_ext(x) for x in self.lambda_at],
                "components": [c.as_dict() for c in self.components],
                "reason": self.reason}


def _components(spec: DiffusionSpec, rel_tol: float) -> tuple:
    profile = boundary_profile(spec, rel_tol)
    out = []
    for n, i in enumerate(spec.regular_indices()):
        p = spec.pieces[i]
        flags = {}
        exits = []
        for side, matching in (("a", RIGHT_SHUNT), ("b", LEFT_SHUNT)):
            ana = profile[(i, side)]
            adj = spec.neighbor(i, side)
            tilde = adj is not None and adj.is_point and adj.point_class == matching
            flags[side] = (tilde, tilde and ana.approachable == YES)
            if ana.role == EXIT:
                exits.append(side)
        out.append(Component(n, i, p.a, p.b,
                             flags["a"][1], flags["b"][1],
                             flags["a"][0], flags["b"][0], tuple(exits)))
    return tuple(out)


def _assert_component_union(spec: DiffusionSpec, components: tuple) -> None:
    closure = RealSet.from_intervals(
        (c.lo, c.hi, c.tilde_lo_closed, c.tilde_hi_closed) for c in components)
    expected = lambda_sets(spec).lambda_t.complement()
    assert closure == expected, (
        f"component closures {closure!r} must tile the complement of the "
        f"trap set {expected!r}")


def _measure_from(spec: DiffusionSpec, components: tuple, coeffs) -> Measure:
    entries = []
    for c in components:
        piece = spec.pieces[c.piece_index]
        w = 1.0 if coeffs is None else float(coeffs[c.index])
        if not (w > 0):
            raise DomainError(f"component {c.index}: weight must be positive")
        entries.append(MeasureEntry(
            c.lo, c.hi, c.lo_closed, c.hi_closed,
            piece.speed.density_src, piece.speed.density, piece.speed.atoms,
            w, c.index, c.piece_index,
            piece.speed.hint("a"), piece.speed.hint("b")))
    lebesgue = parse_expr("1")
    for i, p in enumerate(spec.pieces):
        if p.kind == TRAP_SEGMENT:
            entries.append(MeasureEntry(
                p.a, p.b, False, False, "1", lebesgue, (), 1.0, -1, i,
                "finite" if math.isfinite(p.a) else "infinite",
                "finite" if math.isfinite(p.b) else "infinite"))
    entries.sort(key=lambda e: e.lo)
    label = "canonical" if coeffs is None else "scaled family member"
    return Measure(tuple(entries), f"{label} symmetrizing measure for {spec.name}")


def check_symmetrizable(spec: DiffusionSpec, rel_tol: float = 1e-6) -> SymmetryReport:
    """Full verdict ladder plus components and canonical measure."""
    hunt = check_hunt(spec, rel_tol)
    lam_ap = lambda_ap(spec, rel_tol=rel_tol)
    lam_at = lambda_at(spec)
    killed = hunt.holds and not lam_ap
    full = killed and not lam_at
    if not hunt.holds:
        reason = ("no symmetrizing measure: some one-way point is hit "
                  "without being revisited")
    elif lam_ap:
        reason = ("no symmetrizing measure: shunt points approachable "
                  f"from both sides at {sorted(lam_ap)}")
    elif lam_at:
        reason = ("symmetrizable after killing at traps; traps reached "
                  f"from outside at {sorted(lam_at)} block the unkilled form")
    else:
        reason = "symmetrizable without killing"
    components = ()
    measure = None
    if killed:
        components = _components(spec, rel_tol)
        _assert_component_union(spec, components)
        measure = _measure_from(spec, components, None)
    return SymmetryReport(hunt.holds, killed, full, lam_ap, lam_at,
                          components, reason, measure, hunt)


def canonical_measure(spec: DiffusionSpec, rel_tol: float = 1e-6) -> Measure:
    report = check_symmetrizable(spec, rel_tol)
    if not report.killed:
        raise NotSymmetrizableError(report.reason)
    return report.measure


def measure_family(spec: DiffusionSpec, coefficients, rel_tol: float = 1e-6) -> Measure:
    """Member of the symmetrizing family with positive per-component scales.

    coefficients: mapping component index -> scale, or a sequence in
    component order.
    """
    report = check_symmetrizable(spec, rel_tol)
    if not report.killed:
        raise NotSymmetrizableError(report.reason)
    if not isinstance(coefficients, dict):
        seq = list(coefficients)
        if len(seq) != len(report.components):
            raise DomainError(
                f"need {len(report.components)} coefficients, got {len(seq)}")
        coefficients = {c.index: seq[k] for k, c in enumerate(report.components)}
    return _measure_from(spec, report.components, coefficients)
