"""Monte Carlo engine: an embedded birth-death chain for the diffusion.

Each regular interval met by the simulation window gets a grid that is
uniform in its scale coordinate.  Jump probabilities make the chain
exactly scale-linear, and mean holding times come from the Green
function of the two-cell exit problem, so spatial hitting statistics
are exact and time statistics converge at order h^2.  Shunt segments
get deterministic unit-drift hops on an x-uniform grid; shunt points
become deterministic entry moves into their open side; traps absorb;
window edges kill.

Randomness is a stateless counter hash of (seed, replication, step), so
results are byte-identical no matter how work is chunked or how many
workers run (``n_jobs``).  Holding times are deterministic by default;
``exponential_holding=True`` draws exponential times at walk nodes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .boundary import EXIT, GLUE_TO_NEIGHBOR, INCLUDED_SHUNT, YES, boundary_profile
from .errors import ChainBuildError, DomainError
from .expr import evaluate
from .model import REGULAR, SHUNT_SEGMENT, TRAP, DiffusionSpec
from .quadrature import FINITE, improper_integral, gauss_cells

__all__ = ["ChainModel", "build_chain", "run", "simulate_path", "PathResult",
           "estimate_hitting", "analytic_hitting", "estimate_symmetry_defect",
           "MODE_FULL", "MODE_KILLED", "MODE_PART", "STATUS_NAMES"]

# node kinds
WALK, DET, TRAP_NODE, KILL_WINDOW, KILL_INF = 0, 1, 2, 3, 4
# replication statuses
RUNNING, ALIVE, KILLED_WINDOW, ABSORBED_TRAP, DEAD_INF = 0, 1, 2, 3, 4
STATUS_NAMES = {ALIVE: "alive", KILLED_WINDOW: "killed_at_window",
                ABSORBED_TRAP: "absorbed_at_trap",
                DEAD_INF: "dead_at_infinite_endpoint"}

MODE_FULL = "full"
MODE_KILLED = "killed_at_traps"
MODE_PART = "part_on_window"
_MODES = (MODE_FULL, MODE_KILLED, MODE_PART)

_CHUNK = 1024
_STEP_START = 1 << 62  # counter slot reserved for start-node sampling


# ---------------------------------------------------------------------------
# counter-based uniforms

_PHI = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_C_REP = np.uint64(0xD1342543DE82EF95)
_C_STEP = np.uint64(0xAF251AF3B0F025B5)


def _mix(z):
    z = (z ^ (z >> np.uint64(30))) * _M1
    z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _uniform(seed, rep, step):
    """U[0,1) from the (seed, rep, step) counter; rep may be an array."""
    with np.errstate(over="ignore"):
        z = (np.uint64(seed) * _PHI) \
            ^ (np.asarray(rep, dtype=np.uint64) * _C_REP) \
            ^ (np.uint64(step) * _C_STEP)
        z = _mix(_mix(z + _PHI))
    return (z >> np.uint64(11)).astype(np.float64) * (2.0 ** -53)


# ---------------------------------------------------------------------------
# chain model


@dataclass
class ChainModel:
    spec: DiffusionSpec
    window: tuple
    h: float
    x: np.ndarray          # node positions (KILL_INF nodes sit at +-inf)
    u: np.ndarray          # node scale values
    kind: np.ndarray       # int8 node kinds
    tau: np.ndarray        # mean holding time; 0 at terminal nodes
    p_right: np.ndarray
    nbr_left: np.ndarray
    nbr_right: np.ndarray
    det_target: np.ndarray
    node_mass: np.ndarray  # speed-measure mass attributed to each node
    piece_of: np.ndarray
    warnings: tuple = ()

    @property
    def n_nodes(self) -> int:
        return len(self.x)

    @property
    def min_tau(self) -> float:
        movable = self.kind <= DET
        vals = self.tau[movable]
        return float(vals.min()) if vals.size else math.inf

    def node_at(self, x0: float) -> int:
        """Nearest node to x0; refuses points far from every node."""
        if not self.n_nodes:
            raise DomainError("empty chain")
        if math.isinf(x0):
            cand = np.nonzero((self.kind == KILL_INF)
                              & (np.sign(self.x) == np.sign(x0)))[0]
            if cand.size:
                return int(cand[0])
            raise DomainError(f"no node at {x0}")
        finite = np.isfinite(self.x)
        d = np.where(finite, np.abs(self.x - x0), np.inf)
        i = int(np.argmin(d))
        span = self.window[1] - self.window[0]
        tol = max(self.h, 1e-9 * max(1.0, abs(x0)))
        if d[i] > max(2.0 * tol, 1e-6 * max(1.0, span if math.isfinite(span) else 1.0)):
            raise DomainError(
                f"start point {x0} is not covered by the chain (nearest node "
                f"{self.x[i]}); it may sit in trap material or outside the window")
        return i


def _invert_scale(piece, u_targets, x_lo, x_hi):
    """Positions with scale values u_targets, via vectorized bisection."""
    u_targets = np.asarray(u_targets, dtype=np.float64)
    lo = np.full(u_targets.shape, x_lo, dtype=np.float64)
    hi = np.full(u_targets.shape, x_hi, dtype=np.float64)
    # grow infinite brackets until the scale value is straddled
    if math.isinf(x_lo):
        probe = (x_hi if math.isfinite(x_hi) else 0.0) - 1.0
        for _ in range(200):
            if float(evaluate(piece.scale, probe)) <= u_targets.min():
                break
            probe -= max(1.0, abs(probe))
        else:
            raise ChainBuildError("cannot bracket scale inversion toward -inf")
        lo[:] = probe
    if math.isinf(x_hi):
        probe = (x_lo if math.isfinite(x_lo) else 0.0) + 1.0
        for _ in range(200):
            if float(evaluate(piece.scale, probe)) >= u_targets.max():
                break
            probe += max(1.0, abs(probe))
        else:
            raise ChainBuildError("cannot bracket scale inversion toward +inf")
        hi[:] = probe
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        vm = np.asarray(evaluate(piece.scale, mid), dtype=np.float64)
        below = vm < u_targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
        if float(np.max(hi - lo)) <= 1e-13 * max(1.0, float(np.max(np.abs(mid)))):
            break
    return 0.5 * (lo + hi)


class _Builder:
    def __init__(self, spec, window, h):
        self.spec = spec
        self.window = window
        self.h = h
        self.x = []
        self.u = []
        self.kind = []
        self.tau = []
        self.p_right = []
        self.left = []
        self.right = []
        self.det = []
        self.mass = []
        self.piece_of = []
        self.point_nodes = {}
        self.warnings = []

    def new_node(self, x, u, kind, piece_index):
        self.x.append(float(x))
        self.u.append(float(u))
        self.kind.append(kind)
        self.tau.append(0.0)
        self.p_right.append(0.5)
        self.left.append(-1)
        self.right.append(-1)
        self.det.append(-1)
        self.mass.append(0.0)
        self.piece_of.append(piece_index)
        return len(self.x) - 1

    def point_node(self, pos, kind, piece_index):
        if pos in self.point_nodes:
            return self.point_nodes[pos]
        i = self.new_node(pos, math.nan, kind, piece_index)
        self.point_nodes[pos] = i
        return i


def _atom_weight_at(piece, pos):
    return sum(w for p, w in piece.speed.atoms if p == pos)


def _regular_cells(piece, edges_x, edges_u, order):
    """Per-cell integrals A, B, M of the speed measure against the scale."""
    n = len(edges_x) - 1
    A = np.zeros(n)
    B = np.zeros(n)
    M = np.zeros(n)

    def rho_vec(y):
        return np.asarray(evaluate(piece.speed.density, y), dtype=np.float64)

    def s_vec(y):
        return np.asarray(evaluate(piece.scale, y), dtype=np.float64)

    fin_lo = 0 if math.isfinite(edges_x[0]) else 1
    fin_hi = n if math.isfinite(edges_x[-1]) else n - 1
    if fin_hi > fin_lo:
        fe = np.asarray(edges_x[fin_lo:fin_hi + 1])
        I1 = gauss_cells(lambda y: s_vec(y) * rho_vec(y), fe, order)
        Mm = gauss_cells(rho_vec, fe, order)
        ul = np.asarray(edges_u[fin_lo:fin_hi])
        uh = np.asarray(edges_u[fin_lo + 1:fin_hi + 1])
        A[fin_lo:fin_hi] = I1 - ul * Mm
        B[fin_lo:fin_hi] = uh * Mm - I1
        M[fin_lo:fin_hi] = Mm
    if fin_lo == 1:  # first cell stretches to -inf; only its A part is used
        u0 = edges_u[0]
        res = improper_integral(
            lambda y: (float(evaluate(piece.scale, y)) - u0)
            * float(evaluate(piece.speed.density, y)),
            edges_x[1], -math.inf)
        if res.verdict != FINITE:
            raise ChainBuildError(
                "holding integral toward -inf does not converge; "
                "provide a finite window")
        A[0] = res.value
        B[0] = math.inf
        M[0] = math.inf
    if fin_hi == n - 1:  # last cell stretches to +inf; only its B part is used
        u1 = edges_u[-1]
        res = improper_integral(
            lambda y: (u1 - float(evaluate(piece.scale, y)))
            * float(evaluate(piece.speed.density, y)),
            edges_x[-2], math.inf)
        if res.verdict != FINITE:
            raise ChainBuildError(
                "holding integral toward +inf does not converge; "
                "provide a finite window")
        B[-1] = res.value
        A[-1] = math.inf
        M[-1] = math.inf
    # atoms of the speed measure join their cell
    for pos, w in piece.speed.atoms:
        if pos < edges_x[0] or pos > edges_x[-1]:
            continue
        j = int(np.searchsorted(edges_x, pos, side="right")) - 1
        j = min(max(j, 0), n - 1)
        s_at = edges_u[j] if pos == edges_x[j] else (
            edges_u[j + 1] if pos == edges_x[j + 1] else float(evaluate(piece.scale, pos)))
        A[j] += w * (s_at - edges_u[j])
        B[j] += w * (edges_u[j + 1] - s_at)
        if math.isfinite(M[j]):
            M[j] += w
    return A, B, M


def _end_scale(piece, i, side, cut, end, ana):
    """Scale value at one end of the simulated range, or a build error."""
    word = "-inf" if side == "a" else "+inf"
    if math.isinf(end):
        if not math.isfinite(ana.scale_limit) or ana.approachable != YES:
            raise ChainBuildError(
                f"piece {i}: window reaches {word} but the end is not "
                f"approachable with bounded scale; provide a finite window")
        return ana.scale_limit
    if cut:
        return float(evaluate(piece.scale, end))
    if ana.role in (INCLUDED_SHUNT, GLUE_TO_NEIGHBOR, EXIT):
        return ana.scale_limit
    raise ChainBuildError(
        f"piece {i}: endpoint {end} is inside the window but cannot be "
        f"reached from inside (role {ana.role}); shrink the window to "
        f"exclude it")


def _build_regular(builder, i, piece, profile, order=16):
    (w_lo, w_hi), h = builder.window, builder.h
    lo = max(piece.a, w_lo)
    hi = min(piece.b, w_hi)
    if hi <= lo:
        return
    left_cut = w_lo >= piece.a
    right_cut = w_hi <= piece.b
    ana_a = profile[(i, "a")]
    ana_b = profile[(i, "b")]
    u_lo = _end_scale(piece, i, "a", left_cut, lo, ana_a)
    u_hi = _end_scale(piece, i, "b", right_cut, hi, ana_b)

    span = u_hi - u_lo
    if not (span > 0):
        raise ChainBuildError(f"piece {i}: empty scale span in the window")
    n_cells = max(int(round(span / h)), 1)
    if math.isinf(lo) or math.isinf(hi):
        n_cells = max(n_cells, 2)  # keep a finite quadrature anchor inside
    h_eff = span / n_cells
    u_nodes = u_lo + h_eff * np.arange(n_cells + 1)
    u_nodes[-1] = u_hi

    x_nodes = np.empty(n_cells + 1)
    x_nodes[0] = lo
    x_nodes[-1] = hi
    if n_cells > 1:
        x_nodes[1:-1] = _invert_scale(
            piece, u_nodes[1:-1],
            lo if math.isfinite(lo) else -math.inf,
            hi if math.isfinite(hi) else math.inf)

    # boundary nodes
    if left_cut and math.isfinite(lo):
        nid_lo = builder.new_node(lo, u_lo, KILL_WINDOW, i)
    elif math.isinf(lo):
        nid_lo = builder.new_node(lo, u_lo, KILL_INF, i)
    elif ana_a.role == EXIT:
        nid_lo = builder.point_node(lo, TRAP_NODE, i - 1)
    else:
        nid_lo = builder.point_node(lo, DET, i - 1)
    if right_cut and math.isfinite(hi):
        nid_hi = builder.new_node(hi, u_hi, KILL_WINDOW, i)
    elif math.isinf(hi):
        nid_hi = builder.new_node(hi, u_hi, KILL_INF, i)
    elif ana_b.role == EXIT:
        nid_hi = builder.point_node(hi, TRAP_NODE, i + 1)
    else:
        nid_hi = builder.point_node(hi, DET, i + 1)
    builder.u[nid_lo] = u_lo
    builder.u[nid_hi] = u_hi

    interior = [builder.new_node(x_nodes[k], u_nodes[k], WALK, i)
                for k in range(1, n_cells)]
    ids = [nid_lo] + interior + [nid_hi]
    for a, b in zip(ids, ids[1:]):
        builder.right[a] = b if builder.right[a] == -1 else builder.right[a]
        builder.left[b] = a if builder.left[b] == -1 else builder.left[b]

    A, B, M = _regular_cells(piece, list(x_nodes), list(u_nodes), order)
    A8, B8, _ = _regular_cells(piece, list(x_nodes), list(u_nodes),
                               max(order // 2, 2))
    with np.errstate(invalid="ignore"):
        ref = np.maximum(np.abs(A), np.abs(B))
        da = np.abs(A - A8)
        db = np.abs(B - B8)
        fin = np.isfinite(ref) & (ref > 0)
        rel = 0.0
        if fin.any():
            rel = float(np.max((np.maximum(da, db))[fin] / ref[fin]))
    if rel > 1e-6:
        builder.warnings.append(
            f"piece {i}: holding-time quadrature differs by {rel:.2e} between "
            f"orders {order} and {max(order // 2, 2)}; the speed density may "
            f"be rough at this h")

    if n_cells > 1:
        u = u_nodes
        dtot = u[2:] - u[:-2]
        tau_int = (A[:-1] * (u[2:] - u[1:-1]) + B[1:] * (u[1:-1] - u[:-2])) / dtot
        pr_int = (u[1:-1] - u[:-2]) / dtot
        for k, nid in enumerate(interior):
            builder.tau[nid] = float(tau_int[k])
            builder.p_right[nid] = float(pr_int[k])
            ml = M[k] if math.isfinite(M[k]) else 0.0
            mr = M[k + 1] if math.isfinite(M[k + 1]) else 0.0
            builder.mass[nid] = 0.5 * (ml + mr)

    # entry dynamics at included shunt endpoints (this piece is the open side)
    if not (left_cut or math.isinf(lo)) and ana_a.role == INCLUDED_SHUNT:
        builder.kind[nid_lo] = DET
        builder.det[nid_lo] = ids[1]
        builder.tau[nid_lo] = float(B[0])
        builder.mass[nid_lo] += _atom_weight_at(piece, lo)
    if not (right_cut or math.isinf(hi)) and ana_b.role == INCLUDED_SHUNT:
        builder.kind[nid_hi] = DET
        builder.det[nid_hi] = ids[-2]
        builder.tau[nid_hi] = float(A[-1])
        builder.mass[nid_hi] += _atom_weight_at(piece, hi)


def _build_segment(builder, i, piece):
    (w_lo, w_hi), h = builder.window, builder.h
    if piece.partial_barrier() is not None:
        raise ChainBuildError(
            f"piece {i}: partial-reach shunt segments are symbolic only and "
            f"cannot be simulated")
    lo = max(piece.a, w_lo)
    hi = min(piece.b, w_hi)
    if hi <= lo:
        return
    if math.isinf(lo) or math.isinf(hi):
        raise ChainBuildError(
            f"piece {i}: shunt segment extends to infinity inside the window; "
            f"provide a finite window")
    n_cells = max(int(round((hi - lo) / h)), 1)
    h_eff = (hi - lo) / n_cells
    xs = lo + h_eff * np.arange(n_cells + 1)
    xs[-1] = hi

    down_right = piece.direction == "right"
    up_cut = (w_lo >= piece.a) if down_right else (w_hi <= piece.b)
    down_cut = (w_hi <= piece.b) if down_right else (w_lo >= piece.a)
    up_end, down_end = (lo, hi) if down_right else (hi, lo)

    if down_cut:
        cap = builder.new_node(down_end, math.nan, KILL_WINDOW, i)
    else:
        # downstream piece endpoint: a singular point by the layout rules
        cap = builder.point_node(down_end, DET, i + 1 if down_right else i - 1)
    # body nodes walk downstream; the upstream edge node exists only when
    # the window cut it open (nothing ever arrives there, but paths may start)
    inner = list(xs[1:-1])
    up_positions = ([up_end] if up_cut else []) + (inner if down_right
                                                  else list(reversed(inner)))
    body = [builder.new_node(x, math.nan, DET, i) for x in up_positions]
    hop = body[1:] + [cap]
    for nid, target in zip(body, hop):
        builder.tau[nid] = h_eff
        builder.det[nid] = target

    # the upstream singular point, when present, feeds the first body node
    if not up_cut:
        pn = builder.point_nodes.get(up_end)
        if pn is not None and builder.kind[pn] == DET and builder.det[pn] == -1:
            first = body[0] if body else cap
            builder.det[pn] = first
            builder.tau[pn] = abs(builder.x[first] - up_end) if body else h_eff


def build_chain(spec: DiffusionSpec, window, h: float,
                gauss_order: int = 16) -> ChainModel:
    """Discretize the part of the line inside the window."""
    if not (h > 0):
        raise DomainError("h must be positive")
    w_lo, w_hi = float(window[0]), float(window[1])
    if not (w_lo < w_hi):
        raise DomainError("window must be an interval (lo, hi)")
    profile = boundary_profile(spec)
    builder = _Builder(spec, (w_lo, w_hi), h)

    # singular points strictly inside the window get shared nodes first
    for i, p in enumerate(spec.pieces):
        if p.is_point and w_lo < p.x < w_hi:
            builder.point_node(p.x, TRAP_NODE if p.point_class == TRAP else DET, i)

    for i, p in enumerate(spec.pieces):
        if p.kind == REGULAR:
            _build_regular(builder, i, p, profile, gauss_order)
        elif p.kind == SHUNT_SEGMENT:
            _build_segment(builder, i, p)
        # trap segments carry no dynamics and get no nodes

    kind = np.asarray(builder.kind, dtype=np.int8)
    tau = np.asarray(builder.tau, dtype=np.float64)
    det = np.asarray(builder.det, dtype=np.int64)
    bad_det = (kind == DET) & (det < 0)
    if bad_det.any():
        j = int(np.nonzero(bad_det)[0][0])
        raise ChainBuildError(
            f"shunt point at {builder.x[j]} pushes toward material outside "
            f"the window; widen the window on its open side")
    movable = kind <= DET
    if movable.any():
        bad_tau = movable & ~((tau > 0) & np.isfinite(tau))
        if bad_tau.any():
            j = int(np.nonzero(bad_tau)[0][0])
            raise ChainBuildError(
                f"degenerate holding time {tau[j]} at node x={builder.x[j]}; "
                f"the speed measure may vanish or blow up there")
    model = ChainModel(
        spec, (w_lo, w_hi), h,
        np.asarray(builder.x), np.asarray(builder.u), kind, tau,
        np.asarray(builder.p_right), np.asarray(builder.left, dtype=np.int64),
        np.asarray(builder.right, dtype=np.int64), det,
        np.asarray(builder.mass), np.asarray(builder.piece_of, dtype=np.int64),
        tuple(builder.warnings))
    return model


# ---------------------------------------------------------------------------
# the engine


def _finalize(status, t, active, sel, code, t_val=None):
    status[sel] = code
    if t_val is not None:
        t[sel] = t_val
    active[sel] = False


def _run_chunk(chain, starts, rep_lo, rep_hi, t_max, seed, mode,
               exponential, target_node):
    n = rep_hi - rep_lo
    rep_ids = np.arange(rep_lo, rep_hi, dtype=np.uint64)
    cur = starts.astype(np.int64).copy()
    t = np.zeros(n)
    status = np.zeros(n, dtype=np.int8)
    hit = np.zeros(n, dtype=bool)
    active = np.ones(n, dtype=bool)
    kind = chain.kind
    min_tau = chain.min_tau
    cap = 10_000_000 if exponential else int(t_max / min_tau) + 2 \
        if math.isfinite(min_tau) else 1
    k_iter = 0
    while True:
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        ci = cur[idx]
        kd = kind[ci]
        if target_node >= 0:
            on = ci == target_node
            if on.any():
                sel = idx[on]
                hit[sel] = True
                _finalize(status, t, active, sel, ALIVE)
                idx, ci, kd = idx[~on], ci[~on], kd[~on]
        for code, st, freeze in ((TRAP_NODE, ABSORBED_TRAP, mode == MODE_FULL),
                                 (KILL_WINDOW, KILLED_WINDOW, False),
                                 (KILL_INF, DEAD_INF, False)):
            m = kd == code
            if m.any():
                sel = idx[m]
                _finalize(status, t, active, sel, st, t_max if freeze else None)
                idx, ci, kd = idx[~m], ci[~m], kd[~m]
        if idx.size == 0:
            continue
        tau = chain.tau[ci]
        if exponential:
            walk_m = kd == WALK
            if walk_m.any():
                uh = _uniform(seed, rep_ids[idx[walk_m]], 2 * k_iter + 1)
                tau = tau.copy()
                tau[walk_m] = tau[walk_m] * (-np.log1p(-uh))
        t_new = t[idx] + tau
        done = t_new >= t_max
        if done.any():
            _finalize(status, t, active, idx[done], ALIVE, t_max)
        go = ~done
        gi = idx[go]
        if gi.size:
            cg = ci[go]
            t[gi] = t_new[go]
            kd_g = kind[cg]
            nxt = np.empty(gi.size, dtype=np.int64)
            wm = kd_g == WALK
            if wm.any():
                u = _uniform(seed, rep_ids[gi[wm]], 2 * k_iter)
                right = u < chain.p_right[cg[wm]]
                nxt[wm] = np.where(right, chain.nbr_right[cg[wm]],
                                   chain.nbr_left[cg[wm]])
            dm = ~wm
            nxt[dm] = chain.det_target[cg[dm]]
            cur[gi] = nxt
        k_iter += 1
        if k_iter > cap:
            _finalize(status, t, active, np.nonzero(active)[0], ALIVE, t_max)
            break
    return cur, t, status, hit


def run(chain: ChainModel, x0=None, t_max: float = 1.0, n_rep: int = 1000,
        seed: int = 0, n_jobs: int = 1, mode: str = MODE_FULL,
        exponential_holding: bool = False, target=None, starts=None) -> dict:
    """Run replications; returns arrays final_node, final_time, status, hit.

    Results are identical for any n_jobs because replication r always
    consumes the counter stream (seed, r, .) and chunk boundaries are
    fixed.
    """
    if mode not in _MODES:
        raise DomainError(f"mode must be one of {_MODES}")
    if starts is None:
        if x0 is None:
            raise DomainError("provide x0 or starts")
        starts = np.full(n_rep, chain.node_at(float(x0)), dtype=np.int64)
    else:
        starts = np.asarray(starts, dtype=np.int64)
        n_rep = len(starts)
    target_node = chain.node_at(float(target)) if target is not None else -1
    bounds = [(lo, min(lo + _CHUNK, n_rep)) for lo in range(0, n_rep, _CHUNK)]

    def work(b):
        lo, hi = b
        return _run_chunk(chain, starts[lo:hi], lo, hi, t_max, seed, mode,
                          exponential_holding, target_node)

    if n_jobs > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            parts = list(pool.map(work, bounds))
    else:
        parts = [work(b) for b in bounds]
    final_node = np.concatenate([p[0] for p in parts])
    final_time = np.concatenate([p[1] for p in parts])
    status = np.concatenate([p[2] for p in parts])
    hit = np.concatenate([p[3] for p in parts])
    return {"final_node": final_node, "final_time": final_time,
            "status": status, "hit": hit}


@dataclass
class PathResult:
    times: np.ndarray
    positions: np.ndarray
    status: str

    def as_rows(self):
        for t, x in zip(self.times, self.positions):
            yield t, x


def simulate_path(chain: ChainModel, x0: float, t_max: float, seed: int = 0,
                  rep: int = 0, mode: str = MODE_FULL,
                  exponential_holding: bool = False) -> PathResult:
    """One replication with its trajectory, matching the vector engine."""
    if mode not in _MODES:
        raise DomainError(f"mode must be one of {_MODES}")
    cur = chain.node_at(float(x0))
    t = 0.0
    times = [0.0]
    xs = [float(chain.x[cur])]
    status = ALIVE
    k = 0
    cap = 10_000_000
    while True:
        kd = int(chain.kind[cur])
        if kd == TRAP_NODE:
            status = ABSORBED_TRAP
            if mode == MODE_FULL:
                times.append(t_max)
                xs.append(float(chain.x[cur]))
            break
        if kd == KILL_WINDOW:
            status = KILLED_WINDOW
            break
        if kd == KILL_INF:
            status = DEAD_INF
            break
        tau = float(chain.tau[cur])
        if exponential_holding and kd == WALK:
            uh = float(_uniform(seed, np.uint64(rep), 2 * k + 1))
            tau = tau * (-math.log1p(-uh))
        if t + tau >= t_max:
            status = ALIVE
            times.append(t_max)
            xs.append(float(chain.x[cur]))
            break
        t += tau
        if kd == WALK:
            u = float(_uniform(seed, np.uint64(rep), 2 * k))
            go_right = u < chain.p_right[cur]
            cur = int(chain.nbr_right[cur] if go_right else chain.nbr_left[cur])
        else:
            cur = int(chain.det_target[cur])
        times.append(t)
        xs.append(float(chain.x[cur]))
        k += 1
        if k > cap:
            break
    return PathResult(np.asarray(times), np.asarray(xs), STATUS_NAMES[status])


# ---------------------------------------------------------------------------
# estimators


def _wilson(hits: int, n: int, z: float = 1.959963984540054):
    if n == 0:
        return 0.0, 0.0, 1.0
    p = hits / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    return p, max(center - half, 0.0), min(center + half, 1.0)


def estimate_hitting(chain: ChainModel, x0: float, target: float,
                     t_max: float, n_rep: int, seed: int = 0,
                     n_jobs: int = 1, mode: str = MODE_KILLED,
                     exponential_holding: bool = False) -> dict:
    """Probability of visiting the target position before the horizon."""
    res = run(chain, x0=x0, t_max=t_max, n_rep=n_rep, seed=seed,
              n_jobs=n_jobs, mode=mode,
              exponential_holding=exponential_holding, target=target)
    hits = int(res["hit"].sum())
    p, lo, hi = _wilson(hits, n_rep)
    counts = {name: int((res["status"] == code).sum())
              for code, name in STATUS_NAMES.items()}
    return {"estimate": p, "ci_low": lo, "ci_high": hi, "hits": hits,
            "n_rep": n_rep, "x0": x0, "target": target, "t_max": t_max,
            "seed": seed, "status_counts": counts}


def analytic_hitting(spec: DiffusionSpec, x0: float, a: float, c: float) -> float:
    """Scale-linear probability of hitting c before a from x0 in (a, c)."""
    if not (a < x0 < c):
        raise DomainError("need a < x0 < c")
    i, piece = spec.piece_at(x0)
    if piece.kind != REGULAR:
        raise DomainError("analytic hitting needs a regular piece")
    sa = float(evaluate(piece.scale, a))
    sc = float(evaluate(piece.scale, c))
    s0 = float(evaluate(piece.scale, x0))
    return (s0 - sa) / (sc - sa)


def _lebesgue_node_weights(chain: ChainModel) -> np.ndarray:
    w = np.zeros(chain.n_nodes)
    for i in range(chain.n_nodes):
        if chain.kind[i] != WALK:
            continue
        l, r = chain.nbr_left[i], chain.nbr_right[i]
        if l < 0 or r < 0:
            continue
        xl, xr = chain.x[l], chain.x[r]
        if math.isfinite(xl) and math.isfinite(xr):
            w[i] = 0.5 * (xr - xl)
    return w


def estimate_symmetry_defect(chain: ChainModel, f, g, t_max: float,
                             n_rep: int, seed: int = 0, n_jobs: int = 1,
                             mode: str = MODE_FULL, weights=None) -> dict:
    """Monte Carlo defect  integral of f(x) E_x g(X_t) - g(x) E_x f(X_t)
    against the node weights.

    Zero for every f, g exactly when the weighting measure symmetrizes
    the process.  Start nodes are drawn proportionally to the weights;
    each replication contributes  W (f(X_0) g(X_t) - f(X_t) g(X_0))
    with W the total weight, evaluated on a single common path.
    Functions count as zero after killing.
    """
    if weights is None:
        w = chain.node_mass.copy()
    elif isinstance(weights, str) and weights == "lebesgue":
        w = _lebesgue_node_weights(chain)
    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != (chain.n_nodes,):
            raise DomainError("weights must give one value per node")
    total = float(w.sum())
    if not (total > 0) or not math.isfinite(total):
        raise DomainError("node weights must have positive finite total")
    cum = np.cumsum(w)
    u0 = _uniform(seed, np.arange(n_rep, dtype=np.uint64), _STEP_START)
    starts = np.searchsorted(cum, u0 * total, side="right")
    starts = np.minimum(starts, chain.n_nodes - 1).astype(np.int64)
    res = run(chain, starts=starts, t_max=t_max, seed=seed, n_jobs=n_jobs,
              mode=mode)
    x0 = chain.x[starts]
    xT = chain.x[res["final_node"]]
    if mode == MODE_KILLED:
        live = res["status"] == ALIVE
    else:
        live = (res["status"] == ALIVE) | (res["status"] == ABSORBED_TRAP)
    f0 = np.asarray([f(float(v)) for v in x0], dtype=np.float64)
    g0 = np.asarray([g(float(v)) for v in x0], dtype=np.float64)
    fT = np.zeros(n_rep)
    gT = np.zeros(n_rep)
    for j in np.nonzero(live)[0]:
        v = float(xT[j])
        fT[j] = f(v)
        gT[j] = g(v)
    d = total * (f0 * gT - fT * g0)
    mean = float(np.mean(d))
    sd = float(np.std(d, ddof=1)) if n_rep > 1 else 0.0
    half = 1.959963984540054 * sd / math.sqrt(n_rep) if n_rep else 0.0
    return {"mean": mean, "sd": sd, "ci_low": mean - half,
            "ci_high": mean + half, "n_rep": n_rep, "total_weight": total,
            "t_max": t_max, "seed": seed, "mode": mode}
