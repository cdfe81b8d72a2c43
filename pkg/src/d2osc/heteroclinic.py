"""Heteroclinic cycle detection and stability classification.

Inside the saddle region the four corner equilibria of the phase family
are saddles whose unstable manifolds run along the invariant lines, and
shooting from each saddle lands on the next one: the loop in (phi1, phi2)
coordinates is always

    (0,0) -> (pi,0) -> (pi,pi) -> (0,pi) -> (0,0).

Stability is classified three independent ways and cross-checked:

* the closed-form index rho = rho1 rho2 rho3 rho4 built from the corner
  contraction/expansion ratios, with the threshold rho > 1;
* the explicit parameter-region inequalities in (eps, eps + 2q);
* the generic four-outcome classifier on (c_j, e_j, t_j) rate data.

The restriction to the plane carries no transverse directions, so the rate
data here has t absent and rho_j = c_j / e_j exactly.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .errors import (BrokenLoop, DegenerateDenominator, InvalidRates,
                     NoConnection, NoLap, NotASaddleRegion)
from .integrator import (IntegratorOptions, Method, Termination, integrate,
                         integrate_until_near)
from .phase_model import (EQUILIBRIUM_POINTS, ModelParams, PhaseField,
                          PlanarPhase, equilibria, saddle_conditions)

PI = math.pi

BOUNDARY_TOL = 1e-9
DELTA = 1e-3
CAPTURE_RADIUS = 1e-3


class StabilityVerdict(enum.Enum):
    ASYMPTOTICALLY_STABLE = "asymptotically_stable"
    ESSENTIALLY_ASYMPTOTICALLY_STABLE = "essentially_asymptotically_stable"
    ALMOST_COMPLETELY_UNSTABLE = "almost_completely_unstable"
    COMPLETELY_UNSTABLE = "completely_unstable"
    INDETERMINATE = "indeterminate"


@dataclass(frozen=True)
class SaddleData:
    """Rates at one saddle of a cycle: contraction c > 0, expansion e > 0,
    optional tangential rate t (absent in the planar restriction)."""

    location: PlanarPhase
    c: float
    e: float
    t: Optional[float] = None

    def __post_init__(self) -> None:
        if self.c <= 0 or self.e <= 0:
            raise InvalidRates(f"need c, e > 0, got c={self.c}, e={self.e}")


@dataclass(frozen=True)
class CycleEdge:
    """One detected connection, following an invariant line."""

    source: PlanarPhase
    target: PlanarPhase
    line: str           # e.g. "phi2=0"
    subspace: str       # isotropy label of the line
    transit_time: float


@dataclass
class CycleReport:
    saddles: list[SaddleData]
    edges: list[CycleEdge]
    rho_factors: tuple[float, float, float, float]
    rho: float
    verdict_rho: StabilityVerdict
    verdict_theorem: StabilityVerdict
    verdict_km: StabilityVerdict
    agreement: bool
    notes: tuple[str, ...] = field(default_factory=tuple)

    def loop_points(self) -> list[tuple[float, float]]:
        """The loop as plain coordinate tuples, starting at the first edge."""
        pts = [(e.source.phi1, e.source.phi2) for e in self.edges]
        pts.append((self.edges[-1].target.phi1, self.edges[-1].target.phi2))
        return pts

    def to_dict(self) -> dict:
        return {
            "saddles": [
                {"phi1": s.location.phi1, "phi2": s.location.phi2,
                 "c": s.c, "e": s.e, "t": s.t}
                for s in self.saddles
            ],
            "edges": [
                {"from": [e.source.phi1, e.source.phi2],
                 "to": [e.target.phi1, e.target.phi2],
                 "line": e.line, "subspace": e.subspace,
                 "transit_time": e.transit_time}
                for e in self.edges
            ],
            "rho_factors": list(self.rho_factors),
            "rho": self.rho,
            "verdict_rho": self.verdict_rho.value,
            "verdict_theorem": self.verdict_theorem.value,
            "verdict_km": self.verdict_km.value,
            "agreement": self.agreement,
            "notes": list(self.notes),
        }


# --- closed-form index -------------------------------------------------------


def _require_saddles(params: ModelParams) -> None:
    rep = saddle_conditions(params)
    if not rep.ok:
        raise NotASaddleRegion(
            f"|eps| margin {rep.eps_margin:.3g}, "
            f"|eps+2q| margin {rep.shear_margin:.3g}")


def rho_factors(params: ModelParams) -> tuple[float, float, float, float]:
    """Per-saddle contraction/expansion ratios, in corner order
    (0,0), (0,pi), (pi,0), (pi,pi)."""
    _require_saddles(params)
    a, b, e = params.a, params.b, params.eps
    w = e + 2 * params.q
    pairs = (
        (b - 2 * w, a + 2 * e),
        (a - 2 * e, b + 2 * w),
        (a - 2 * e, b + 2 * e),
        (b - 2 * e, a + 2 * e),
    )
    for num, den in pairs:
        if abs(den) <= 1e-12:
            raise DegenerateDenominator(f"denominator {den!r}")
    return tuple(num / den for num, den in pairs)


def rho(params: ModelParams) -> float:
    """The closed-form stability index."""
    _require_saddles(params)
    a, b, e = params.a, params.b, params.eps
    w = e + 2 * params.q
    den = (b + 2 * w) * (a + 2 * e) ** 2 * (b + 2 * e)
    if abs(den) <= 1e-12:
        raise DegenerateDenominator(f"denominator {den!r}")
    return (b - 2 * w) * (a - 2 * e) ** 2 * (b - 2 * e) / den


def classify_rho(value: float, boundary_tol: float = BOUNDARY_TOL
                 ) -> StabilityVerdict:
    """The bare threshold rule: rho > 1 stable, rho < 1 completely unstable."""
    if abs(value - 1.0) <= boundary_tol:
        return StabilityVerdict.INDETERMINATE
    if value > 1.0:
        return StabilityVerdict.ASYMPTOTICALLY_STABLE
    return StabilityVerdict.COMPLETELY_UNSTABLE


def classify_theorem(params: ModelParams,
                     boundary_tol: float = BOUNDARY_TOL) -> StabilityVerdict:
    """Region classification by the explicit inequalities in eps and
    eps + 2q.

    Pure-sign quadrants decide immediately: eps < 0 and eps + 2q < 0 is
    asymptotically stable, both positive is completely unstable.  In the
    mixed-sign quadrants the comparison

        (b - 2(eps+2q)) / (b + 2(eps+2q))  vs
        (a + 2 eps)^2 (b + 2 eps) / ((a - 2 eps)^2 (b - 2 eps))

    decides; the left side over the right side is exactly rho, and stable
    means left > right in both mixed quadrants.  Within boundary_tol of any
    sign change or of equality the verdict is indeterminate.
    """
    _require_saddles(params)
    e = params.eps
    w = e + 2 * params.q
    rep = saddle_conditions(params)
    if (abs(e) <= boundary_tol or abs(w) <= boundary_tol
            or rep.eps_margin <= boundary_tol
            or rep.shear_margin <= boundary_tol):
        return StabilityVerdict.INDETERMINATE
    if e < 0 and w < 0:
        return StabilityVerdict.ASYMPTOTICALLY_STABLE
    if e > 0 and w > 0:
        return StabilityVerdict.COMPLETELY_UNSTABLE
    a, b = params.a, params.b
    lhs = (b - 2 * w) / (b + 2 * w)
    rhs = (a + 2 * e) ** 2 * (b + 2 * e) / ((a - 2 * e) ** 2 * (b - 2 * e))
    if abs(lhs - rhs) <= boundary_tol:
        return StabilityVerdict.INDETERMINATE
    if lhs > rhs:
        return StabilityVerdict.ASYMPTOTICALLY_STABLE
    return StabilityVerdict.COMPLETELY_UNSTABLE


def classify_km(saddle_data: Sequence[SaddleData],
                boundary_tol: float = BOUNDARY_TOL) -> StabilityVerdict:
    """The generic four-outcome classifier on per-saddle rate data.

    rho_j = min(c_j/e_j, 1 - t_j/e_j) with the min-rule only when t is
    present.  Outcomes: (a) asymptotically stable when rho > 1 and every
    present t < 0; (b) essentially asymptotically stable when rho > 1 with
    some t in (0, e); almost completely unstable when some t_j > e_j;
    completely unstable when rho < 1.  Within boundary_tol of rho = 1, or
    of t = 0 or t = e for any saddle, the verdict is indeterminate.
    """
    if not saddle_data:
        raise InvalidRates("no saddle data")
    factors = []
    for s in saddle_data:
        r = s.c / s.e
        if s.t is not None:
            if (abs(s.t) <= boundary_tol
                    or abs(s.t - s.e) <= boundary_tol):
                return StabilityVerdict.INDETERMINATE
            r = min(r, 1.0 - s.t / s.e)
        factors.append(r)
    value = float(np.prod(factors))
    if abs(value - 1.0) <= boundary_tol:
        return StabilityVerdict.INDETERMINATE
    with_t = [s for s in saddle_data if s.t is not None]
    if value > 1.0:
        if all(s.t < 0 for s in with_t):
            return StabilityVerdict.ASYMPTOTICALLY_STABLE
        if all(s.t < s.e for s in with_t):
            return StabilityVerdict.ESSENTIALLY_ASYMPTOTICALLY_STABLE
        return StabilityVerdict.ALMOST_COMPLETELY_UNSTABLE
    if any(s.t is not None and s.t > s.e for s in saddle_data):
        return StabilityVerdict.ALMOST_COMPLETELY_UNSTABLE
    return StabilityVerdict.COMPLETELY_UNSTABLE


def _verdict_axis(v: StabilityVerdict) -> str:
    if v is StabilityVerdict.ASYMPTOTICALLY_STABLE:
        return "stable"
    if v is StabilityVerdict.COMPLETELY_UNSTABLE:
        return "unstable"
    return v.value


# --- numerical detection -----------------------------------------------------

#: invariant-line label for an edge given the coordinate that stays put
_LINE_SUBSPACE = {
    ("phi2", 0.0): ("phi2=0", "Z2^phi1(kappa_(0,0))"),
    ("phi1", PI): ("phi1=pi", "Z2^phi(zeta_(pi,pi))"),
    ("phi2", PI): ("phi2=pi", "Z2^phi(kappa_(pi,pi))"),
    ("phi1", 0.0): ("phi1=0", "Z2^phi(zeta_(0,0))"),
}


def _edge_line(src: PlanarPhase, dst: PlanarPhase) -> tuple[str, str]:
    for (coord, val), out in _LINE_SUBSPACE.items():
        s = src.phi1 if coord == "phi1" else src.phi2
        d = dst.phi1 if coord == "phi1" else dst.phi2
        if abs(s - val) < 1e-9 and abs(d - val) < 1e-9:
            return out
    return ("?", "?")


def default_shooting_options() -> IntegratorOptions:
    return IntegratorOptions(method=Method.RK45_ADAPTIVE, dt=1e-3,
                             rel_tol=1e-9, abs_tol=1e-11, t_max=1e4,
                             max_dt=1.0)


def detect_cycle(params: ModelParams,
                 opts: Optional[IntegratorOptions] = None,
                 delta: float = DELTA,
                 radius: float = CAPTURE_RADIUS) -> CycleReport:
    """Shoot along each saddle's unstable line and assemble the cycle.

    From each corner the start point sits delta along the unstable
    eigendirection, displaced into the square [0, pi]^2; the flow decides
    the connection target.  The four recorded edges must close into a
    single loop through all four corners.
    """
    _require_saddles(params)
    if opts is None:
        opts = default_shooting_options()
    field = PhaseField(params)
    eqs = equilibria(params)
    corners = [e.location.as_array() for e in eqs]

    edges = {}
    transit = {}
    for i, eq in enumerate(eqs):
        lams = (eq.lambda1, eq.lambda2)
        axis = int(np.argmax(lams))       # unstable coordinate
        if not (max(lams) > 0 > min(lams)):
            raise NotASaddleRegion(f"{eq.isotropy_label} is not a saddle")
        start = corners[i].copy()
        # displace into [0, pi] along the unstable axis
        start[axis] += delta if start[axis] < PI / 2 else -delta
        targets = [corners[j] for j in range(4) if j != i]
        target_ids = [j for j in range(4) if j != i]
        traj = integrate_until_near(field, start, targets, radius, opts)
        if traj.termination is not Termination.EVENT_HIT:
            raise NoConnection(
                f"from {eq.isotropy_label}: {traj.termination.name} "
                f"after t={traj.end_time:.3g}")
        j = target_ids[traj.event_index]
        edges[i] = j
        transit[i] = traj.end_time

    # must be one 4-cycle visiting every corner
    order = [0]
    seen = {0}
    k = 0
    for _ in range(3):
        k = edges[k]
        if k in seen:
            raise BrokenLoop(f"edge map {edges} revisits corner {k}")
        seen.add(k)
        order.append(k)
    if edges[order[-1]] != 0:
        raise BrokenLoop(f"edge map {edges} does not close")

    cycle_edges = []
    for i in order:
        src = eqs[i].location
        dst = eqs[edges[i]].location
        line, subspace = _edge_line(src, dst)
        cycle_edges.append(CycleEdge(src, dst, line, subspace, transit[i]))

    saddles = [
        SaddleData(eq.location, c=-min(eq.lambda1, eq.lambda2),
                   e=max(eq.lambda1, eq.lambda2))
        for eq in eqs
    ]
    factors = rho_factors(params)
    value = rho(params)
    v_rho = classify_rho(value)
    v_thm = classify_theorem(params)
    v_km = classify_km(saddles)
    agreement = (_verdict_axis(v_rho) == _verdict_axis(v_thm)
                 == _verdict_axis(v_km))

    notes = (
        "cycle direction determined numerically: "
        + " -> ".join(eqs[i].isotropy_label for i in order + [0]),
    )
    return CycleReport(saddles, cycle_edges, factors, value,
                       v_rho, v_thm, v_km, agreement, notes)


# --- empirical attraction witness -------------------------------------------

_CENTER = np.array([PI / 2, PI / 2])
#: corner directions, in circulation order of the flow
_CORNER_DIRS = np.array([
    [1.0, -1.0],   # toward (pi, 0)
    [1.0, 1.0],    # toward (pi, pi)
    [-1.0, 1.0],   # toward (0, pi)
    [-1.0, -1.0],  # toward (0, 0)
])


def boundary_distance(states: np.ndarray) -> np.ndarray:
    """Distance of interior points to the boundary of the square [0, pi]^2."""
    p1 = states[..., 0]
    p2 = states[..., 1]
    return np.minimum(np.minimum(p1, PI - p1), np.minimum(p2, PI - p2))


def _section_events(states: np.ndarray, offset: int) -> list[tuple[int, int]]:
    """Crossings (record index, section id) of the four corner diagonals.

    Section k is the half-line from the square's center toward corner k;
    a crossing is a sign change of the cross product with the corner
    direction while on the corner side of the center.
    """
    rel = states - _CENTER
    events = []
    for k, d in enumerate(_CORNER_DIRS):
        s = d[0] * rel[:, 1] - d[1] * rel[:, 0]
        along = rel @ d
        sign_change = np.sign(s[:-1]) * np.sign(s[1:]) < 0
        near = (along[:-1] > 0) | (along[1:] > 0)
        for idx in np.nonzero(sign_change & near)[0]:
            events.append((offset + int(idx) + 1, k))
    events.sort()
    return events


def lap_monitor(params: ModelParams, start, laps: int,
                opts: Optional[IntegratorOptions] = None) -> np.ndarray:
    """Per-lap maxima of the distance to the boundary of [0, pi]^2.

    Integrates from an interior start, detects laps as successive transits
    of the four corner half-sections, and records the maximum boundary
    distance over each completed lap.  A decreasing sequence witnesses
    attraction of the boundary cycle, an increasing one repulsion.
    """
    if laps < 1:
        raise ValueError("laps must be >= 1")
    start = np.asarray(start, dtype=float)
    d0 = float(boundary_distance(start))
    if not (0 < start[0] < PI and 0 < start[1] < PI) or d0 < 1e-6:
        raise ValueError(
            f"start must lie strictly inside (0, pi)^2, margin >= 1e-6; "
            f"got {start} (margin {d0:.2g})")
    if opts is None:
        opts = IntegratorOptions(max_dt=0.25)

    field = PhaseField(params)
    chunk = 64.0
    t_used = 0.0
    state = start
    all_states = [start[None, :]]
    events: list[tuple[int, int]] = []
    n_recorded = 1

    def lap_boundaries() -> list[int]:
        if len(events) < 5:
            return []
        anchor = events[0][1]
        return [idx for idx, k in events if k == anchor]

    while t_used < opts.t_max:
        t_chunk = min(chunk, opts.t_max - t_used)
        if t_chunk <= 1e-9:
            break
        sub = IntegratorOptions(method=opts.method, dt=opts.dt,
                                rel_tol=opts.rel_tol, abs_tol=opts.abs_tol,
                                t_max=t_chunk, max_dt=opts.max_dt,
                                record_stride=1,
                                use_compiled=opts.use_compiled)
        traj = integrate(field, state, sub)
        new_states = traj.states[1:]
        pair = np.concatenate([all_states[-1][-1:], new_states])
        events.extend(_section_events(pair, offset=n_recorded - 1))
        all_states.append(new_states)
        n_recorded += len(new_states)
        state = traj.end_state
        t_used += traj.end_time
        bounds = lap_boundaries()
        if len(bounds) >= laps + 1:
            break

    bounds = lap_boundaries()
    if len(bounds) < laps + 1:
        raise NoLap(f"completed {max(len(bounds) - 1, 0)} laps "
                    f"in t={t_used:.3g}, wanted {laps}")
    states = np.concatenate(all_states)
    dist = boundary_distance(states)
    out = np.empty(laps)
    for i in range(laps):
        out[i] = float(np.max(dist[bounds[i]:bounds[i + 1] + 1]))
    return out
