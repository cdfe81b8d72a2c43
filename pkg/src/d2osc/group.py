"""The symmetry group of the 4-cell network and its actions.

The group is the Klein four-group generated by two commuting involutions

    kappa = (1 2)(3 4),    zeta = (1 3)(2 4)

acting on cell coordinates, optionally extended by a circle factor that
shifts every torus angle by the same amount.  Everything here is small and
exact: elements are enum tags, composition is a 2-bit XOR, and angle
comparisons are modular with a fixed tolerance.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import TableMismatch

TWO_PI = 2.0 * math.pi

# Modular tolerance for angle comparisons.  All tabulated data are exact
# multiples of pi, so this only has to dominate accumulated rounding.
ANGLE_TOL = 1e-9


def wrap_angle(theta: float) -> float:
    """Reduce an angle to the canonical interval [0, 2*pi)."""
    out = math.fmod(theta, TWO_PI)
    if out < 0.0:
        out += TWO_PI
    # fmod can return exactly TWO_PI after the correction for tiny negatives
    if out >= TWO_PI:
        out -= TWO_PI
    return out


def angle_distance(x: float, y: float) -> float:
    """Shortest distance between two angles on the circle."""
    d = math.fmod(x - y, TWO_PI)
    if d < 0.0:
        d += TWO_PI
    return min(d, TWO_PI - d)


def angles_close(x: float, y: float, tol: float = ANGLE_TOL) -> bool:
    return angle_distance(x, y) <= tol


class Perm(enum.Enum):
    """The four cell permutations.

    Values are chosen so that composition is bitwise XOR: the permutation
    sends cell index i (0-based) to i ^ value.
    """

    ID = 0
    KAPPA = 1
    ZETA = 2
    KAPPA_ZETA = 3

    def __mul__(self, other: "Perm") -> "Perm":
        return Perm(self.value ^ other.value)

    @property
    def inverse(self) -> "Perm":
        # every element is an involution
        return self

    def index_map(self) -> tuple[int, int, int, int]:
        """Where each output slot reads from: result[i] = x[map[i]]."""
        c = self.value
        return (0 ^ c, 1 ^ c, 2 ^ c, 3 ^ c)


def apply_perm(g: Perm, x: Sequence[float]) -> np.ndarray:
    """Permute the 4 cell coordinates: kappa gives (x2, x1, x4, x3), etc."""
    arr = np.asarray(x, dtype=float)
    if arr.shape != (4,):
        raise ValueError(f"expected a 4-vector, got shape {arr.shape}")
    return arr[list(g.index_map())]


def perm_matrix(g: Perm) -> np.ndarray:
    """4x4 permutation matrix P with P @ x == apply_perm(g, x)."""
    mat = np.zeros((4, 4))
    for i, j in enumerate(g.index_map()):
        mat[i, j] = 1.0
    return mat


@dataclass(frozen=True)
class GroupElement:
    """An element of the product of the permutation group with the circle:
    a cell permutation followed by a uniform phase shift."""

    perm: Perm = Perm.ID
    phase: float = 0.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "phase", wrap_angle(self.phase))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.perm * other.perm, self.phase + other.phase)

    @property
    def inverse(self) -> "GroupElement":
        return GroupElement(self.perm, -self.phase)


@dataclass(frozen=True, eq=False)
class TorusPoint:
    """A point of the 4-torus; all four angles stored in [0, 2*pi)."""

    angles: tuple[float, float, float, float]

    def __post_init__(self) -> None:
        if len(self.angles) != 4:
            raise ValueError("TorusPoint needs exactly 4 angles")
        object.__setattr__(self, "angles", tuple(wrap_angle(a) for a in self.angles))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TorusPoint):
            return NotImplemented
        return all(angles_close(a, b) for a, b in zip(self.angles, other.angles))

    def __repr__(self) -> str:
        inner = ", ".join(f"{a:.6g}" for a in self.angles)
        return f"TorusPoint(({inner}))"

    def as_array(self) -> np.ndarray:
        return np.array(self.angles)


def apply_torus(g: GroupElement, p: TorusPoint) -> TorusPoint:
    """Permute the four angles, then shift all of them by g.phase."""
    permuted = apply_perm(g.perm, p.angles)
    return TorusPoint(tuple(a + g.phase for a in permuted))


# --- Cayley graph ---------------------------------------------------------

#: vertex numbering of the four cells: cell i hosts this group element
CELL_ELEMENTS = (Perm.ID, Perm.KAPPA, Perm.ZETA, Perm.KAPPA_ZETA)

GENERATORS = (Perm.KAPPA, Perm.ZETA)


def cayley_edges() -> list[tuple[int, int, Perm]]:
    """Directed colored edges (from, to, color) over vertices 1..4.

    Vertex i carries group element CELL_ELEMENTS[i-1]; an edge i -> j of
    color c exists when element(i) == c * element(j).  Both generators are
    involutions, so each undirected link appears in both directions and the
    total count is 8.
    """
    index_of = {g: k + 1 for k, g in enumerate(CELL_ELEMENTS)}
    edges = []
    for color in GENERATORS:
        for j, gj in enumerate(CELL_ELEMENTS, start=1):
            i = index_of[color * gj]
            edges.append((i, j, color))
    return edges


# --- planar action --------------------------------------------------------


@dataclass(frozen=True)
class PlanarAction:
    """Action on the plane: kappa conjugates (x, y) -> (x, -y), zeta scales
    by zeta_sign.  The default -1 is the representation with four distinct
    orbit classes; +1 makes zeta act trivially."""

    zeta_sign: int = -1

    def __post_init__(self) -> None:
        if self.zeta_sign not in (-1, 1):
            raise ValueError("zeta_sign must be +1 or -1")

    def apply(self, g: Perm, pt: Sequence[float]) -> tuple[float, float]:
        x, y = float(pt[0]), float(pt[1])
        if g in (Perm.KAPPA, Perm.KAPPA_ZETA):
            y = -y
        if g in (Perm.ZETA, Perm.KAPPA_ZETA):
            x, y = self.zeta_sign * x, self.zeta_sign * y
        return (x + 0.0, y + 0.0)  # normalize -0.0


def orbit_planar(act: PlanarAction, pt: Sequence[float]) -> set[tuple[float, float]]:
    """The group orbit of a planar point, deduplicated."""
    return {act.apply(g, pt) for g in Perm}


def isotropy_planar(act: PlanarAction, pt: Sequence[float],
                    tol: float = ANGLE_TOL) -> set[Perm]:
    """The stabilizer subgroup of a planar point."""
    x, y = float(pt[0]), float(pt[1])
    stab = set()
    for g in Perm:
        gx, gy = act.apply(g, pt)
        if abs(gx - x) <= tol and abs(gy - y) <= tol:
            stab.add(g)
    return stab


# --- the two-dimensional fixed subspace inside the 4-torus ----------------

E1 = np.array([-1.0, 1.0, -1.0, -1.0]) / 2.0
E2 = np.array([-1.0, -1.0, 1.0, -1.0]) / 2.0


def embed_fix_z2(phi1: float, phi2: float) -> TorusPoint:
    """Map plane coordinates into the torus along the basis e1, e2."""
    vec = phi1 * E1 + phi2 * E2
    return TorusPoint(tuple(vec))


# --- isotropy table verification ------------------------------------------


@dataclass(frozen=True)
class FixedSetRow:
    """One row of the torus isotropy table.

    ``parameterize`` maps the row's parameters (0, 1 or 2 angles in
    [0, pi]) to a torus point; ``member`` tests whether an arbitrary torus
    point lies on the full fixed set.  ``generators`` are the stabilizing
    elements as actually computed from the action; the original labels are
    carried verbatim as opaque strings.  For the 2-parameter rows the
    generator preserves the set but permutes its parameters, so the check
    is setwise rather than pointwise.
    """

    label: str
    dim: int
    parameterize: Callable[..., TorusPoint]
    member: Callable[[TorusPoint], bool]
    generators: tuple[GroupElement, ...]
    pointwise: bool


def _close(a: float, b: float) -> bool:
    return angles_close(a, b)


def _row(label, dim, parameterize, member, gens, pointwise) -> FixedSetRow:
    return FixedSetRow(label, dim, parameterize, member,
                       tuple(GroupElement(p, th) for p, th in gens), pointwise)


PI = math.pi

ISOTROPY_TABLE: tuple[FixedSetRow, ...] = (
    _row("D2(0)", 0,
         lambda: TorusPoint((0, 0, 0, 0)),
         lambda p: all(_close(a, 0) for a in p.angles),
         [(Perm.KAPPA, 0.0), (Perm.ZETA, 0.0)], True),
    _row("D2(kappa,Id)", 0,
         lambda: TorusPoint((0, 0, PI, PI)),
         lambda p: (_close(p.angles[0], 0) and _close(p.angles[1], 0)
                    and _close(p.angles[2], PI) and _close(p.angles[3], PI)),
         [(Perm.KAPPA, 0.0), (Perm.ZETA, PI)], True),
    _row("D2(kappa*zeta,kappa)", 0,
         lambda: TorusPoint((0, PI, 0, PI)),
         lambda p: (_close(p.angles[0], 0) and _close(p.angles[1], PI)
                    and _close(p.angles[2], 0) and _close(p.angles[3], PI)),
         [(Perm.ZETA, 0.0), (Perm.KAPPA, PI)], True),
    _row("D2(pi)", 0,
         lambda: TorusPoint((PI, 0, 0, PI)),
         lambda p: (_close(p.angles[0], PI) and _close(p.angles[1], 0)
                    and _close(p.angles[2], 0) and _close(p.angles[3], PI)),
         [(Perm.KAPPA, PI), (Perm.ZETA, PI)], True),
    _row("Z2^phi(kappa_(0,0))", 1,
         lambda phi: TorusPoint((0, 0, phi, phi)),
         lambda p: (_close(p.angles[0], 0) and _close(p.angles[1], 0)
                    and _close(p.angles[2], p.angles[3])),
         [(Perm.KAPPA, 0.0)], True),
    _row("Z2^phi(kappa_(pi,pi))", 1,
         lambda phi: TorusPoint((PI, PI, phi, phi)),
         lambda p: (_close(p.angles[0], PI) and _close(p.angles[1], PI)
                    and _close(p.angles[2], p.angles[3])),
         [(Perm.KAPPA, 0.0)], True),
    _row("Z2^phi(zeta_(pi,pi))", 1,
         lambda phi: TorusPoint((phi, phi, PI, PI)),
         lambda p: (_close(p.angles[0], p.angles[1])
                    and _close(p.angles[2], PI) and _close(p.angles[3], PI)),
         [(Perm.KAPPA, 0.0)], True),
    _row("Z2^phi(zeta_(0,0))", 1,
         lambda phi: TorusPoint((phi, phi, 0, 0)),
         lambda p: (_close(p.angles[0], p.angles[1])
                    and _close(p.angles[2], 0) and _close(p.angles[3], 0)),
         [(Perm.KAPPA, 0.0)], True),
    _row("Z2^phi_i(kappa_(0,0))", 2,
         lambda phi1, phi2: TorusPoint((0, 0, phi1, phi2)),
         lambda p: _close(p.angles[0], 0) and _close(p.angles[1], 0),
         [(Perm.KAPPA, 0.0)], False),
    _row("Z2^phi_i(kappa_(pi,pi))", 2,
         lambda phi1, phi2: TorusPoint((PI, PI, phi1, phi2)),
         lambda p: _close(p.angles[0], PI) and _close(p.angles[1], PI),
         [(Perm.KAPPA, 0.0)], False),
    _row("Z2^phi_i(zeta_(pi,pi))", 2,
         lambda phi1, phi2: TorusPoint((phi1, phi2, PI, PI)),
         lambda p: _close(p.angles[2], PI) and _close(p.angles[3], PI),
         [(Perm.KAPPA, 0.0)], False),
    _row("Z2^phi_i(zeta_(0,0))", 2,
         lambda phi1, phi2: TorusPoint((phi1, phi2, 0, 0)),
         lambda p: _close(p.angles[2], 0) and _close(p.angles[3], 0),
         [(Perm.KAPPA, 0.0)], False),
)

#: phase shifts that occur in the table
TABLE_PHASES = (0.0, PI)


@dataclass
class RowReport:
    label: str
    dim: int
    passed: bool
    discovered_stabilizer: tuple[GroupElement, ...]
    message: str = ""


@dataclass
class TableReport:
    rows: list[RowReport] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def n_pass(self) -> int:
        return sum(r.passed for r in self.rows)

    def summary(self) -> str:
        return f"{self.n_pass}/{len(self.rows)} rows pass"


def _sample_row(row: FixedSetRow, grid: int) -> list[TorusPoint]:
    params = np.linspace(0.0, PI, grid)
    if row.dim == 0:
        return [row.parameterize()]
    if row.dim == 1:
        return [row.parameterize(p) for p in params]
    return [row.parameterize(p1, p2) for p1, p2 in itertools.product(params, params)]


def check_table_row(row: FixedSetRow, grid: int = 9,
                    raise_on_fail: bool = False) -> RowReport:
    """Check one table row against the group action.

    Verifies that (i) every listed generator fixes the sampled set
    (pointwise for the 0- and 1-dimensional rows, setwise for the
    2-dimensional ones) and (ii) the number of parameters equals the listed
    dimension; also reports the full pointwise stabilizer discovered by
    searching every (permutation, phase) pair with phase in {0, pi}.
    """
    samples = _sample_row(row, grid)
    message = ""
    ok = True

    n_params = row.parameterize.__code__.co_argcount
    if n_params != row.dim:
        ok = False
        message = f"parameter count {n_params} != listed dim {row.dim}"

    for g in row.generators:
        for pt in samples:
            image = apply_torus(g, pt)
            if row.pointwise:
                good = image == pt
            else:
                good = row.member(image)
            if not good:
                ok = False
                message = (f"generator ({g.perm.name}, theta={g.phase:.3f}) moves "
                           f"{pt} to {image}")
                if raise_on_fail:
                    raise TableMismatch(f"{row.label}: {message}")
                break

    discovered = tuple(
        GroupElement(p, th)
        for p in Perm for th in TABLE_PHASES
        if all(apply_torus(GroupElement(p, th), pt) == pt for pt in samples)
    )
    if raise_on_fail and not ok:
        raise TableMismatch(f"{row.label}: {message}")
    return RowReport(row.label, row.dim, ok, discovered, message)


def verify_isotropy_table(grid: int = 9, raise_on_fail: bool = False) -> TableReport:
    """Check all 12 rows of the torus isotropy table."""
    report = TableReport()
    for row in ISOTROPY_TABLE:
        report.rows.append(check_table_row(row, grid=grid, raise_on_fail=raise_on_fail))
    return report
