"""The explicit two-parameter family of phase equations on the 2-torus.

The system in the (phi1, phi2) coordinates of the two-dimensional fixed
subspace is

    phi1' = a sin(phi1) cos(phi2) + eps sin(2 phi1) cos(2 phi2)
    phi2' = -b sin(phi2) cos(phi1) + eps sin(2 phi2) cos(2 phi1)
            + q (1 + cos(phi1)) sin(2 phi2)

with a, b > 0.  Both right-hand sides factor through sin(phi_i), so the
lines phi_i = 0 (mod pi) are invariant and the four corners of the square
[0, pi]^2 are equilibria.  Everything needed downstream is closed form:
the Jacobian, the corner eigenvalues

    (0,0):  a + 2 eps,   -b + 2 (eps + 2 q)
    (0,pi): -a + 2 eps,   b + 2 (eps + 2 q)
    (pi,0): -a + 2 eps,   b + 2 eps
    (pi,pi): a + 2 eps,  -b + 2 eps

and the edge eigenvalues along the four invariant lines.  The off-diagonal
Jacobian entries both carry a sin(phi1)*sin(phi2) factor (checked by
expanding d(phi1')/d(phi2) = -a sin phi1 sin phi2 - 2 eps sin 2phi1 sin 2phi2
and d(phi2')/d(phi1) = b sin phi1 sin phi2 - 2 eps sin 2phi1 sin 2phi2
- q sin phi1 sin 2phi2), so the Jacobian is diagonal on every invariant
line; the finite-difference cross-checks live in the test suite.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .group import wrap_angle

PI = math.pi


@dataclass(frozen=True)
class ModelParams:
    """Parameters (a, b, eps, q) of the phase family; a, b must be positive."""

    a: float
    b: float
    eps: float = 0.0
    q: float = 0.0

    def __post_init__(self) -> None:
        if not (self.a > 0 and self.b > 0):
            raise ValueError(f"need a > 0 and b > 0, got a={self.a}, b={self.b}")

    @property
    def saddle_ok(self) -> bool:
        """True inside the region where all four corners are saddles."""
        return (abs(self.eps) < min(self.a, self.b) / 2.0
                and abs(self.eps + 2.0 * self.q) < self.b / 2.0)


@dataclass(frozen=True)
class PlanarPhase:
    """A point of the 2-torus; both angles stored in [0, 2*pi)."""

    phi1: float
    phi2: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "phi1", wrap_angle(self.phi1))
        object.__setattr__(self, "phi2", wrap_angle(self.phi2))

    def as_array(self) -> np.ndarray:
        return np.array([self.phi1, self.phi2])


def _as_angles(p) -> np.ndarray:
    """Accept PlanarPhase, tuples or arrays of shape (..., 2)."""
    if isinstance(p, PlanarPhase):
        return p.as_array()
    arr = np.asarray(p, dtype=float)
    if arr.shape[-1] != 2:
        raise ValueError(f"expected angle pairs, got shape {arr.shape}")
    return arr


def rhs(params: ModelParams, p) -> np.ndarray:
    """Right-hand side in the expanded (double-angle) form.

    Broadcasts over leading axes: input shape (..., 2) gives output of the
    same shape.
    """
    ang = _as_angles(p)
    p1, p2 = ang[..., 0], ang[..., 1]
    a, b, e, q = params.a, params.b, params.eps, params.q
    d1 = a * np.sin(p1) * np.cos(p2) + e * np.sin(2 * p1) * np.cos(2 * p2)
    d2 = (-b * np.sin(p2) * np.cos(p1) + e * np.sin(2 * p2) * np.cos(2 * p1)
          + q * (1 + np.cos(p1)) * np.sin(2 * p2))
    return np.stack([d1, d2], axis=-1)


def rhs_factored(params: ModelParams, p) -> np.ndarray:
    """Right-hand side via the factored form sin(phi_i) * (cofactor).

    Algebraically identical to :func:`rhs`; kept separate as an internal
    consistency oracle.
    """
    ang = _as_angles(p)
    p1, p2 = ang[..., 0], ang[..., 1]
    a, b, e, q = params.a, params.b, params.eps, params.q
    d1 = np.sin(p1) * (a * np.cos(p2) + 2 * e * np.cos(p1) * np.cos(2 * p2))
    d2 = np.sin(p2) * (-b * np.cos(p1) + 2 * e * np.cos(p2) * np.cos(2 * p1)
                       + 2 * q * (1 + np.cos(p1)) * np.cos(p2))
    return np.stack([d1, d2], axis=-1)


def jacobian(params: ModelParams, p) -> np.ndarray:
    """Closed-form Jacobian; shape (..., 2, 2)."""
    ang = _as_angles(p)
    p1, p2 = ang[..., 0], ang[..., 1]
    a, b, e, q = params.a, params.b, params.eps, params.q
    j11 = a * np.cos(p1) * np.cos(p2) + 2 * e * np.cos(2 * p1) * np.cos(2 * p2)
    j12 = -a * np.sin(p1) * np.sin(p2) - 2 * e * np.sin(2 * p1) * np.sin(2 * p2)
    j21 = (b * np.sin(p1) * np.sin(p2) - 2 * e * np.sin(2 * p1) * np.sin(2 * p2)
           - q * np.sin(p1) * np.sin(2 * p2))
    j22 = (-b * np.cos(p1) * np.cos(p2) + 2 * e * np.cos(2 * p1) * np.cos(2 * p2)
           + 2 * q * (1 + np.cos(p1)) * np.cos(2 * p2))
    row1 = np.stack([j11, j12], axis=-1)
    row2 = np.stack([j21, j22], axis=-1)
    return np.stack([row1, row2], axis=-2)


class PhaseField:
    """The phase system as a plain callable state -> derivative.

    Instances mark the field for the compiled integration kernel; the
    __call__ path is what the pure-Python integrator uses.
    """

    def __init__(self, params: ModelParams):
        self.params = params

    def __call__(self, y: np.ndarray) -> np.ndarray:
        a, b, e, q = (self.params.a, self.params.b,
                      self.params.eps, self.params.q)
        p1, p2 = float(y[0]), float(y[1])
        d1 = (a * math.sin(p1) * math.cos(p2)
              + e * math.sin(2 * p1) * math.cos(2 * p2))
        d2 = (-b * math.sin(p2) * math.cos(p1)
              + e * math.sin(2 * p2) * math.cos(2 * p1)
              + q * (1 + math.cos(p1)) * math.sin(2 * p2))
        return np.array([d1, d2])


# --- equilibria ------------------------------------------------------------


@dataclass(frozen=True)
class EquilibriumReport:
    """A corner equilibrium with its two axis eigenvalues.

    lambda1 is the eigenvalue along the phi1 axis, lambda2 along phi2; the
    Jacobian is diagonal at all four corners.
    """

    location: PlanarPhase
    lambda1: float
    lambda2: float
    isotropy_label: str


#: corner order used everywhere: (0,0), (0,pi), (pi,0), (pi,pi)
EQUILIBRIUM_LABELS = ("D2(0)", "D2(kappa,Id)", "D2(kappa*zeta,kappa)", "D2(pi)")
EQUILIBRIUM_POINTS = ((0.0, 0.0), (0.0, PI), (PI, 0.0), (PI, PI))


def equilibria(params: ModelParams) -> list[EquilibriumReport]:
    """The four corner equilibria with their closed-form eigenvalues."""
    a, b, e, q = params.a, params.b, params.eps, params.q
    w = e + 2 * q
    lams = (
        (a + 2 * e, -b + 2 * w),
        (-a + 2 * e, b + 2 * w),
        (-a + 2 * e, b + 2 * e),
        (a + 2 * e, -b + 2 * e),
    )
    return [
        EquilibriumReport(PlanarPhase(*pt), l1, l2, label)
        for pt, (l1, l2), label in zip(EQUILIBRIUM_POINTS, lams, EQUILIBRIUM_LABELS)
    ]


@dataclass(frozen=True)
class SaddleReport:
    """Result of the saddle-condition check with signed margins.

    Both margins are positive exactly when the condition holds strictly.
    """

    ok: bool
    eps_margin: float
    shear_margin: float

    def __bool__(self) -> bool:
        return self.ok


def saddle_conditions(params: ModelParams) -> SaddleReport:
    """Check |eps| < min(a/2, b/2) and |eps + 2q| < b/2, with margins."""
    eps_margin = min(params.a, params.b) / 2.0 - abs(params.eps)
    shear_margin = params.b / 2.0 - abs(params.eps + 2.0 * params.q)
    return SaddleReport(eps_margin > 0 and shear_margin > 0,
                        eps_margin, shear_margin)


# --- invariant curves -------------------------------------------------------


class InvariantCurve(enum.Enum):
    SIN1 = 1
    SIN2 = 2


def invariant_curve_residual(params: ModelParams, curve: InvariantCurve, p) -> float:
    """Residual |Xh - K h| for h = sin(phi1) or sin(phi2).

    X is the derivative of h along the flow and K the cofactor read off the
    factored form: K1 = cos(phi1) (a cos(phi2) + 2 eps cos(phi1) cos(2 phi2)),
    K2 = cos(phi2) (-b cos(phi1) + 2 eps cos(phi2) cos(2 phi1)
                    + 2 q (1 + cos(phi1)) cos(phi2)).
    A vanishing residual witnesses that {h = 0} is flow-invariant.
    """
    ang = _as_angles(p)
    p1, p2 = float(ang[0]), float(ang[1])
    a, b, e, q = params.a, params.b, params.eps, params.q
    d = rhs(params, ang)
    if curve is InvariantCurve.SIN1:
        h = math.sin(p1)
        xh = math.cos(p1) * d[0]  # dh/dphi1 * phi1', dh/dphi2 = 0
        k = math.cos(p1) * (a * math.cos(p2)
                            + 2 * e * math.cos(p1) * math.cos(2 * p2))
    elif curve is InvariantCurve.SIN2:
        h = math.sin(p2)
        xh = math.cos(p2) * d[1]
        k = math.cos(p2) * (-b * math.cos(p1)
                            + 2 * e * math.cos(p2) * math.cos(2 * p1)
                            + 2 * q * (1 + math.cos(p1)) * math.cos(p2))
    else:
        raise ValueError(f"unknown curve {curve!r}")
    return abs(xh - k * h)


# --- invariant edges --------------------------------------------------------


class Edge(enum.Enum):
    """The four non-conjugate invariant lines, by their fixed coordinate."""

    PHI1_AXIS = "(phi1, 0)"
    PI_PHI2 = "(pi, phi2)"
    PHI1_PI = "(phi1, pi)"
    ZERO_PHI2 = "(0, phi2)"


#: isotropy label of each edge, and whether phi1 (1) or phi2 (2) moves
EDGE_INFO = {
    Edge.PHI1_AXIS: ("Z2^phi1(kappa_(0,0))", 1),
    Edge.PI_PHI2: ("Z2^phi(zeta_(pi,pi))", 2),
    Edge.PHI1_PI: ("Z2^phi(kappa_(pi,pi))", 1),
    Edge.ZERO_PHI2: ("Z2^phi(zeta_(0,0))", 2),
}


@dataclass(frozen=True)
class EdgeEigenvalues:
    """Eigenvalues of the flow at a point of an invariant line.

    lambda1 / lambda2 are the phi1- / phi2-axis eigenvalues (the Jacobian
    is diagonal on every edge).  ``tangential_axis`` says which coordinate
    parameterizes the edge; the other eigenvalue is transverse.
    """

    lambda1: float
    lambda2: float
    tangential_axis: int

    @property
    def tangential(self) -> float:
        return self.lambda1 if self.tangential_axis == 1 else self.lambda2

    @property
    def transverse(self) -> float:
        return self.lambda2 if self.tangential_axis == 1 else self.lambda1


def edge_point(edge: Edge, phi: float) -> PlanarPhase:
    if edge is Edge.PHI1_AXIS:
        return PlanarPhase(phi, 0.0)
    if edge is Edge.PI_PHI2:
        return PlanarPhase(PI, phi)
    if edge is Edge.PHI1_PI:
        return PlanarPhase(phi, PI)
    return PlanarPhase(0.0, phi)


def edge_eigenvalues(params: ModelParams, edge: Edge, phi: float) -> EdgeEigenvalues:
    """Closed-form axis eigenvalues along one invariant line."""
    a, b, e, q = params.a, params.b, params.eps, params.q
    c, c2 = math.cos(phi), math.cos(2 * phi)
    if edge is Edge.PHI1_AXIS:
        l1 = a * c + 2 * e * c2
        l2 = -b * c + 2 * q * (1 + c) + 2 * e * c2
    elif edge is Edge.PI_PHI2:
        l1 = -a * c + 2 * e * c2
        l2 = b * c + 2 * e * c2
    elif edge is Edge.PHI1_PI:
        l1 = -a * c + 2 * e * c2
        l2 = b * c + 2 * q * (1 + c) + 2 * e * c2
    elif edge is Edge.ZERO_PHI2:
        l1 = a * c + 2 * e * c2
        l2 = -b * c + 2 * e * c2 + 4 * q * c2
    else:
        raise ValueError(f"unknown edge {edge!r}")
    return EdgeEigenvalues(l1, l2, EDGE_INFO[edge][1])


# --- parameter sampling -----------------------------------------------------


def random_saddle_params(rng: np.random.Generator,
                         a_range: tuple[float, float] = (0.5, 2.0),
                         b_range: tuple[float, float] = (0.5, 2.0),
                         fill: float = 0.98) -> ModelParams:
    """Draw parameters uniformly from the saddle region.

    ``fill`` < 1 keeps draws strictly away from the region boundary.
    """
    a = rng.uniform(*a_range)
    b = rng.uniform(*b_range)
    m = min(a, b) / 2.0
    eps = rng.uniform(-m, m) * fill
    w = rng.uniform(-b / 2.0, b / 2.0) * fill  # target value of eps + 2q
    return ModelParams(a, b, eps, (w - eps) / 2.0)
