"""The 4-cell coupled ODE built from the Cayley graph.

Cell i couples to its kappa-partner through g and to its zeta-partner
through h:

    x1' = f(x1) + g(x2, x1) + h(x3, x1)
    x2' = f(x2) + g(x1, x2) + h(x4, x2)
    x3' = f(x3) + g(x4, x3) + h(x1, x3)
    x4' = f(x4) + g(x3, x4) + h(x2, x4)

Any f, g, h wired this way commute with the whole permutation group; the
residual check below is the numerical witness.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NonFiniteValue, NotDiagonalized, NotEquilibrium
from .group import Perm, apply_perm

#: partner index per cell (0-based) for each coupling color
KAPPA_PARTNER = (1, 0, 3, 2)
ZETA_PARTNER = (2, 3, 0, 1)


@dataclass(frozen=True)
class CouplingFns:
    """Cell dynamics f and the two pairwise couplings g, h.

    g and h take (partner_state, own_state).  All three must be finite on
    the sampled domain and reentrant if networks are evaluated concurrently.
    """

    f: Callable[[float], float]
    g: Callable[[float, float], float]
    h: Callable[[float, float], float]


@dataclass(frozen=True)
class CellNetwork:
    fns: CouplingFns


def vector_field(net: CellNetwork, x: Sequence[float]) -> np.ndarray:
    """Evaluate the coupled field at a 4-vector of cell states."""
    arr = np.asarray(x, dtype=float)
    if arr.shape != (4,):
        raise ValueError(f"expected a 4-vector, got shape {arr.shape}")
    f, g, h = net.fns.f, net.fns.g, net.fns.h
    out = np.array([
        f(arr[i]) + g(arr[KAPPA_PARTNER[i]], arr[i]) + h(arr[ZETA_PARTNER[i]], arr[i])
        for i in range(4)
    ], dtype=float)
    if not np.all(np.isfinite(out)):
        raise NonFiniteValue(f"vector field non-finite at x={arr}")
    return out


def equivariance_residual(field: Callable[[np.ndarray], np.ndarray],
                          samples: int, seed: int,
                          box: float = 2.0) -> float:
    """Max over sampled points and nontrivial group elements of
    ||F(g x) - g F(x)||_inf.

    Works on any callable field, so broken fields constructed outside the
    builder can be tested too.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    pts = rng.uniform(-box, box, size=(samples, 4))
    worst = 0.0
    nontrivial = (Perm.KAPPA, Perm.ZETA, Perm.KAPPA_ZETA)
    for x in pts:
        fx = np.asarray(field(x), dtype=float)
        if not np.all(np.isfinite(fx)):
            raise NonFiniteValue(f"field non-finite at x={x}")
        for gperm in nontrivial:
            lhs = np.asarray(field(apply_perm(gperm, x)), dtype=float)
            rhs = apply_perm(gperm, fx)
            worst = max(worst, float(np.max(np.abs(lhs - rhs))))
    return worst


@dataclass(frozen=True)
class EquivarianceReport:
    max_residual: float
    #: the two couplings agree on all samples; the coupling colors then
    #: degenerate and the field gains extra permutation symmetry
    g_equals_h: bool


def check_equivariance(net: CellNetwork, samples: int = 100,
                       seed: int = 0, box: float = 2.0) -> EquivarianceReport:
    """Numerically witness the symmetry of a builder-produced network."""
    residual = equivariance_residual(lambda x: vector_field(net, x),
                                     samples, seed, box)
    rng = np.random.default_rng(seed + 1)
    uv = rng.uniform(-box, box, size=(32, 2))
    same = all(abs(net.fns.g(u, v) - net.fns.h(u, v)) <= 1e-12 for u, v in uv)
    return EquivarianceReport(residual, same)


def jacobian_fd(net: CellNetwork, x: Sequence[float],
                step: float | None = None) -> np.ndarray:
    """Central-difference Jacobian of the network field at x."""
    arr = np.asarray(x, dtype=float)
    if step is None:
        step = 1e-6 * max(1.0, float(np.max(np.abs(arr))))
    if step <= 0:
        raise ValueError("step must be positive")
    jac = np.empty((4, 4))
    for j in range(4):
        up, dn = arr.copy(), arr.copy()
        up[j] += step
        dn[j] -= step
        jac[:, j] = (vector_field(net, up) - vector_field(net, dn)) / (2 * step)
    if not np.all(np.isfinite(jac)):
        raise NonFiniteValue("finite-difference Jacobian non-finite")
    return jac


#: character basis: vector v, eigen-sign of v under kappa and under zeta
CHARACTER_BASIS = (
    (np.array([1.0, 1.0, 1.0, 1.0]) / 2.0, (+1, +1)),
    (np.array([1.0, 1.0, -1.0, -1.0]) / 2.0, (+1, -1)),
    (np.array([1.0, -1.0, 1.0, -1.0]) / 2.0, (-1, +1)),
    (np.array([1.0, -1.0, -1.0, 1.0]) / 2.0, (-1, -1)),
)

EQUILIBRIUM_TOL = 1e-8
OFFDIAG_TOL = 1e-6


def isotypic_spectrum(net: CellNetwork, equilibrium: Sequence[float]
                      ) -> list[tuple[tuple[int, int], float]]:
    """Eigenvalues of the linearization, one per one-dimensional character.

    Conjugates the finite-difference Jacobian at a diagonal equilibrium by
    the orthonormal character basis and returns the four (character,
    eigenvalue) pairs; characters are (sign under kappa, sign under zeta).
    The conjugated matrix must come out diagonal, so every eigenvalue is
    real: with one-dimensional cells there is no paired eigenspace at the
    trivial equilibrium.
    """
    eq = np.asarray(equilibrium, dtype=float)
    if np.max(np.abs(eq - eq[0])) > EQUILIBRIUM_TOL:
        raise ValueError(f"equilibrium must be diagonal, got {eq}")
    res = float(np.max(np.abs(vector_field(net, eq))))
    if res > EQUILIBRIUM_TOL:
        raise NotEquilibrium(f"||F|| = {res:.3e} at {eq}")
    jac = jacobian_fd(net, eq)
    basis = np.column_stack([v for v, _ in CHARACTER_BASIS])
    conj = basis.T @ jac @ basis
    off = conj - np.diag(np.diag(conj))
    off_mass = float(np.max(np.abs(off)))
    if off_mass > OFFDIAG_TOL:
        raise NotDiagonalized(
            f"off-diagonal mass {off_mass:.3e} in the character basis")
    return [(CHARACTER_BASIS[i][1], float(conj[i, i])) for i in range(4)]


# --- named example couplings -------------------------------------------------


def make_difference(gamma: float = 0.3, delta: float = 0.2) -> CouplingFns:
    """Cubic cell with linear difference coupling."""
    return CouplingFns(
        f=lambda x: x - x ** 3,
        g=lambda u, v: gamma * (u - v),
        h=lambda u, v: delta * (u - v),
    )


def make_sine_difference(gamma: float = 0.3, delta: float = 0.2) -> CouplingFns:
    """Sine cell with sine difference coupling."""
    import math

    return CouplingFns(
        f=lambda x: math.sin(x),
        g=lambda u, v: gamma * math.sin(u - v),
        h=lambda u, v: delta * math.sin(u - v),
    )


COUPLING_CATALOG = {
    "difference": make_difference,
    "sine-difference": make_sine_difference,
}


def catalog_network(name: str, gamma: float = 0.3, delta: float = 0.2
                    ) -> CellNetwork:
    """Build one of the named example networks."""
    try:
        factory = COUPLING_CATALOG[name]
    except KeyError:
        raise ValueError(
            f"unknown coupling {name!r}; choices: {sorted(COUPLING_CATALOG)}")
    return CellNetwork(factory(gamma, delta))
