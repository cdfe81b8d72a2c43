"""The planar equivariant bifurcation normal form and its classification.

The bifurcation map has the shape

    g(x, y, lam) = (p(x^2, y^2, lam) * x,  q(x^2, y^2, lam) * y)

for caller-supplied smooth p, q with p(0,0,0) = q(0,0,0) = 0.  Its Jacobian
in (x, y) is

    [[p + 2 u p_u,  2 p_v x y],
     [2 q_u x y,    q + 2 v q_v]]       (u = x^2, v = y^2)

Solutions of g = 0 split into trivial / x-mode / y-mode / mixed-mode, and
stability at a solution is read from this matrix.  Eigenvalues are always
computed from the matrix via the trace/determinant closed form; at a
mixed-mode point det = 4 u v (p_u q_v - p_v q_u) and tr = 2 (u p_u + v q_v),
which are the sign identities the tests pin down.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence

import numpy as np

from .errors import DegenerateEigenvalue, NonFiniteValue, NotASolution

ORIGIN_TOL = 1e-12
DEFAULT_CLASSIFY_TOL = 1e-8
DEGENERATE_TOL = 1e-9

ScalarFn = Callable[[float, float, float], float]


@dataclass(frozen=True)
class NormalForm:
    """The pair p, q with optional analytic partials in (u, v).

    Missing partials fall back to central differences with step
    1e-6 * max(1, |u|, |v|).
    """

    p: ScalarFn
    q: ScalarFn
    p_u: Optional[ScalarFn] = None
    p_v: Optional[ScalarFn] = None
    q_u: Optional[ScalarFn] = None
    q_v: Optional[ScalarFn] = None

    def __post_init__(self) -> None:
        p0 = self.p(0.0, 0.0, 0.0)
        q0 = self.q(0.0, 0.0, 0.0)
        if abs(p0) > ORIGIN_TOL or abs(q0) > ORIGIN_TOL:
            raise ValueError(
                f"normal form must vanish at the origin: p={p0:.3e}, q={q0:.3e}")

    def partials(self, u: float, v: float, lam: float
                 ) -> tuple[float, float, float, float]:
        """(p_u, p_v, q_u, q_v) at (u, v, lam), analytic or FD."""
        step = 1e-6 * max(1.0, abs(u), abs(v))

        def fd_u(fn):
            return (fn(u + step, v, lam) - fn(u - step, v, lam)) / (2 * step)

        def fd_v(fn):
            return (fn(u, v + step, lam) - fn(u, v - step, lam)) / (2 * step)

        pu = self.p_u(u, v, lam) if self.p_u else fd_u(self.p)
        pv = self.p_v(u, v, lam) if self.p_v else fd_v(self.p)
        qu = self.q_u(u, v, lam) if self.q_u else fd_u(self.q)
        qv = self.q_v(u, v, lam) if self.q_v else fd_v(self.q)
        return pu, pv, qu, qv


class SolutionClass(enum.Enum):
    TRIVIAL = "trivial"
    X_MODE = "x-mode"
    Y_MODE = "y-mode"
    MIXED_MODE = "mixed-mode"


def eval_g(nf: NormalForm, x: float, y: float, lam: float) -> np.ndarray:
    """Evaluate the bifurcation map."""
    u, v = x * x, y * y
    out = np.array([nf.p(u, v, lam) * x, nf.q(u, v, lam) * y])
    if not np.all(np.isfinite(out)):
        raise NonFiniteValue(f"g non-finite at ({x}, {y}, {lam})")
    return out


def jacobian_dg(nf: NormalForm, x: float, y: float, lam: float) -> np.ndarray:
    """The 2x2 Jacobian of g in (x, y)."""
    u, v = x * x, y * y
    pu, pv, qu, qv = nf.partials(u, v, lam)
    p = nf.p(u, v, lam)
    q = nf.q(u, v, lam)
    jac = np.array([
        [p + 2 * u * pu, 2 * pv * x * y],
        [2 * qu * x * y, q + 2 * v * qv],
    ])
    if not np.all(np.isfinite(jac)):
        raise NonFiniteValue(f"dg non-finite at ({x}, {y}, {lam})")
    return jac


def classify_solution(nf: NormalForm, x: float, y: float, lam: float,
                      tol: float = DEFAULT_CLASSIFY_TOL) -> SolutionClass:
    """Classify a zero of g into the four solution types."""
    res = float(np.max(np.abs(eval_g(nf, x, y, lam))))
    if res > tol:
        raise NotASolution(f"||g|| = {res:.3e} > tol at ({x}, {y}, {lam})")
    small_x, small_y = abs(x) <= tol, abs(y) <= tol
    if small_x and small_y:
        return SolutionClass.TRIVIAL
    if small_y:
        return SolutionClass.X_MODE
    if small_x:
        return SolutionClass.Y_MODE
    return SolutionClass.MIXED_MODE


def _sign(x: float) -> int:
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class StabilityReport:
    """Signs and eigenvalues of dg at a solution.

    For trivial / pure-mode solutions ``diag_signs`` carries the two signs
    of the diagonal matrix.  For mixed modes, det/trace signs plus the two
    eigenvalues and a verdict: stable iff both real parts are negative.
    ``trace_sign_alt`` is the sign of u p_u + v q_u, the alternative trace
    reading (reported in verbose mode only; the trace of the matrix itself,
    2 (u p_u + v q_v), is what the verdict uses).
    """

    solution_class: SolutionClass
    eigenvalues: tuple[complex, complex]
    stable: bool
    diag_signs: Optional[tuple[int, int]] = None
    det_sign: Optional[int] = None
    trace_sign: Optional[int] = None
    trace_sign_alt: Optional[int] = None


def stability_signs(nf: NormalForm, x: float, y: float, lam: float,
                    tol: float = DEFAULT_CLASSIFY_TOL,
                    verbose: bool = False) -> StabilityReport:
    """Sign data and stability verdict at a solution of g = 0."""
    cls = classify_solution(nf, x, y, lam, tol)
    jac = jacobian_dg(nf, x, y, lam)
    tr = float(jac[0, 0] + jac[1, 1])
    det = float(jac[0, 0] * jac[1, 1] - jac[0, 1] * jac[1, 0])
    disc = tr * tr - 4 * det
    if disc >= 0:
        root = math.sqrt(disc)
        eigs = ((tr + root) / 2 + 0j, (tr - root) / 2 + 0j)
    else:
        root = math.sqrt(-disc)
        eigs = (complex(tr / 2, root / 2), complex(tr / 2, -root / 2))
    if any(abs(e.real) <= DEGENERATE_TOL for e in eigs):
        raise DegenerateEigenvalue(
            f"eigenvalue real part within {DEGENERATE_TOL} of zero: {eigs}")
    stable = all(e.real < 0 for e in eigs)

    if cls is SolutionClass.MIXED_MODE:
        u, v = x * x, y * y
        pu, pv, qu, qv = nf.partials(u, v, lam)
        alt = _sign(u * pu + v * qu) if verbose else None
        return StabilityReport(cls, eigs, stable,
                               det_sign=_sign(det), trace_sign=_sign(tr),
                               trace_sign_alt=alt)
    signs = (_sign(float(jac[0, 0])), _sign(float(jac[1, 1])))
    return StabilityReport(cls, eigs, stable, diag_signs=signs)


# --- polynomial normal forms -------------------------------------------------

Term = tuple[int, int, int, float]  # (i, j, k, c): c * u^i v^j lam^k


def _poly_eval(terms: Sequence[Term], u: float, v: float, lam: float) -> float:
    return sum(c * u ** i * v ** j * lam ** k for i, j, k, c in terms)


def _poly_diff(terms: Sequence[Term], var: int) -> list[Term]:
    out = []
    for i, j, k, c in terms:
        exp = (i, j, k)[var]
        if exp:
            new = [i, j, k]
            new[var] = exp - 1
            out.append((new[0], new[1], new[2], c * exp))
    return out


def polynomial_normal_form(p_terms: Sequence[Term],
                           q_terms: Sequence[Term]) -> NormalForm:
    """Build a NormalForm from monomial term lists with exact partials.

    Terms are (i, j, k, c) meaning c * u^i * v^j * lam^k.
    """
    p_terms = [tuple(t) for t in p_terms]
    q_terms = [tuple(t) for t in q_terms]
    pu, pv = _poly_diff(p_terms, 0), _poly_diff(p_terms, 1)
    qu, qv = _poly_diff(q_terms, 0), _poly_diff(q_terms, 1)
    return NormalForm(
        p=lambda u, v, lam: _poly_eval(p_terms, u, v, lam),
        q=lambda u, v, lam: _poly_eval(q_terms, u, v, lam),
        p_u=lambda u, v, lam: _poly_eval(pu, u, v, lam),
        p_v=lambda u, v, lam: _poly_eval(pv, u, v, lam),
        q_u=lambda u, v, lam: _poly_eval(qu, u, v, lam),
        q_v=lambda u, v, lam: _poly_eval(qv, u, v, lam),
    )


def parse_poly(spec: str) -> list[Term]:
    """Parse the CLI polynomial format: 'i,j,k:c[; i,j,k:c ...]'."""
    terms: list[Term] = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            exps, coeff = chunk.split(":")
            i, j, k = (int(e) for e in exps.split(","))
            terms.append((i, j, k, float(coeff)))
        except ValueError as exc:
            raise ValueError(f"bad polynomial term {chunk!r}; "
                             "expected 'i,j,k:coeff'") from exc
    if not terms:
        raise ValueError("empty polynomial")
    return terms
