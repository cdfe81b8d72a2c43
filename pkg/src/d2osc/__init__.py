"""D2-symmetric four-cell oscillator networks.

Builds coupled ODEs from the Cayley graph of the order-4 abelian symmetry
group, evaluates the planar bifurcation normal form, and analyzes the
explicit phase family on the torus whose four corner saddles join into a
robust heteroclinic cycle with closed-form stability regions.
"""

from .group import (GroupElement, Perm, PlanarAction, TorusPoint, apply_perm,
                    apply_torus, cayley_edges, embed_fix_z2, isotropy_planar,
                    orbit_planar, verify_isotropy_table)
from .heteroclinic import (CycleReport, SaddleData, StabilityVerdict,
                           classify_km, classify_rho, classify_theorem,
                           detect_cycle, lap_monitor, rho, rho_factors)
from .integrator import (IntegratorOptions, Method, Termination, Trajectory,
                         compiled_available, integrate, integrate_until_near)
from .network import (CellNetwork, CouplingFns, catalog_network,
                      check_equivariance, isotypic_spectrum, jacobian_fd,
                      vector_field)
from .normal_form import (NormalForm, SolutionClass, classify_solution,
                          eval_g, jacobian_dg, polynomial_normal_form,
                          stability_signs)
from .phase_model import (Edge, EquilibriumReport, InvariantCurve, ModelParams,
                          PhaseField, PlanarPhase, edge_eigenvalues,
                          equilibria, invariant_curve_residual, jacobian,
                          random_saddle_params, rhs, rhs_factored,
                          saddle_conditions)

__version__ = "0.1.0"

__all__ = [
    "GroupElement", "Perm", "PlanarAction", "TorusPoint", "apply_perm",
    "apply_torus", "cayley_edges", "embed_fix_z2", "isotropy_planar",
    "orbit_planar", "verify_isotropy_table",
    "CycleReport", "SaddleData", "StabilityVerdict", "classify_km",
    "classify_rho", "classify_theorem", "detect_cycle", "lap_monitor",
    "rho", "rho_factors",
    "IntegratorOptions", "Method", "Termination", "Trajectory",
    "compiled_available", "integrate", "integrate_until_near",
    "CellNetwork", "CouplingFns", "catalog_network", "check_equivariance",
    "isotypic_spectrum", "jacobian_fd", "vector_field",
    "NormalForm", "SolutionClass", "classify_solution", "eval_g",
    "jacobian_dg", "polynomial_normal_form", "stability_signs",
    "Edge", "EquilibriumReport", "InvariantCurve", "ModelParams",
    "PhaseField", "PlanarPhase", "edge_eigenvalues", "equilibria",
    "invariant_curve_residual", "jacobian", "random_saddle_params", "rhs",
    "rhs_factored", "saddle_conditions",
    "__version__",
]
