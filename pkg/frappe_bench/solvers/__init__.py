"""
Benchmark Solvers Module

All solvers inherit from BaseSolver and are registered with the global
SolverRegistry when this package is imported.
"""

from frappe_bench.solvers.base_solver import BaseSolver, SolverContext
from frappe_bench.solvers.baselines import DpIghtSolver, GpLassoSolver, SgpLadSolver
from frappe_bench.solvers.frappe import FrappeSolver
from frappe_bench.solvers.solver_registry import SolverRegistry, solver_registry


def register_default_solvers(registry: SolverRegistry) -> SolverRegistry:
    """Register FRAPPE, its non-private twin and the three baselines."""
    registry.register_solver(FrappeSolver())
    registry.register_solver(FrappeSolver(non_private=True))
    registry.register_solver(SgpLadSolver())
    registry.register_solver(GpLassoSolver())
    registry.register_solver(DpIghtSolver())
    return registry


register_default_solvers(solver_registry)

__all__ = ["BaseSolver", "SolverContext", "SolverRegistry", "register_default_solvers", "solver_registry"]
