"""
Solver Registry - Central lookup for every benchmark algorithm

The registry maintains all registered solvers and provides methods to:
- Register new solvers
- Retrieve a solver by algorithm name
- List solver information for the CLI
"""

import logging
from typing import Dict, List, Optional, Union

from frappe_bench.models.solver_config import AlgorithmName
from frappe_bench.solvers.base_solver import BaseSolver

logger = logging.getLogger(__name__)


class SolverRegistry:
    """
    Central registry for benchmark solvers.

    Usage:
        registry = SolverRegistry()
        registry.register_solver(FrappeSolver())
        registry.register_solver(GpLassoSolver())
        solver = registry.require("frappe")
    """

    def __init__(self):
        self.solvers: Dict[str, BaseSolver] = {}
        logger.info("Initialized SolverRegistry")

    def register_solver(self, solver: BaseSolver) -> None:
        """
        Register a solver with the registry.

        Args:
            solver: An instance of a solver that inherits from BaseSolver
        """
        if solver.algorithm_key in self.solvers:
            logger.warning(f"Solver {solver.algorithm_key} already registered, replacing")

        self.solvers[solver.algorithm_key] = solver
        logger.info(f"Registered solver: {solver.name} ({solver.algorithm_key})")

    def get_solver(self, algorithm: Union[str, AlgorithmName]) -> Optional[BaseSolver]:
        """
        Get a solver by its algorithm name.

        Args:
            algorithm: Algorithm name or enum member

        Returns:
            The solver instance, or None if not found
        """
        key = algorithm.value if isinstance(algorithm, AlgorithmName) else str(algorithm)
        return self.solvers.get(key)

    def require(self, algorithm: Union[str, AlgorithmName]) -> BaseSolver:
        """
        Like get_solver, but unknown names raise.

        Raises:
            KeyError: listing the registered algorithm names
        """
        solver = self.get_solver(algorithm)
        if solver is None:
            known = ", ".join(sorted(self.solvers))
            raise KeyError(f"unknown algorithm {algorithm!r}; registered: {known}")
        return solver

    def list_solvers(self) -> List[Dict]:
        """
        Get information about all registered solvers.

        Returns:
            List of solver information dictionaries
        """
        return [solver.get_info() for solver in self.solvers.values()]


# Global registry instance
solver_registry = SolverRegistry()
