"""
Unit tests for solver-based architecture
Tests BaseSolver, SolverRegistry, and solver instantiation
"""

import numpy as np
import pytest

from frappe_bench.models.dataset import Dataset
from frappe_bench.models.solver_config import AlgorithmName
from frappe_bench.solvers import register_default_solvers, solver_registry
from frappe_bench.solvers.base_solver import BaseSolver
from frappe_bench.solvers.baselines import DpIghtSolver, GpLassoSolver
from frappe_bench.solvers.frappe import FrappeSolver
from frappe_bench.solvers.solver_registry import SolverRegistry


class TestBaseSolver:
    """Test BaseSolver abstract class"""

    def test_base_solver_cannot_instantiate_directly(self):
        """BaseSolver is abstract and should not be instantiable"""
        with pytest.raises(TypeError):
            BaseSolver(AlgorithmName.FRAPPE, "Test", "Test description", "lad")

    def test_frappe_solver_instantiation(self):
        """FrappeSolver should instantiate correctly"""
        solver = FrappeSolver()
        assert solver.algorithm_key == "frappe"
        assert solver.name == "FRAPPE"
        assert solver.loss == "lad"
        assert solver.selector == "lambda"

    def test_solver_get_info(self):
        """get_info() should return solver metadata"""
        info = DpIghtSolver().get_info()

        assert info["algorithm"] == "dp_ight"
        assert info["name"] == "DPIGHT"
        assert info["loss"] == "squared"
        assert info["selector"] == "sparsity"

    def test_default_grid_follows_selector(self):
        """Lambda-selected solvers get a lambda grid, DPIGHT integer targets"""
        d = Dataset(features=np.eye(4), responses=[1.0, 2.0, 3.0, 4.0])
        lambdas = GpLassoSolver().default_grid(d, 5)
        targets = DpIghtSolver().default_grid(d, 5)

        assert len(lambdas) == 5
        assert lambdas[0] == pytest.approx(1.0)
        assert targets == [1.0, 2.0, 3.0, 4.0]


class TestSolverRegistry:
    """Test SolverRegistry functionality"""

    def test_registry_initialization(self):
        """Registry should initialize empty"""
        registry = SolverRegistry()
        assert len(registry.solvers) == 0

    def test_register_solver(self):
        """Should be able to register a solver"""
        registry = SolverRegistry()
        solver = GpLassoSolver()

        registry.register_solver(solver)

        assert len(registry.solvers) == 1
        assert "gp_lasso" in registry.solvers
        assert registry.get_solver("gp_lasso") is solver
        assert registry.get_solver(AlgorithmName.GP_LASSO) is solver

    def test_register_duplicate_solver_replaces(self):
        """Registering the same algorithm key should replace"""
        registry = SolverRegistry()
        first = GpLassoSolver()
        second = GpLassoSolver()

        registry.register_solver(first)
        registry.register_solver(second)

        assert len(registry.solvers) == 1
        assert registry.get_solver("gp_lasso") is second

    def test_get_nonexistent_solver(self):
        """Getting a non-existent solver should return None"""
        registry = SolverRegistry()
        assert registry.get_solver("nonexistent") is None

    def test_require_unknown_solver(self):
        """require() raises KeyError naming the registered solvers"""
        registry = register_default_solvers(SolverRegistry())
        with pytest.raises(KeyError, match="frappe-nonprivate"):
            registry.require("lasso")

    def test_list_solvers(self):
        """list_solvers() should return info for all solvers"""
        registry = SolverRegistry()
        registry.register_solver(FrappeSolver(non_private=True))

        solvers = registry.list_solvers()

        assert len(solvers) == 1
        assert solvers[0]["algorithm"] == "frappe-nonprivate"
        assert solvers[0]["loss"] == "lad"

    def test_global_registry_has_every_algorithm(self):
        """The package-level registry knows all five algorithms"""
        assert sorted(solver_registry.solvers) == sorted(a.value for a in AlgorithmName)

    def test_public_interface(self):
        """The registry exposes register, lookup and listing only"""
        public = {name for name in vars(SolverRegistry) if not name.startswith("_")}
        assert public == {"register_solver", "get_solver", "require", "list_solvers"}


# Run tests
if __name__ == "__main__":
    pytest.main([__file__, "-v"])
