"""
FRAPPE solver package
"""

from frappe_bench.solvers.frappe.solver import FrappeSolver

__all__ = ["FrappeSolver"]
