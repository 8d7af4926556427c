"""
Baseline private regressors: SgpLAD, GpLASSO, DPIGHT
"""

from frappe_bench.solvers.baselines.dp_ight import DpIghtSolver
from frappe_bench.solvers.baselines.gp_lasso import GpLassoSolver
from frappe_bench.solvers.baselines.sgp_lad import SgpLadSolver

__all__ = ["DpIghtSolver", "GpLassoSolver", "SgpLadSolver"]
