"""
FRAPPE benchmark harness: differentially private sparse LAD regression,
baseline private regressors, synthetic data and experiment orchestration.
"""

__version__ = "1.0.0"
