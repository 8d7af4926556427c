"""
Experiment plans, the parallel runner and result persistence
"""
