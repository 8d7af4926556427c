"""
Core numerical modules - proximal operators, Gaussian mechanism, kernels
"""
