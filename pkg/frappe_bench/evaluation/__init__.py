"""
Metrics and BIC model selection
"""
