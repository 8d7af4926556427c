"""
Synthetic data generation and CSV ingestion
"""
