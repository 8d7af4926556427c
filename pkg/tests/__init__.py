"""
Test suite for the FRAPPE bench
"""
