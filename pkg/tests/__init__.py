"""
Test suite for the Zeeman cavity simulator.
"""
