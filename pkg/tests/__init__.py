"""
Test suite for Multiscatter.
"""
