"""
Tests Fixtures package for jetnormals
"""
