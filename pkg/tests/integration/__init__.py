"""
Tests Integration package for jetnormals
"""
